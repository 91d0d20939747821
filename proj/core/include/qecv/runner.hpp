#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qecv/oracle.hpp"
#include "qecv/smt.hpp"

namespace qecv::runner {

using cexpr::Assignment;
using cexpr::BExp;
using smt::Status;
using vc::ClassicalVC;

struct Subtask {
    std::size_t id = 0;
    Assignment assignment;   // enumerated error bits
    ClassicalVC vc;          // specialized by `assignment`
    std::string failure;     // reduction failure; reported as Unknown without solving
};

// ET heuristic: a branch closes when 2d*ones + bits > n. Branches whose
// partial assignment already falsifies the budget or user constraint are
// pruned. Error variables are taken in the VC's order.
std::vector<Subtask> split(const ClassicalVC& vc, std::size_t d, std::size_t n);

// One subtask per instance, unsplit.
std::vector<Subtask> whole(const std::vector<vc::VcInstance>& instances);

struct TaskRecord {
    std::size_t id = 0;
    std::string label;
    Status status = Status::Unknown;
    std::string reason;
    double seconds = 0;
};

// {"id":..,"label":..,"verdict":..,"reason":..,"wall":..}
std::string record_json(const TaskRecord& r);

std::size_t default_jobs();

struct RunOptions {
    std::size_t jobs = 1;
    smt::SolverConfig solver;
    double total_timeout_s = 24 * 3600;
    std::function<void(const TaskRecord&)> on_record;  // called under a lock
};

struct RunResult {
    Status status = Status::Verified;
    std::string reason;
    std::optional<std::size_t> witness_task;  // index into the task list
    Assignment model;
    std::string label;
    std::vector<TaskRecord> records;          // tasks that reached a verdict or failed
    std::size_t completed = 0;                // solved to Verified/Refuted
    std::size_t total = 0;
    double wall = 0;
};

// {"task":..,"verdict":..,"reason":..,"subtasks":..,"completed":..,"wall":..}
std::string summary_json(const std::string& task, const RunResult& r);

// Work queue over `jobs` workers; the first Refuted cancels the rest.
RunResult run_parallel(const std::vector<Subtask>& tasks, const RunOptions& opts);

// ---------------------------------------------------------------- drivers

struct VerifyOptions {
    vc::VcOptions vc;
    RunOptions run;
    bool split = true;
    std::size_t distance = 0;  // 0: the code's distance
};

struct Report {
    RunResult run;
    std::size_t instances = 0;
    std::size_t subtasks = 0;
    std::vector<std::string> notes;
    std::optional<oracle::ReplayResult> replay;  // set for Refuted
    char basis = 'Z';
};

Report verify_correction(const codes::Scenario& sc, const VerifyOptions& opts);
Report verify_detection(const qprog::StabilizerCode& code, std::size_t dt, const vc::DetectionOptions& dopts,
                        const VerifyOptions& opts);

}  // namespace qecv::runner

namespace qecv::runner {

// ---------------------------------------------------------------- files

// Scenario files are program text preceded by "#!" directives:
//   #! name NAME
//   #! budget N
//   #! code SPEC [DISTANCE]      (builtin name or code file path)
//   #! | LINE                    (inline code file, one line per directive)
std::string scenario_file(const codes::Scenario& sc);
codes::Scenario parse_scenario_file(const std::string& text);
codes::Scenario load_scenario(const std::string& path);

// One constraint per line, conjoined:
//   locality Q1 Q2 ...          errors outside the listed qubits are zero
//   locality random COUNT SEED
//   discreteness SEGMENTS
//   anything else is parsed as a boolean expression
BExp parse_constraints(const std::string& text, const codes::Scenario& sc);

}  // namespace qecv::runner
