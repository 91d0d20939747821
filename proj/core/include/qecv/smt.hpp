#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "qecv/vc.hpp"

namespace qecv::smt {

using cexpr::Assignment;
using cexpr::BExp;
using vc::ClassicalVC;

enum class Status { Verified, Refuted, Unknown };
const char* status_name(Status s);

struct Verdict {
    Status status = Status::Unknown;
    std::string reason;      // for Unknown: timeout, cancelled, solver-error: ..., solver-unknown
    Assignment model;        // Refuted: full assignment including fixed values
    double seconds = 0;
    std::string label;
};

struct SolverConfig {
    // "{timeout_ms}" and "{timeout_s}" are substituted; the script arrives on stdin
    std::string command = "z3 -in -t:{timeout_ms}";
    unsigned timeout_ms = 60000;
    std::string dump_dir;    // write each script here when non-empty
};

// Defaults with the QECV_SOLVER environment override applied.
SolverConfig default_config();

struct Encoding {
    std::string script;
    std::vector<std::string> vars;  // declaration order
    unsigned width = 1;             // bit-vector width used for sums
};

// Bit-width for sums over `nvars` one-bit variables and literals up to maxlit.
unsigned sum_width(std::size_t nvars, std::int64_t maxlit);

// Term translation, exposed for tests.
std::string to_smt_bool(const BExp& e, unsigned width);
std::string to_smt_int(const BExp& e, unsigned width);

Encoding encode(const ClassicalVC& vc);

struct RawResult {
    std::string out, err;
    int exit_code = -1;
    bool timed_out = false;
    bool cancelled = false;
    bool spawn_failed = false;
};

RawResult run_solver(const std::string& script, const SolverConfig& cfg, const std::atomic<bool>* cancel = nullptr);

Assignment parse_model(const std::string& out);

// The model must satisfy the query (hypothesis and negated goal, or
// hypothesis and goal for satisfiable-mode VCs).
bool model_replays(const ClassicalVC& vc, const Assignment& model);

Verdict check(const ClassicalVC& vc, const SolverConfig& cfg, const std::atomic<bool>* cancel = nullptr);

}  // namespace qecv::smt
