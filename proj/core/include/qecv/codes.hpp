#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qecv/qprog.hpp"

namespace qecv::codes {

using cexpr::BExp;
using pauli::Gate;
using qprog::StabilizerCode;
using qprog::StmtP;

StabilizerCode repetition(std::size_t d);
StabilizerCode steane();
StabilizerCode rotated_surface(std::size_t d);
// Block-diagonal combination; qubits of block b are shifted by the sizes
// of the preceding blocks.
StabilizerCode direct_sum(const std::vector<StabilizerCode>& blocks);

// "builtin:steane", "builtin:repetition", "builtin:surface" (distance taken
// from the argument) or a code file path.
StabilizerCode resolve_code(const std::string& spec, std::size_t distance);

enum class LogicalOp { None, H, S, CNOT };
LogicalOp logical_from_name(const std::string& s);
const char* logical_name(LogicalOp op);

struct ErrorSite {
    std::string var;
    std::size_t qubit;
    bool propagated;
};

struct Scenario {
    std::string name;
    std::vector<StabilizerCode> blocks;
    StabilizerCode code;                 // direct sum of blocks
    std::size_t n = 0;
    StmtP source;                        // as generated (loops kept)
    StmtP program;                       // desugared
    Gate error_gate = Gate::Y;
    std::vector<ErrorSite> sites;        // ordered by qubit, then standard before propagated
    std::vector<std::string> params;     // logical phase parameters, one per block
    qprog::DecoderSpec decoder;          // fixed from the code's measured checks
    std::size_t budget = 1;              // total error weight bound

    std::vector<std::string> error_vars() const;
    BExp budget_bexp() const;            // sum of error vars <= budget
    std::string program_text() const;    // source printed with a header
};

struct CycleOptions {
    Gate error = Gate::Y;
    LogicalOp op = LogicalOp::None;
    // explicit propagated-error sites (qubits of block 1); when empty the
    // propagated block covers every qubit if op != None and is absent
    // otherwise
    std::vector<std::size_t> ep_sites;
    std::optional<std::size_t> budget;   // default floor((d-1)/2)
};

Scenario ec_cycle(const StabilizerCode& code, const CycleOptions& opts);
Scenario ghz_scenario(Gate error = Gate::Y);
Scenario cnot_propagated_scenario(Gate error = Gate::Y);

// Build a scenario around an arbitrary program. Sites are read off the
// conditional statements of the desugared program; the decoder contract is
// derived from its measurements.
Scenario custom_scenario(const StabilizerCode& code, const StmtP& program, std::size_t budget,
                         const std::string& name = "custom");

// Error-site constraints.
BExp locality(const Scenario& sc, const std::vector<std::size_t>& qubits);
std::vector<std::size_t> random_sites(std::size_t n, std::size_t count, std::uint64_t seed);
BExp discreteness(const Scenario& sc, std::size_t segments);

// Mutations used for bug-injection tests.
struct Mutation {
    enum class Kind { ParityRow, DecoderFlip, DropCorrection } kind;
    std::size_t a = 0, b = 0, c = 0;
    std::string describe() const;
};
Scenario mutate(const Scenario& sc, const Mutation& m);
std::vector<Mutation> standard_mutations(const Scenario& sc, std::size_t count);

}  // namespace qecv::codes
