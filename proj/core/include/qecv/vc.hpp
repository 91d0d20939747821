#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecv/codes.hpp"
#include "qecv/wlp.hpp"

namespace qecv::vc {

using cexpr::Assignment;
using cexpr::BExp;
using cexpr::PhasePoly;
using pauli::PauliSum;
using pauli::PauliTerm;
using wlp::PhaseForm;
using wlp::Row;

class VcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClassicalVC {
    enum class Mode { Validity, Satisfiable };
    std::string label;
    Mode mode = Mode::Validity;
    std::vector<std::string> universals;  // errors, parameters, user variables
    std::vector<std::string> defined;     // syndromes and decoder atoms, definition order
    std::vector<std::string> error_vars;  // universals enumerated by the splitter, qubit order
    BExp budget = BExp::tt();
    BExp user = BExp::tt();
    BExp decoder = BExp::tt();            // P_f
    std::vector<PhasePoly> sd;            // syndrome definitions, each == 0
    std::vector<PhasePoly> goal_eqs;      // each == 0
    BExp goal_extra = BExp::tt();         // non-equational goal part (detection body)
    Assignment fixed;                     // values fixed by instance splitting or the splitter
    bool exists_form = false;             // nested forall-exists layout
    std::vector<std::string> notes;

    BExp sd_bexp() const;
    BExp goal_bexp() const;
    BExp hypothesis() const;              // budget /\ user /\ decoder /\ sd
    std::vector<std::string> all_vars() const;
    std::string dump() const;
    // Fix some universals to constants (partial evaluation).
    ClassicalVC specialize(const Assignment& values) const;
};

enum class Case { Case1, Case2, Case3 };
const char* case_name(Case c);

struct ProductDecomposition {
    std::size_t target = 0;
    bool alpha = false;
    std::vector<std::size_t> factors;     // indices into the basis
};

// Basis elements must be independent, commuting single Pauli strings.
ProductDecomposition decompose_products(const std::vector<PauliTerm>& basis, const PauliTerm& target);

Case classify(const std::vector<Row>& lhs, const std::vector<Row>& rhs);

// Phase equations (each == 0) for Case1/Case2 rows.
std::vector<PhasePoly> reduce_commuting(const std::vector<Row>& lhs, const std::vector<Row>& rhs);

struct BranchPair {
    std::size_t row;                      // 0-based row index eliminated
    std::string eliminated;               // the residual row that was replaced
    std::string s0, s1;                   // syndrome vectors of the paired branches
    std::string delta;
};

struct Case3Trace {
    std::size_t ngen = 0;                 // rows below ngen are generators
    std::vector<std::size_t> pivots;      // 0-based row indices
    std::vector<std::pair<std::size_t, std::string>> updated_rhs;  // rows changed by step (b)
    std::vector<std::pair<std::size_t, std::string>> updated_lhs;
    std::vector<std::pair<std::size_t, PhasePoly>> phase_map;      // t_j after step (b)
    std::vector<BranchPair> pairs;
    std::vector<std::string> columns;     // syndrome order of the pair vectors
    std::string str() const;
};

struct Elimination {
    std::vector<Row> lhs, rhs;            // commuting instance after steps (a)-(c)
    std::vector<bool> dropped;            // rows whose equation was discharged by pairing
    Case3Trace trace;
};

// Steps (a)-(c). `reference` are the rows produced by the error-free
// program; `ngen` is the number of generator rows (the rest are logicals).
Elimination eliminate_noncommuting(const std::vector<Row>& lhs, const std::vector<Row>& rhs,
                                   const std::vector<Row>& reference, std::size_t ngen,
                                   const std::vector<std::string>& syndromes, std::size_t cap);

// Three laws: P /\ -P = false, duplicate conjuncts, and branch merging
// (P /\ Q) \/ (~P /\ Q) = Q for P commuting with Q.
qprog::Assertion rewrite_laws(const qprog::Assertion& a);

// ---------------------------------------------------------------- builders

struct VcOptions {
    BExp user = BExp::tt();
    std::vector<char> bases = {'Z', 'X'};
    bool exists_form = false;
    bool weight_bound = true;
    std::size_t case3_cap = 0;            // 0: (n-k)^2
};

struct VcInstance {
    ClassicalVC vc;
    Case kind = Case::Case1;
    std::optional<Case3Trace> trace;
    std::string failure;                  // non-empty when the reduction could not be completed
};

// LHS rows: generators with phase 0, logicals of the chosen basis with the
// scenario parameters as phases.
std::vector<Row> lhs_rows(const codes::Scenario& sc, char basis);
// Post rows: generators and logicals conjugated forward by the ideal unitary.
std::vector<Row> post_rows(const codes::Scenario& sc, char basis);
// P_f from the scenario's decoder contract.
BExp decoder_condition(const qprog::DecoderSpec& spec, const std::vector<std::string>& error_vars,
                       const Assignment& fixed, bool weight_bound);
// Replace guards by constants taken from `values`.
qprog::StmtP specialize_program(const qprog::StmtP& prog, const Assignment& values);

// Error patterns within budget satisfying `user`; used for non-Pauli errors.
std::vector<Assignment> error_instances(const codes::Scenario& sc, const BExp& user);

std::vector<VcInstance> build_correction_vcs(const codes::Scenario& sc, const VcOptions& opts = {});

struct DetectionOptions {
    bool x_errors = true;
    bool z_errors = true;
};
ClassicalVC build_detection_vc(const qprog::StabilizerCode& code, std::size_t dt, const DetectionOptions& opts = {});

}  // namespace qecv::vc
