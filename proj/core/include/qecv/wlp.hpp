#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qecv/qprog.hpp"

namespace qecv::wlp {

using cexpr::BExp;
using cexpr::PhasePoly;
using pauli::Gate;
using pauli::PauliSum;
using pauli::PauliTerm;
using qprog::Assertion;
using qprog::Stmt;
using qprog::StmtP;

class WlpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// lhs must entail rhs
struct Obligation {
    Assertion lhs, rhs;
    std::string origin;
};

struct WlpResult {
    Assertion pre;
    std::vector<Obligation> obligations;
};

// Generic backward engine over the full assertion language. n is the qubit
// count; every Pauli atom of post is resized to it.
WlpResult wlp(const StmtP& s, const Assertion& post, std::size_t n);
inline Assertion wlp_pre(const StmtP& s, const Assertion& post, std::size_t n) { return wlp(s, post, n).pre; }

// {b /\ inv} body {inv} reduced to entailments, plus ~b /\ inv |= post.
std::vector<Obligation> check_while_obligations(const Assertion& inv, const BExp& cond, const StmtP& body,
                                                const Assertion& post, std::size_t n);

// Building blocks, exposed for tests.
Assertion subst_assertion(const Assertion& a, const std::string& x, const BExp& e);
Assertion conjugate_assertion(const Assertion& a, Gate g, std::size_t i, std::size_t j = 0);
// XOR guard into the sign of every term anticommuting with the Pauli gate
// letter at qubit i.
Assertion guard_assertion(const Assertion& a, Gate g, std::size_t i, const PhasePoly& guard);

// ------------------------------------------------------------ PhaseForm

struct Row {
    PauliSum gen;      // single-term rows keep their sign in `phase`
    PhasePoly phase;
};

// bigvee bound : /\_i (-1)^{phase_i} gen_i /\ /\_j (constraint_j == 0) /\ classical
struct PhaseForm {
    std::size_t n = 0;
    std::vector<std::string> bound;       // measured syndromes, in program order
    std::vector<Row> rows;
    std::vector<PhasePoly> constraints;   // each must evaluate to 0
    BExp classical = BExp::tt();
    std::vector<std::string> order;       // variables in definition order (syndromes, decoder atoms)

    Assertion to_assertion() const;
    std::string str() const;
};

// Rows built from signed Pauli terms; each row's sign moves into its phase.
PhaseForm phaseform_from_rows(std::size_t n, const std::vector<std::pair<PauliTerm, PhasePoly>>& rows,
                              const BExp& classical = BExp::tt());
// Accepts a conjunction of Pauli atoms and classical atoms.
PhaseForm phaseform_from_assertion(const Assertion& a, std::size_t n);

// Structured backward pass. Supports skip, assign, unitaries, conditional
// errors (Pauli with boolean guard, or any gate with constant guard),
// measurement and decode; init/if/while are rejected.
PhaseForm wlp_phaseform(const StmtP& s, const PhaseForm& post);

}  // namespace qecv::wlp
