#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qecv/codes.hpp"

namespace qecv::oracle {

using cexpr::Assignment;
using cexpr::BExp;
using pauli::Gate;
using qprog::Assertion;
using qprog::StabilizerCode;
using qprog::Stmt;
using qprog::StmtP;

// ---------------------------------------------------------------- exact field

// Q(i, sqrt2): a + b*sqrt2 with a, b complex rationals.
class QF {
public:
    QF();
    QF(long re);
    static QF make(const std::string& a_re, const std::string& a_im, const std::string& b_re, const std::string& b_im);
    static QF i();
    static QF sqrt2();
    static QF inv_sqrt2();
    static QF omega();  // e^{i pi/4}

    bool is_zero() const;
    QF conj() const;
    QF inv() const;
    QF operator-() const;
    friend QF operator+(const QF& x, const QF& y);
    friend QF operator-(const QF& x, const QF& y);
    friend QF operator*(const QF& x, const QF& y);
    friend QF operator/(const QF& x, const QF& y) { return x * y.inv(); }
    bool operator==(const QF& o) const;
    bool operator!=(const QF& o) const { return !(*this == o); }
    std::string str() const;

    struct Impl;

private:
    std::shared_ptr<const Impl> p_;
    explicit QF(std::shared_ptr<const Impl> p) : p_(std::move(p)) {}
};

using Vec = std::vector<QF>;
using Matrix = std::vector<Vec>;  // row-major

// Qubit 1 is the most significant bit of the basis index.
Matrix identity_matrix(std::size_t dim);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix adjoint(const Matrix& a);
Matrix gate_matrix(Gate g, std::size_t i, std::size_t j, std::size_t n);
// Signs are evaluated under m.
Matrix pauli_matrix(const pauli::PauliSum& p, const Assignment& m = {});
Vec matvec(const Matrix& a, const Vec& v);

// ---------------------------------------------------------------- subspaces

struct Subspace {
    std::size_t dim = 0;      // ambient dimension
    std::vector<Vec> basis;   // reduced row echelon, independent
    std::size_t rank() const { return basis.size(); }
    bool contains(const Vec& v) const;
    bool operator==(const Subspace& o) const;
};

Subspace span(std::size_t dim, const std::vector<Vec>& vs);
Subspace full_space(std::size_t dim);
Subspace zero_space(std::size_t dim);
Subspace orthocomplement(const Subspace& s);
Subspace join(const Subspace& a, const Subspace& b);
Subspace meet(const Subspace& a, const Subspace& b);
Subspace sasaki(const Subspace& a, const Subspace& b);  // ~a \/ (a /\ b)
bool included(const Subspace& a, const Subspace& b);
// +1 eigenspace of a Hermitian matrix
Subspace eigenspace(const Matrix& m);

Subspace assertion_subspace(const Assertion& a, const Assignment& m, std::size_t n);
bool entails(const Assertion& a, const Assertion& b, const Assignment& m, std::size_t n);

// ---------------------------------------------------------------- states

class StateVector {
public:
    explicit StateVector(std::size_t n);  // |0...0>
    StateVector(std::size_t n, Vec amps);
    std::size_t n() const { return n_; }
    const Vec& amps() const { return a_; }
    bool is_zero() const;
    void apply(Gate g, std::size_t i, std::size_t j = 0);
    void apply_pauli(const pauli::PauliTerm& p);
    // unnormalized projections onto the +1 and -1 eigenspaces of p
    std::pair<StateVector, StateVector> project(const pauli::PauliTerm& p) const;
    // same ray
    bool proportional(const StateVector& o) const;

private:
    std::size_t n_;
    Vec a_;
};

class Tableau {
public:
    explicit Tableau(std::size_t n);  // |0...0>
    std::size_t n() const { return n_; }
    void apply(Gate g, std::size_t i, std::size_t j = 0);  // throws for T
    void apply_pauli(const pauli::PauliTerm& p);
    // outcome 0 means the +1 eigenvalue of p (including p's sign)
    bool deterministic(const pauli::PauliTerm& p, int* outcome = nullptr) const;
    // Returns the post-measurement states, one per possible outcome.
    std::vector<std::pair<int, Tableau>> measure(const pauli::PauliTerm& p) const;
    bool stabilized_by(const pauli::PauliTerm& p) const;
    std::vector<pauli::PauliTerm> stabilizers() const;

private:
    struct Row {
        std::vector<std::uint8_t> x, z;
        std::uint8_t r = 0;
    };
    std::size_t n_;
    std::vector<Row> rows_;  // destabilizers 0..n-1, stabilizers n..2n-1
    void rowsum(Row& h, const Row& i) const;
    bool anti(const Row& a, const pauli::PauliTerm& p) const;
    static Row from_term(const pauli::PauliTerm& p);
    void h(std::size_t a);
    void s(std::size_t a);
    void cx(std::size_t a, std::size_t b);
};

// ---------------------------------------------------------------- simulation

template <class S>
struct Branch {
    Assignment mem;
    S state;
};

// Decoder outputs for a decode statement in the given memory.
using DecodeFn = std::function<std::vector<Assignment>(const Stmt&, const Assignment&)>;

struct SimOptions {
    DecodeFn decode;          // default: every output zero
    std::size_t max_loop = 64;
};

std::vector<Branch<StateVector>> simulate(const StmtP& prog, std::vector<Branch<StateVector>> init, const SimOptions& opts = {});
std::vector<Branch<Tableau>> simulate(const StmtP& prog, std::vector<Branch<Tableau>> init, const SimOptions& opts = {});

// ---------------------------------------------------------------- decoding

// All minimum-weight corrections (qubit sets, 1-based) of single-letter
// Pauli type `letter` reproducing the syndrome on `checks`.
std::vector<std::vector<std::size_t>> exhaustive_decoder(const std::vector<pauli::PauliTerm>& checks,
                                                         const std::vector<bool>& syndrome, char letter);

// Every decoder output allowed by the contract with per-family weight <= w.
std::vector<Assignment> conforming_outputs(const qprog::DecoderCall& call, const Assignment& mem, std::size_t w);

// ---------------------------------------------------------------- verdicts

struct OracleOptions {
    std::size_t max_weight = 1;
    BExp user = BExp::tt();
    std::vector<char> bases = {'Z', 'X'};
    std::size_t jobs = 1;
    std::size_t cap = 12;  // qubit cap of the state-vector path
};

struct OracleVerdict {
    bool verified = true;
    Assignment witness;     // error pattern, parameters and the failing branch's memory
    char basis = 'Z';
    std::string message;
    std::string path;       // "tableau" or "statevector"
    std::size_t patterns = 0;
};

OracleVerdict brute_force_verify(const codes::Scenario& sc, const OracleOptions& opts);

struct ReplayResult {
    bool failure = false;   // the oracle observed a logical failure
    std::string message;
};

// Simulate the scenario under the error pattern and parameters in `model`.
ReplayResult replay(const codes::Scenario& sc, const Assignment& model, char basis);
// Detection witness: zero syndrome and anticommutation with a logical.
ReplayResult replay_detection(const StabilizerCode& code, const Assignment& model);

}  // namespace qecv::oracle
