#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qecv/bits.hpp"
#include "qecv/cexpr.hpp"

namespace qecv::pauli {

using cexpr::PhasePoly;

// Exact scalars (x + y*sqrt2) / 2^t.  Canonical: t is minimal, i.e. x and y
// are not both even when t > 0.  Equality is then componentwise.
class SRing {
public:
    SRing() = default;
    SRing(std::int64_t x, std::int64_t y = 0, unsigned t = 0);

    static SRing zero() { return {}; }
    static SRing one() { return {1}; }
    static SRing inv_sqrt2() { return {0, 1, 1}; }

    std::int64_t x() const { return x_; }
    std::int64_t y() const { return y_; }
    unsigned t() const { return t_; }

    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_one() const { return x_ == 1 && y_ == 0 && t_ == 0; }
    int sign() const;
    SRing abs() const { return sign() < 0 ? -*this : *this; }
    double to_double() const;

    SRing operator-() const { return {-x_, -y_, t_}; }
    friend SRing operator+(const SRing& a, const SRing& b);
    friend SRing operator-(const SRing& a, const SRing& b) { return a + (-b); }
    friend SRing operator*(const SRing& a, const SRing& b);
    bool operator==(const SRing& o) const { return x_ == o.x_ && y_ == o.y_ && t_ == o.t_; }
    bool operator!=(const SRing& o) const { return !(*this == o); }

    std::string str() const;

private:
    std::int64_t x_ = 0, y_ = 0;
    unsigned t_ = 0;
};

// scalar * (-1)^sign * i^iexp * P(xs, zs).  Letter per qubit: (x,z) =
// (0,0) I, (1,0) X, (0,1) Z, (1,1) Y.  Canonical: iexp in {0,1} (a factor
// i^2 is folded into the sign) and scalar > 0 (a negative scalar moves its
// sign into the constant of `sign`).
struct PauliTerm {
    SRing scalar = SRing::one();
    PhasePoly sign;
    int iexp = 0;
    BitVec xs, zs;

    PauliTerm() = default;
    explicit PauliTerm(std::size_t n) : xs(n), zs(n) {}

    std::size_t n() const { return xs.size(); }
    // q is 1-based in all public helpers
    char letter(std::size_t q) const;
    void set_letter(std::size_t q, char l);
    bool is_identity() const { return xs.none() && zs.none(); }
    bool hermitian() const { return iexp % 2 == 0; }
    std::size_t weight() const { return (xs | zs).popcount(); }
    std::vector<std::size_t> support() const;

    bool same_pauli(const PauliTerm& o) const { return xs == o.xs && zs == o.zs; }
    void canonicalize();

    // "X1 X3" (or "I" for the identity)
    std::string word() const;
    // "XIXI"
    std::string dense() const;
    // phase prefix and word, e.g. "-X1 X3", "(-1)^(b+x_1) Z1"; non-unit
    // scalars are rendered as "sqrt2/2 * X1"
    std::string str() const;

    bool operator==(const PauliTerm& o) const {
        return scalar == o.scalar && sign == o.sign && iexp == o.iexp && xs == o.xs && zs == o.zs;
    }
    bool operator!=(const PauliTerm& o) const { return !(*this == o); }

    static PauliTerm identity(std::size_t n) { return PauliTerm(n); }
    // letters: list of (qubit, letter)
    static PauliTerm from_letters(std::size_t n, const std::vector<std::pair<std::size_t, char>>& letters,
                                  bool negative = false);
    // "X1 X3 X5" or "-Z1 Z2"; n must cover every index
    static PauliTerm parse_sparse(const std::string& s, std::size_t n);
    // "-ZIIZ"
    static PauliTerm parse_dense(const std::string& s);
};

PauliTerm mul(const PauliTerm& a, const PauliTerm& b);
bool commutes(const PauliTerm& a, const PauliTerm& b);
// Phase difference when a and b have the same Pauli string and scalar
// (up to sign); nullopt otherwise.
std::optional<PhasePoly> equal_up_to_phase(const PauliTerm& a, const PauliTerm& b);
// symplectic vector (xs | zs), length 2n
BitVec symplectic(const PauliTerm& p);

class PauliSum {
public:
    PauliSum() = default;
    explicit PauliSum(std::size_t n) : n_(n) {}
    PauliSum(const PauliTerm& t);  // NOLINT: implicit lift of a single term

    std::size_t n() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    bool is_single() const { return terms_.size() == 1; }
    const PauliTerm& single() const { return terms_.front(); }

    // Builds from arbitrary terms: canonicalizes, sorts and merges terms
    // with equal Pauli, iexp and symbolic sign atoms.
    static PauliSum from_terms(std::size_t n, std::vector<PauliTerm> terms);

    PauliSum xor_sign(const PhasePoly& p) const;
    PauliSum scaled(const SRing& s) const;

    friend PauliSum operator+(const PauliSum& a, const PauliSum& b);
    friend PauliSum operator*(const PauliSum& a, const PauliSum& b);
    bool operator==(const PauliSum& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const PauliSum& o) const { return !(*this == o); }

    // union of qubits touched by any term
    std::vector<std::size_t> support() const;
    // set of letters at qubit q across terms, as a bit mask over {X,Y,Z}
    unsigned letters_at(std::size_t q) const;

    std::string str() const;

private:
    std::size_t n_ = 0;
    std::vector<PauliTerm> terms_;
};

PauliSum mul(const PauliSum& a, const PauliSum& b);
// Operator equality test of commutation for sums: AB == BA.
bool commutes(const PauliSum& a, const PauliSum& b);

enum class Gate { X, Y, Z, H, S, T, CNOT, CZ, ISWAP };

Gate gate_from_name(const std::string& name);  // throws std::invalid_argument
const char* gate_name(Gate g);
bool is_two_qubit(Gate g);
bool is_pauli_gate(Gate g);
bool is_clifford(Gate g);

// U^dagger P U per the substitution table; qubits are 1-based.
PauliSum conjugate(Gate g, std::size_t i, std::size_t j, const PauliSum& p);
inline PauliSum conjugate(Gate g, std::size_t i, const PauliSum& p) { return conjugate(g, i, 0, p); }
// U P U^dagger (inverse direction), obtained by repeating the table.
PauliSum conjugate_forward(Gate g, std::size_t i, std::size_t j, const PauliSum& p);

}  // namespace qecv::pauli
