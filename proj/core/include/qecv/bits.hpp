#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qecv {

// Fixed-length bit vector backed by 64-bit words. Length is set at
// construction; all binary operations require equal lengths.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) w_[i >> 6] |= m;
        else w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVec& operator^=(const BitVec& o);
    BitVec& operator&=(const BitVec& o);
    BitVec& operator|=(const BitVec& o);
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
    friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }

    std::size_t popcount() const;
    bool any() const;
    bool none() const { return !any(); }
    // parity of popcount(a & b)
    static bool dot(const BitVec& a, const BitVec& b);
    // index of the lowest set bit, or size() if none
    std::size_t first() const;

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }
    // Lexicographic by bit index 0,1,2,... (bit 0 most significant).
    bool operator<(const BitVec& o) const;

    std::string to_string() const;
    std::size_t hash() const;
    const std::vector<std::uint64_t>& words() const { return w_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

namespace gf2 {

// Row-reduce a copy of rows; returns the rank.
std::size_t rank(std::vector<BitVec> rows);

// Find coefficients c with XOR_{i : c_i} rows[i] == target.
std::optional<BitVec> solve(const std::vector<BitVec>& rows, const BitVec& target);

// Basis of the null space of the matrix whose rows are given; each
// returned vector x has size ncols and satisfies rows[i]·x = 0 for all i.
std::vector<BitVec> nullspace(const std::vector<BitVec>& rows, std::size_t ncols);

// Solve A x = b (A given by rows, b one bit per row). Returns one solution.
std::optional<BitVec> solve_system(const std::vector<BitVec>& rows, const std::vector<bool>& rhs,
                                   std::size_t ncols);

}  // namespace gf2
}  // namespace qecv
