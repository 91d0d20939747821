#include "qecv/bits.hpp"

#include <bit>
#include <stdexcept>

namespace qecv {

BitVec& BitVec::operator^=(const BitVec& o) {
    if (n_ != o.n_) throw std::invalid_argument("BitVec length mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

BitVec& BitVec::operator&=(const BitVec& o) {
    if (n_ != o.n_) throw std::invalid_argument("BitVec length mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
}

BitVec& BitVec::operator|=(const BitVec& o) {
    if (n_ != o.n_) throw std::invalid_argument("BitVec length mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
}

std::size_t BitVec::popcount() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool BitVec::any() const {
    for (auto w : w_)
        if (w) return true;
    return false;
}

bool BitVec::dot(const BitVec& a, const BitVec& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("BitVec length mismatch");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.w_.size(); ++i) acc ^= a.w_[i] & b.w_[i];
    return std::popcount(acc) & 1;
}

std::size_t BitVec::first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(w_[i]));
    return n_;
}

bool BitVec::operator<(const BitVec& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    for (std::size_t i = 0; i < n_; ++i) {
        bool a = get(i), b = o.get(i);
        if (a != b) return b;
    }
    return false;
}

std::string BitVec::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

std::size_t BitVec::hash() const {
    std::size_t h = n_ * 0x9e3779b97f4a7c15ULL;
    for (auto w : w_) h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

namespace gf2 {

std::size_t rank(std::vector<BitVec> rows) {
    if (rows.empty()) return 0;
    std::size_t ncols = rows[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        ++r;
    }
    return r;
}

std::optional<BitVec> solve(const std::vector<BitVec>& rows, const BitVec& target) {
    // Columns of the system are the given rows; transpose into equations.
    std::size_t m = rows.size();
    std::size_t len = target.size();
    std::vector<BitVec> eq(len, BitVec(m));
    std::vector<bool> rhs(len);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < len; ++i)
            if (rows[j].get(i)) eq[i].set(j);
    for (std::size_t i = 0; i < len; ++i) rhs[i] = target.get(i);
    return solve_system(eq, rhs, m);
}

std::optional<BitVec> solve_system(const std::vector<BitVec>& rows_in, const std::vector<bool>& rhs_in,
                                   std::size_t ncols) {
    std::vector<BitVec> rows = rows_in;
    std::vector<bool> rhs = rhs_in;
    std::vector<std::size_t> pivcol;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        bool t = rhs[p];
        rhs[p] = rhs[r];
        rhs[r] = t;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c)) {
                rows[i] ^= rows[r];
                rhs[i] = rhs[i] != rhs[r];
            }
        pivcol.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i)
        if (rhs[i]) return std::nullopt;
    BitVec x(ncols);
    for (std::size_t i = 0; i < r; ++i)
        if (rhs[i]) x.set(pivcol[i]);
    return x;
}

std::vector<BitVec> nullspace(const std::vector<BitVec>& rows_in, std::size_t ncols) {
    std::vector<BitVec> rows = rows_in;
    std::vector<std::size_t> pivcol;
    std::vector<bool> is_piv(ncols, false);
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        pivcol.push_back(c);
        is_piv[c] = true;
        ++r;
    }
    std::vector<BitVec> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        BitVec x(ncols);
        x.set(f);
        for (std::size_t i = 0; i < r; ++i)
            if (rows[i].get(f)) x.set(pivcol[i]);
        basis.push_back(x);
    }
    return basis;
}

}  // namespace gf2
}  // namespace qecv
