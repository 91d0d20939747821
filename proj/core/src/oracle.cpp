#include "qecv/oracle.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qecv::oracle {

using pauli::PauliSum;
using pauli::PauliTerm;
using SK = Stmt::Kind;

// ---------------------------------------------------------------- QF

namespace {

struct CQ {
    mpq_class re, im;
    bool zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};
CQ operator+(const CQ& a, const CQ& b) { return {a.re + b.re, a.im + b.im}; }
CQ operator-(const CQ& a, const CQ& b) { return {a.re - b.re, a.im - b.im}; }
CQ operator*(const CQ& a, const CQ& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
bool operator==(const CQ& a, const CQ& b) { return a.re == b.re && a.im == b.im; }

}  // namespace

// value a + b*sqrt2; a null pointer is zero
struct QF::Impl {
    CQ a, b;
};

namespace {
std::shared_ptr<const QF::Impl> mk(CQ a, CQ b) {
    if (a.zero() && b.zero()) return nullptr;
    return std::make_shared<QF::Impl>(QF::Impl{std::move(a), std::move(b)});
}
const CQ kZero{0, 0};
}  // namespace

QF::QF() = default;
QF::QF(long re) : p_(mk({re, 0}, kZero)) {}

QF QF::make(const std::string& a_re, const std::string& a_im, const std::string& b_re, const std::string& b_im) {
    return QF(mk({mpq_class(a_re), mpq_class(a_im)}, {mpq_class(b_re), mpq_class(b_im)}));
}
QF QF::i() { return QF(mk({0, 1}, kZero)); }
QF QF::sqrt2() { return QF(mk(kZero, {1, 0})); }
QF QF::inv_sqrt2() { return QF(mk(kZero, {mpq_class(1, 2), 0})); }
QF QF::omega() { return QF(mk(kZero, {mpq_class(1, 2), mpq_class(1, 2)})); }

bool QF::is_zero() const { return !p_; }

QF QF::conj() const {
    if (!p_) return {};
    return QF(mk({p_->a.re, -p_->a.im}, {p_->b.re, -p_->b.im}));
}

QF QF::operator-() const {
    if (!p_) return {};
    return QF(mk({-p_->a.re, -p_->a.im}, {-p_->b.re, -p_->b.im}));
}

QF operator+(const QF& x, const QF& y) {
    if (!x.p_) return y;
    if (!y.p_) return x;
    return QF(mk(x.p_->a + y.p_->a, x.p_->b + y.p_->b));
}

QF operator-(const QF& x, const QF& y) { return x + (-y); }

QF operator*(const QF& x, const QF& y) {
    if (!x.p_ || !y.p_) return {};
    const CQ two{2, 0};
    const auto& a = x.p_->a;
    const auto& b = x.p_->b;
    const auto& c = y.p_->a;
    const auto& d = y.p_->b;
    return QF(mk(a * c + two * (b * d), a * d + b * c));
}

QF QF::inv() const {
    if (!p_) throw std::domain_error("division by zero");
    // (a + b sqrt2)^-1 = (a - b sqrt2) / (a^2 - 2 b^2)
    const CQ two{2, 0};
    CQ c = p_->a * p_->a - two * (p_->b * p_->b);
    mpq_class nrm = c.re * c.re + c.im * c.im;
    CQ ci{c.re / nrm, -c.im / nrm};
    return QF(mk(p_->a * ci, CQ{-p_->b.re, -p_->b.im} * ci));
}

bool QF::operator==(const QF& o) const {
    if (!p_ || !o.p_) return !p_ && !o.p_;
    return p_->a == o.p_->a && p_->b == o.p_->b;
}

std::string QF::str() const {
    if (!p_) return "0";
    std::ostringstream s;
    s << "(" << p_->a.re << (sgn(p_->a.im) < 0 ? "" : "+") << p_->a.im << "i)+(" << p_->b.re
      << (sgn(p_->b.im) < 0 ? "" : "+") << p_->b.im << "i)sqrt2";
    return s.str();
}

namespace {

QF from_sring(const pauli::SRing& s) {
    mpz_class den = 1;
    den <<= s.t();
    mpq_class x(mpz_class(static_cast<long>(s.x())), den), y(mpz_class(static_cast<long>(s.y())), den);
    x.canonicalize();
    y.canonicalize();
    return QF::make(x.get_str(), "0", y.get_str(), "0");
}

const QF& half() {
    static const QF h = QF::make("1/2", "0", "0", "0");
    return h;
}

std::size_t bit(std::size_t n, std::size_t q) { return std::size_t{1} << (n - q); }

}  // namespace

// ---------------------------------------------------------------- matrices

Matrix identity_matrix(std::size_t dim) {
    Matrix m(dim, Vec(dim));
    for (std::size_t k = 0; k < dim; ++k) m[k][k] = QF(1);
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    std::size_t r = a.size(), c = b.empty() ? 0 : b[0].size(), k = b.size();
    Matrix out(r, Vec(c));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (std::size_t j = 0; j < c; ++j)
                if (!b[l][j].is_zero()) out[i][j] = out[i][j] + a[i][l] * b[l][j];
        }
    return out;
}

Matrix adjoint(const Matrix& a) {
    std::size_t r = a.size(), c = a.empty() ? 0 : a[0].size();
    Matrix out(c, Vec(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j][i] = a[i][j].conj();
    return out;
}

Vec matvec(const Matrix& a, const Vec& v) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].is_zero() && !v[j].is_zero()) out[i] = out[i] + a[i][j] * v[j];
    return out;
}

Matrix gate_matrix(Gate g, std::size_t i, std::size_t j, std::size_t n) {
    std::size_t dim = std::size_t{1} << n;
    Matrix m(dim, Vec(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        Vec e(dim);
        e[col] = QF(1);
        StateVector s(n, e);
        s.apply(g, i, j);
        for (std::size_t row = 0; row < dim; ++row) m[row][col] = s.amps()[row];
    }
    return m;
}

Matrix pauli_matrix(const PauliSum& p, const Assignment& m) {
    std::size_t n = p.n(), dim = std::size_t{1} << n;
    Matrix out(dim, Vec(dim));
    for (const auto& t : p.terms()) {
        PauliTerm u = t;
        bool neg = u.sign.eval(m);
        u.sign = cexpr::PhasePoly::constant(neg);
        for (std::size_t col = 0; col < dim; ++col) {
            Vec e(dim);
            e[col] = QF(1);
            StateVector s(n, e);
            s.apply_pauli(u);
            for (std::size_t row = 0; row < dim; ++row)
                if (!s.amps()[row].is_zero()) out[row][col] = out[row][col] + s.amps()[row];
        }
    }
    return out;
}

// ---------------------------------------------------------------- subspaces

namespace {

std::size_t pivot_of(const Vec& v) {
    for (std::size_t k = 0; k < v.size(); ++k)
        if (!v[k].is_zero()) return k;
    return v.size();
}

std::vector<Vec> rref(std::vector<Vec> rows, std::size_t dim) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < dim && rank < rows.size(); ++col) {
        std::size_t p = rank;
        while (p < rows.size() && rows[p][col].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        QF inv = rows[rank][col].inv();
        for (auto& x : rows[rank]) x = x * inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col].is_zero()) continue;
            QF f = rows[r][col];
            for (std::size_t k = col; k < dim; ++k)
                if (!rows[rank][k].is_zero()) rows[r][k] = rows[r][k] - f * rows[rank][k];
        }
        ++rank;
    }
    rows.resize(rank);
    return rows;
}

std::vector<Vec> nullspace(const std::vector<Vec>& rows_in, std::size_t dim) {
    auto rows = rref(rows_in, dim);
    std::vector<std::size_t> piv;
    std::vector<bool> is_piv(dim, false);
    for (const auto& r : rows) {
        piv.push_back(pivot_of(r));
        is_piv[piv.back()] = true;
    }
    std::vector<Vec> out;
    for (std::size_t f = 0; f < dim; ++f) {
        if (is_piv[f]) continue;
        Vec v(dim);
        v[f] = QF(1);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!rows[r][f].is_zero()) v[piv[r]] = -rows[r][f];
        out.push_back(v);
    }
    return out;
}

}  // namespace

bool Subspace::contains(const Vec& v0) const {
    Vec v = v0;
    for (const auto& b : basis) {
        std::size_t p = pivot_of(b);
        if (v[p].is_zero()) continue;
        QF f = v[p];
        for (std::size_t k = p; k < dim; ++k)
            if (!b[k].is_zero()) v[k] = v[k] - f * b[k];
    }
    return pivot_of(v) == dim;
}

bool Subspace::operator==(const Subspace& o) const { return dim == o.dim && basis == o.basis; }

Subspace span(std::size_t dim, const std::vector<Vec>& vs) { return {dim, rref(vs, dim)}; }
Subspace full_space(std::size_t dim) { return {dim, identity_matrix(dim)}; }
Subspace zero_space(std::size_t dim) { return {dim, {}}; }

Subspace orthocomplement(const Subspace& s) {
    std::vector<Vec> conj_rows;
    for (const auto& b : s.basis) {
        Vec c(b.size());
        for (std::size_t k = 0; k < b.size(); ++k) c[k] = b[k].conj();
        conj_rows.push_back(c);
    }
    return span(s.dim, nullspace(conj_rows, s.dim));
}

Subspace join(const Subspace& a, const Subspace& b) {
    std::vector<Vec> vs = a.basis;
    vs.insert(vs.end(), b.basis.begin(), b.basis.end());
    return span(a.dim, vs);
}

Subspace meet(const Subspace& a, const Subspace& b) { return orthocomplement(join(orthocomplement(a), orthocomplement(b))); }

Subspace sasaki(const Subspace& a, const Subspace& b) { return join(orthocomplement(a), meet(a, b)); }

bool included(const Subspace& a, const Subspace& b) {
    return std::all_of(a.basis.begin(), a.basis.end(), [&](const Vec& v) { return b.contains(v); });
}

Subspace eigenspace(const Matrix& m) {
    Matrix d = m;
    for (std::size_t k = 0; k < d.size(); ++k) d[k][k] = d[k][k] - QF(1);
    return span(m.size(), nullspace(d, m.size()));
}

Subspace assertion_subspace(const Assertion& a, const Assignment& m, std::size_t n) {
    std::size_t dim = std::size_t{1} << n;
    using K = Assertion::Kind;
    switch (a.kind()) {
        case K::Classical: return cexpr::holds(a.bexp(), m) ? full_space(dim) : zero_space(dim);
        case K::Pauli: {
            PauliSum p = a.pauli();
            if (p.n() < n) {
                std::vector<PauliTerm> ts;
                for (auto t : p.terms()) {
                    PauliTerm u(n);
                    for (std::size_t q = 1; q <= t.n(); ++q)
                        if (t.letter(q) != 'I') u.set_letter(q, t.letter(q));
                    u.sign = t.sign;
                    u.iexp = t.iexp;
                    u.scalar = t.scalar;
                    ts.push_back(u);
                }
                p = PauliSum::from_terms(n, ts);
            }
            return eigenspace(pauli_matrix(p, m));
        }
        case K::Not: return orthocomplement(assertion_subspace(a.args()[0], m, n));
        case K::And: {
            Subspace s = full_space(dim);
            for (const auto& x : a.args()) s = meet(s, assertion_subspace(x, m, n));
            return s;
        }
        case K::Or: {
            Subspace s = zero_space(dim);
            for (const auto& x : a.args()) s = join(s, assertion_subspace(x, m, n));
            return s;
        }
        case K::Imp: return sasaki(assertion_subspace(a.args()[0], m, n), assertion_subspace(a.args()[1], m, n));
        case K::BigVee: {
            const auto& bound = a.bound();
            if (bound.size() > 12) throw std::invalid_argument("too many bound variables for the oracle");
            Subspace s = zero_space(dim);
            for (std::size_t mask = 0; mask < (std::size_t{1} << bound.size()); ++mask) {
                Assignment mm = m;
                for (std::size_t k = 0; k < bound.size(); ++k) mm[bound[k]] = (mask >> k) & 1u;
                s = join(s, assertion_subspace(a.args()[0], mm, n));
            }
            return s;
        }
    }
    return zero_space(dim);
}

bool entails(const Assertion& a, const Assertion& b, const Assignment& m, std::size_t n) {
    return included(assertion_subspace(a, m, n), assertion_subspace(b, m, n));
}

// ---------------------------------------------------------------- state vector

StateVector::StateVector(std::size_t n) : n_(n), a_(std::size_t{1} << n) { a_[0] = QF(1); }

StateVector::StateVector(std::size_t n, Vec amps) : n_(n), a_(std::move(amps)) {
    if (a_.size() != (std::size_t{1} << n)) throw std::invalid_argument("amplitude vector has the wrong size");
}

bool StateVector::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const QF& x) { return x.is_zero(); });
}

void StateVector::apply(Gate g, std::size_t i, std::size_t j) {
    if (i < 1 || i > n_) throw std::out_of_range("qubit index " + std::to_string(i) + " out of range");
    std::size_t mi = bit(n_, i), dim = a_.size();
    static const QF I = QF::i(), mI = -QF::i(), r2 = QF::inv_sqrt2(), w = QF::omega();
    switch (g) {
        case Gate::X:
            for (std::size_t k = 0; k < dim; ++k)
                if (!(k & mi)) std::swap(a_[k], a_[k | mi]);
            return;
        case Gate::Y:
            for (std::size_t k = 0; k < dim; ++k)
                if (!(k & mi)) {
                    QF a0 = a_[k], a1 = a_[k | mi];
                    a_[k] = mI * a1;
                    a_[k | mi] = I * a0;
                }
            return;
        case Gate::Z:
            for (std::size_t k = 0; k < dim; ++k)
                if (k & mi) a_[k] = -a_[k];
            return;
        case Gate::H:
            for (std::size_t k = 0; k < dim; ++k)
                if (!(k & mi)) {
                    QF a0 = a_[k], a1 = a_[k | mi];
                    a_[k] = r2 * (a0 + a1);
                    a_[k | mi] = r2 * (a0 - a1);
                }
            return;
        case Gate::S:
            for (std::size_t k = 0; k < dim; ++k)
                if (k & mi) a_[k] = I * a_[k];
            return;
        case Gate::T:
            for (std::size_t k = 0; k < dim; ++k)
                if (k & mi) a_[k] = w * a_[k];
            return;
        default: break;
    }
    if (j < 1 || j > n_ || j == i) throw std::out_of_range("bad second qubit for a two-qubit gate");
    std::size_t mj = bit(n_, j);
    switch (g) {
        case Gate::CNOT:
            for (std::size_t k = 0; k < dim; ++k)
                if ((k & mi) && !(k & mj)) std::swap(a_[k], a_[k | mj]);
            return;
        case Gate::CZ:
            for (std::size_t k = 0; k < dim; ++k)
                if ((k & mi) && (k & mj)) a_[k] = -a_[k];
            return;
        case Gate::ISWAP:
            // |01> -> -i|10>, |10> -> -i|01>, matching the conjugation table
            for (std::size_t k = 0; k < dim; ++k)
                if (!(k & mi) && !(k & mj)) {
                    QF a01 = a_[k | mj], a10 = a_[k | mi];
                    a_[k | mj] = mI * a10;
                    a_[k | mi] = mI * a01;
                }
            return;
        default: break;
    }
}

void StateVector::apply_pauli(const PauliTerm& p) {
    if (!p.sign.is_constant()) throw std::invalid_argument("symbolic sign in a simulated Pauli");
    for (std::size_t q = 1; q <= p.n() && q <= n_; ++q) {
        char l = p.letter(q);
        if (l == 'X') apply(Gate::X, q);
        else if (l == 'Y') apply(Gate::Y, q);
        else if (l == 'Z') apply(Gate::Z, q);
    }
    QF c = from_sring(p.scalar);
    if (p.sign.constant_bit()) c = -c;
    if (p.iexp % 4 == 1) c = c * QF::i();
    else if (p.iexp % 4 == 2) c = -c;
    else if (p.iexp % 4 == 3) c = -(c * QF::i());
    if (c != QF(1))
        for (auto& x : a_) x = c * x;
}

std::pair<StateVector, StateVector> StateVector::project(const PauliTerm& p) const {
    StateVector pv = *this;
    pv.apply_pauli(p);
    StateVector plus = *this, minus = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) {
        plus.a_[k] = half() * (a_[k] + pv.a_[k]);
        minus.a_[k] = half() * (a_[k] - pv.a_[k]);
    }
    return {plus, minus};
}

bool StateVector::proportional(const StateVector& o) const {
    bool za = is_zero(), zb = o.is_zero();
    if (za || zb) return za && zb;
    QF ab, aa, bb;
    for (std::size_t k = 0; k < a_.size(); ++k) {
        ab = ab + a_[k].conj() * o.a_[k];
        aa = aa + a_[k].conj() * a_[k];
        bb = bb + o.a_[k].conj() * o.a_[k];
    }
    return ab * ab.conj() == aa * bb;
}

// ---------------------------------------------------------------- tableau

Tableau::Tableau(std::size_t n) : n_(n), rows_(2 * n) {
    for (auto& r : rows_) {
        r.x.assign(n, 0);
        r.z.assign(n, 0);
    }
    for (std::size_t k = 0; k < n; ++k) {
        rows_[k].x[k] = 1;
        rows_[n + k].z[k] = 1;
    }
}

namespace {
int gexp(int x1, int z1, int x2, int z2) {
    if (!x1 && !z1) return 0;
    if (x1 && z1) return z2 - x2;
    if (x1) return z2 * (2 * x2 - 1);
    return x2 * (1 - 2 * z2);
}
}  // namespace

void Tableau::rowsum(Row& h, const Row& i) const {
    int e = 2 * h.r + 2 * i.r;
    for (std::size_t k = 0; k < n_; ++k) e += gexp(i.x[k], i.z[k], h.x[k], h.z[k]);
    e = ((e % 4) + 4) % 4;
    h.r = e == 2 ? 1 : 0;
    for (std::size_t k = 0; k < n_; ++k) {
        h.x[k] ^= i.x[k];
        h.z[k] ^= i.z[k];
    }
}

Tableau::Row Tableau::from_term(const PauliTerm& p) {
    Row r;
    r.x.assign(p.n(), 0);
    r.z.assign(p.n(), 0);
    for (std::size_t q = 1; q <= p.n(); ++q) {
        char l = p.letter(q);
        r.x[q - 1] = l == 'X' || l == 'Y';
        r.z[q - 1] = l == 'Z' || l == 'Y';
    }
    if (!p.sign.is_constant() || !p.hermitian() || !p.scalar.is_one())
        throw std::invalid_argument("tableau needs a plain Hermitian Pauli string");
    r.r = (p.sign.constant_bit() ? 1 : 0) ^ (p.iexp % 4 == 2 ? 1 : 0);
    return r;
}

bool Tableau::anti(const Row& a, const PauliTerm& p) const {
    int s = 0;
    for (std::size_t q = 1; q <= n_; ++q) {
        char l = p.letter(q);
        int px = l == 'X' || l == 'Y', pz = l == 'Z' || l == 'Y';
        s ^= (a.x[q - 1] & pz) ^ (a.z[q - 1] & px);
    }
    return s;
}

void Tableau::h(std::size_t a) {
    for (auto& r : rows_) {
        r.r ^= r.x[a] & r.z[a];
        std::swap(r.x[a], r.z[a]);
    }
}
void Tableau::s(std::size_t a) {
    for (auto& r : rows_) {
        r.r ^= r.x[a] & r.z[a];
        r.z[a] ^= r.x[a];
    }
}
void Tableau::cx(std::size_t a, std::size_t b) {
    for (auto& r : rows_) {
        r.r ^= r.x[a] & r.z[b] & (r.x[b] ^ r.z[a] ^ 1);
        r.x[b] ^= r.x[a];
        r.z[a] ^= r.z[b];
    }
}

void Tableau::apply(Gate g, std::size_t i, std::size_t j) {
    if (i < 1 || i > n_) throw std::out_of_range("qubit index " + std::to_string(i) + " out of range");
    std::size_t a = i - 1, b = j - 1;
    switch (g) {
        case Gate::X:
            for (auto& r : rows_) r.r ^= r.z[a];
            return;
        case Gate::Z:
            for (auto& r : rows_) r.r ^= r.x[a];
            return;
        case Gate::Y:
            for (auto& r : rows_) r.r ^= r.x[a] ^ r.z[a];
            return;
        case Gate::H: h(a); return;
        case Gate::S: s(a); return;
        case Gate::T: throw std::invalid_argument("T is not a Clifford gate");
        default: break;
    }
    if (j < 1 || j > n_ || j == i) throw std::out_of_range("bad second qubit for a two-qubit gate");
    switch (g) {
        case Gate::CNOT: cx(a, b); return;
        case Gate::CZ:
            h(b);
            cx(a, b);
            h(b);
            return;
        case Gate::ISWAP:
            // S^dagger on both, swap, then CZ
            for (int k = 0; k < 3; ++k) {
                s(a);
                s(b);
            }
            cx(a, b);
            cx(b, a);
            cx(a, b);
            h(b);
            cx(a, b);
            h(b);
            return;
        default: break;
    }
}

void Tableau::apply_pauli(const PauliTerm& p) {
    for (std::size_t q = 1; q <= p.n() && q <= n_; ++q) {
        char l = p.letter(q);
        if (l == 'X') apply(Gate::X, q);
        else if (l == 'Y') apply(Gate::Y, q);
        else if (l == 'Z') apply(Gate::Z, q);
    }
}

bool Tableau::deterministic(const PauliTerm& p, int* outcome) const {
    for (std::size_t k = n_; k < 2 * n_; ++k)
        if (anti(rows_[k], p)) return false;
    Row scratch;
    scratch.x.assign(n_, 0);
    scratch.z.assign(n_, 0);
    for (std::size_t k = 0; k < n_; ++k)
        if (anti(rows_[k], p)) rowsum(scratch, rows_[k + n_]);
    if (outcome) *outcome = scratch.r ^ from_term(p).r;
    return true;
}

std::vector<std::pair<int, Tableau>> Tableau::measure(const PauliTerm& p) const {
    int o = 0;
    if (deterministic(p, &o)) return {{o, *this}};
    std::size_t piv = n_;
    while (!anti(rows_[piv], p)) ++piv;
    Tableau base = *this;
    for (std::size_t k = 0; k < 2 * n_; ++k)
        if (k != piv && anti(base.rows_[k], p)) base.rowsum(base.rows_[k], base.rows_[piv]);
    base.rows_[piv - n_] = base.rows_[piv];
    std::vector<std::pair<int, Tableau>> out;
    for (int outcome = 0; outcome < 2; ++outcome) {
        Tableau t = base;
        Row r = from_term(p);
        r.r ^= static_cast<std::uint8_t>(outcome);
        t.rows_[piv] = r;
        out.push_back({outcome, t});
    }
    return out;
}

bool Tableau::stabilized_by(const PauliTerm& p) const {
    int o = 0;
    return deterministic(p, &o) && o == 0;
}

std::vector<PauliTerm> Tableau::stabilizers() const {
    std::vector<PauliTerm> out;
    for (std::size_t k = n_; k < 2 * n_; ++k) {
        PauliTerm t(n_);
        for (std::size_t q = 0; q < n_; ++q) {
            int x = rows_[k].x[q], z = rows_[k].z[q];
            if (x || z) t.set_letter(q + 1, x && z ? 'Y' : x ? 'X' : 'Z');
        }
        t.sign = cexpr::PhasePoly::constant(rows_[k].r);
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------- simulation

namespace {

std::vector<std::pair<int, StateVector>> measure_state(const StateVector& s, const PauliTerm& p) {
    auto [plus, minus] = s.project(p);
    std::vector<std::pair<int, StateVector>> out;
    if (!plus.is_zero()) out.push_back({0, plus});
    if (!minus.is_zero()) out.push_back({1, minus});
    return out;
}

std::vector<std::pair<int, Tableau>> measure_state(const Tableau& s, const PauliTerm& p) { return s.measure(p); }

template <class S>
struct Sim {
    const SimOptions& opts;
    std::size_t n;

    std::vector<Assignment> decode(const Stmt& s, const Assignment& mem) const {
        if (opts.decode) return opts.decode(s, mem);
        Assignment a;
        for (const auto& f : s.families)
            for (auto i = f.lo.value(); i <= f.hi.value(); ++i) a[qprog::family_var(f.name, static_cast<std::size_t>(i))] = 0;
        return {a};
    }

    std::vector<Branch<S>> run(const Stmt& s, std::vector<Branch<S>> bs) const {
        switch (s.kind) {
            case SK::Skip: return bs;
            case SK::Seq:
                for (const auto& c : s.body) bs = run(*c, std::move(bs));
                return bs;
            case SK::Unitary1:
            case SK::Unitary2:
                for (auto& b : bs) b.state.apply(s.gate, s.qubit1(), s.kind == SK::Unitary2 ? s.qubit2() : 0);
                return bs;
            case SK::CondError:
                for (auto& b : bs)
                    if (cexpr::eval_bexp(s.expr, b.mem)) b.state.apply(s.gate, s.qubit1());
                return bs;
            case SK::Assign:
                for (auto& b : bs) b.mem[s.var] = cexpr::eval_bexp(s.expr, b.mem);
                return bs;
            case SK::Init: {
                PauliTerm z(n);
                z.set_letter(s.qubit1(), 'Z');
                std::vector<Branch<S>> out;
                for (auto& b : bs)
                    for (auto& [o, st] : measure_state(b.state, z)) {
                        if (o) st.apply(Gate::X, s.qubit1());
                        out.push_back({b.mem, st});
                    }
                return out;
            }
            case SK::Measure: {
                PauliTerm p = s.target.to_term(n);
                std::vector<Branch<S>> out;
                for (auto& b : bs)
                    for (auto& [o, st] : measure_state(b.state, p)) {
                        Branch<S> nb{b.mem, st};
                        nb.mem[s.var] = o;
                        out.push_back(std::move(nb));
                    }
                return out;
            }
            case SK::Decode: {
                std::vector<Branch<S>> out;
                for (auto& b : bs)
                    for (const auto& a : decode(s, b.mem)) {
                        Branch<S> nb = b;
                        for (const auto& [k, v] : a) nb.mem[k] = v;
                        out.push_back(std::move(nb));
                    }
                return out;
            }
            case SK::If: {
                std::vector<Branch<S>> t, e;
                for (auto& b : bs) (cexpr::eval_bexp(s.expr, b.mem) ? t : e).push_back(std::move(b));
                t = run(*s.body[0], std::move(t));
                e = run(*s.body[1], std::move(e));
                t.insert(t.end(), e.begin(), e.end());
                return t;
            }
            case SK::While: {
                std::vector<Branch<S>> done;
                for (std::size_t it = 0; !bs.empty(); ++it) {
                    if (it > opts.max_loop) throw std::runtime_error("loop bound exceeded in simulation");
                    std::vector<Branch<S>> go;
                    for (auto& b : bs) (cexpr::eval_bexp(s.expr, b.mem) ? go : done).push_back(std::move(b));
                    bs = run(*s.body[0], std::move(go));
                }
                return done;
            }
            case SK::For: return run(*qprog::desugar(std::make_shared<Stmt>(s)), std::move(bs));
        }
        return bs;
    }
};

template <class S>
std::vector<Branch<S>> simulate_impl(const StmtP& prog, std::vector<Branch<S>> init, const SimOptions& opts) {
    if (init.empty()) return init;
    StmtP d = qprog::desugar(prog);
    std::size_t n = init.front().state.n();
    if (qprog::program_qubits(*d) > n) throw std::out_of_range("program addresses qubits beyond the state");
    return Sim<S>{opts, n}.run(*d, std::move(init));
}

}  // namespace

std::vector<Branch<StateVector>> simulate(const StmtP& prog, std::vector<Branch<StateVector>> init, const SimOptions& opts) {
    return simulate_impl(prog, std::move(init), opts);
}

std::vector<Branch<Tableau>> simulate(const StmtP& prog, std::vector<Branch<Tableau>> init, const SimOptions& opts) {
    return simulate_impl(prog, std::move(init), opts);
}

// ---------------------------------------------------------------- decoding

namespace {

bool anticommute_letters(char a, char b) { return a != 'I' && b != 'I' && a != b; }

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             const std::function<void(const std::vector<std::size_t>&)>& f) {
    if (cur.size() == k) {
        f(cur);
        return;
    }
    for (std::size_t i = start; i < n; ++i) {
        cur.push_back(i);
        subsets(n, k, i + 1, cur, f);
        cur.pop_back();
    }
}

}  // namespace

std::vector<std::vector<std::size_t>> exhaustive_decoder(const std::vector<PauliTerm>& checks,
                                                         const std::vector<bool>& syndrome, char letter) {
    if (checks.size() != syndrome.size()) throw std::invalid_argument("syndrome length differs from the check count");
    std::size_t n = checks.empty() ? 0 : checks[0].n();
    for (std::size_t w = 0; w <= n; ++w) {
        std::vector<std::vector<std::size_t>> found;
        std::vector<std::size_t> cur;
        subsets(n, w, 0, cur, [&](const std::vector<std::size_t>& s) {
            for (std::size_t c = 0; c < checks.size(); ++c) {
                bool par = false;
                for (auto q : s) par ^= anticommute_letters(checks[c].letter(q + 1), letter);
                if (par != syndrome[c]) return;
            }
            std::vector<std::size_t> qs;
            for (auto q : s) qs.push_back(q + 1);
            found.push_back(qs);
        });
        if (!found.empty()) return found;
    }
    return {};
}

std::vector<Assignment> conforming_outputs(const qprog::DecoderCall& call, const Assignment& mem, std::size_t w) {
    std::vector<std::string> fams;
    for (const auto& c : call.corrections)
        if (std::find(fams.begin(), fams.end(), c.family) == fams.end()) fams.push_back(c.family);
    // candidate column sets per family
    std::vector<std::vector<std::vector<std::size_t>>> per;
    for (const auto& f : fams) {
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < call.corrections.size(); ++c)
            if (call.corrections[c].family == f) cols.push_back(c);
        std::vector<std::vector<std::size_t>> opts;
        for (std::size_t k = 0; k <= std::min(w, cols.size()); ++k) {
            std::vector<std::size_t> cur;
            subsets(cols.size(), k, 0, cur, [&](const std::vector<std::size_t>& s) {
                std::vector<std::size_t> pick;
                for (auto i : s) pick.push_back(cols[i]);
                opts.push_back(pick);
            });
        }
        per.push_back(std::move(opts));
    }
    std::vector<Assignment> out;
    std::vector<std::size_t> idx(per.size(), 0);
    while (true) {
        std::vector<bool> val(call.corrections.size(), false);
        for (std::size_t f = 0; f < per.size(); ++f)
            for (auto c : per[f][idx[f]]) val[c] = true;
        bool ok = true;
        for (std::size_t j = 0; j < call.syndromes.size() && ok; ++j) {
            bool par = false;
            for (std::size_t c = 0; c < val.size(); ++c) par ^= val[c] && call.rows[j][c];
            auto it = mem.find(call.syndromes[j]);
            bool s = it != mem.end() && it->second != 0;
            ok = par == s;
        }
        if (ok) {
            Assignment a;
            for (std::size_t c = 0; c < val.size(); ++c) a[call.corrections[c].var] = val[c];
            out.push_back(a);
        }
        std::size_t f = 0;
        while (f < per.size() && ++idx[f] == per[f].size()) idx[f++] = 0;
        if (f == per.size()) break;
    }
    return out;
}

// ---------------------------------------------------------------- verdicts

namespace {

struct Prepared {
    std::vector<PauliTerm> rows;  // generators then signed logicals
};

Prepared target_rows(const codes::Scenario& sc, char basis, const Assignment& params) {
    Prepared p;
    for (const auto& g : sc.code.generators) p.rows.push_back(g);
    const auto& ls = basis == 'X' ? sc.code.logical_x : sc.code.logical_z;
    for (std::size_t j = 0; j < ls.size(); ++j) {
        PauliTerm t = ls[j];
        std::string name = ls.size() == sc.params.size() ? sc.params[j] : "b_" + std::to_string(j + 1);
        auto it = params.find(name);
        if (it != params.end() && it->second) t.sign = t.sign.flipped();
        p.rows.push_back(t);
    }
    return p;
}

Tableau prepare_tableau(std::size_t n, const std::vector<PauliTerm>& rows) {
    Tableau t(n);
    for (const auto& r : rows) {
        auto outs = t.measure(r);
        t = outs.size() == 2 ? outs[0].second : outs[0].second;
    }
    // flip rows that came out with the wrong sign
    std::vector<BitVec> eqs;
    std::vector<bool> rhs;
    for (const auto& r : rows) {
        BitVec v(2 * n);
        for (std::size_t q = 1; q <= n; ++q) {
            char l = r.letter(q);
            if (l == 'Z' || l == 'Y') v.set(q - 1);      // pairs with the x part of the fix
            if (l == 'X' || l == 'Y') v.set(n + q - 1);  // pairs with the z part
        }
        eqs.push_back(v);
        rhs.push_back(!t.stabilized_by(r));
    }
    if (std::any_of(rhs.begin(), rhs.end(), [](bool b) { return b; })) {
        auto f = gf2::solve_system(eqs, rhs, 2 * n);
        if (!f) throw std::runtime_error("cannot prepare the requested stabilizer state");
        PauliTerm fix(n);
        for (std::size_t q = 1; q <= n; ++q) {
            bool x = f->get(q - 1), z = f->get(n + q - 1);
            if (x || z) fix.set_letter(q, x && z ? 'Y' : x ? 'X' : 'Z');
        }
        t.apply_pauli(fix);
    }
    for (const auto& r : rows)
        if (!t.stabilized_by(r)) throw std::runtime_error("state preparation failed for " + r.str());
    return t;
}

StateVector prepare_vector(std::size_t n, const std::vector<PauliTerm>& rows) {
    std::size_t dim = std::size_t{1} << n;
    for (std::size_t k = 0; k < dim; ++k) {
        Vec e(dim);
        e[k] = QF(1);
        StateVector v(n, e);
        for (const auto& r : rows) v = v.project(r).first;
        if (!v.is_zero()) return v;
    }
    throw std::runtime_error("empty code space");
}

bool clifford_only(const Stmt& s) {
    if ((s.kind == SK::Unitary1 || s.kind == SK::Unitary2 || s.kind == SK::CondError) && !pauli::is_clifford(s.gate))
        return false;
    return std::all_of(s.body.begin(), s.body.end(), [](const StmtP& c) { return clifford_only(*c); });
}

std::size_t weight_of(const Assignment& pattern) {
    std::size_t w = 0;
    for (const auto& [k, v] : pattern) w += v != 0;
    return w;
}

SimOptions decoder_options(const codes::Scenario& sc, std::size_t w) {
    SimOptions o;
    o.decode = [&sc, w](const Stmt& s, const Assignment& mem) {
        for (const auto& call : sc.decoder.calls)
            if (call.syndromes == s.dec_args) return conforming_outputs(call, mem, w);
        throw std::runtime_error("decode statement without a decoder contract");
    };
    return o;
}

bool same_state(const Tableau& a, const Tableau& ref) {
    for (const auto& p : ref.stabilizers())
        if (!a.stabilized_by(p)) return false;
    return true;
}
bool same_state(const StateVector& a, const StateVector& ref) { return a.proportional(ref); }

// Runs one pattern; returns the memory of a failing branch if any.
template <class S>
std::optional<Assignment> run_pattern(const codes::Scenario& sc, const S& init, const S& ref, const Assignment& pattern) {
    SimOptions o = decoder_options(sc, weight_of(pattern));
    auto out = simulate(sc.program, {Branch<S>{pattern, init}}, o);
    for (const auto& b : out)
        if (!same_state(b.state, ref)) return b.mem;
    return std::nullopt;
}

template <class S>
S ideal_state(const codes::Scenario& sc, const S& init) {
    Assignment zero;
    for (const auto& v : sc.error_vars()) zero[v] = 0;
    auto out = simulate(sc.program, {Branch<S>{zero, init}}, decoder_options(sc, 0));
    if (out.empty()) throw std::runtime_error("error-free run has no branches");
    for (const auto& b : out)
        if (!same_state(b.state, out.front().state))
            throw std::runtime_error("error-free run does not end in a unique state");
    return out.front().state;
}

std::vector<Assignment> patterns_for(const codes::Scenario& sc, std::size_t t, const BExp& user) {
    auto evs = sc.error_vars();
    std::vector<Assignment> out;
    for (std::size_t w = 0; w <= std::min(t, evs.size()); ++w) {
        std::vector<std::size_t> cur;
        subsets(evs.size(), w, 0, cur, [&](const std::vector<std::size_t>& s) {
            Assignment a;
            for (const auto& v : evs) a[v] = 0;
            for (auto i : s) a[evs[i]] = 1;
            if (!cexpr::partial_eval(user, a).is_false()) out.push_back(a);
        });
    }
    return out;
}

std::vector<Assignment> param_values(const codes::Scenario& sc) {
    std::size_t k = sc.code.logical_x.size();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < k; ++j) names.push_back(k == sc.params.size() ? sc.params[j] : "b_" + std::to_string(j + 1));
    std::vector<Assignment> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        Assignment a;
        for (std::size_t j = 0; j < k; ++j) a[names[j]] = (mask >> j) & 1u;
        out.push_back(a);
    }
    return out;
}

template <class S>
OracleVerdict verify_with(const codes::Scenario& sc, const OracleOptions& opts, const std::vector<Assignment>& patterns,
                          const std::function<S(const std::vector<PauliTerm>&)>& prep) {
    OracleVerdict v;
    v.patterns = patterns.size();
    for (char basis : opts.bases)
        for (const auto& params : param_values(sc)) {
            S init = prep(target_rows(sc, basis, params).rows);
            S ref = ideal_state(sc, init);
            std::atomic<std::size_t> next{0};
            std::atomic<bool> failed{false};
            std::mutex mu;
            auto worker = [&]() {
                while (!failed.load()) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= patterns.size()) return;
                    auto bad = run_pattern(sc, init, ref, patterns[i]);
                    if (bad) {
                        std::lock_guard<std::mutex> lk(mu);
                        if (failed.exchange(true)) return;
                        v.verified = false;
                        v.basis = basis;
                        v.witness = *bad;
                        for (const auto& [k, val] : params) v.witness[k] = val;
                        std::ostringstream msg;
                        msg << "logical failure in basis " << basis << " under";
                        for (const auto& [k, val] : patterns[i])
                            if (val) msg << " " << k;
                        v.message = msg.str();
                    }
                }
            };
            std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
            if (jobs == 1) {
                worker();
            } else {
                std::vector<std::thread> ts;
                for (std::size_t k = 0; k < jobs; ++k) ts.emplace_back(worker);
                for (auto& t : ts) t.join();
            }
            if (!v.verified) return v;
        }
    v.message = "all " + std::to_string(patterns.size()) + " patterns corrected";
    return v;
}

}  // namespace

OracleVerdict brute_force_verify(const codes::Scenario& sc, const OracleOptions& opts) {
    auto patterns = patterns_for(sc, opts.max_weight, opts.user);
    std::size_t n = sc.n;
    if (clifford_only(*sc.program)) {
        auto v = verify_with<Tableau>(sc, opts, patterns, [n](const std::vector<PauliTerm>& r) { return prepare_tableau(n, r); });
        v.path = "tableau";
        return v;
    }
    if (n > opts.cap) throw std::runtime_error("state-vector path limited to " + std::to_string(opts.cap) + " qubits");
    auto v = verify_with<StateVector>(sc, opts, patterns, [n](const std::vector<PauliTerm>& r) { return prepare_vector(n, r); });
    v.path = "statevector";
    return v;
}

ReplayResult replay(const codes::Scenario& sc, const Assignment& model, char basis) {
    ReplayResult r;
    Assignment pattern;
    for (const auto& v : sc.error_vars()) {
        auto it = model.find(v);
        pattern[v] = it != model.end() && it->second ? 1 : 0;
    }
    Assignment params;
    auto names = param_values(sc).front();
    for (const auto& p : names) {
        auto it = model.find(p.first);
        params[p.first] = it != model.end() && it->second ? 1 : 0;
    }
    std::optional<Assignment> bad;
    auto rows = target_rows(sc, basis, params).rows;
    if (clifford_only(*sc.program)) {
        Tableau init = prepare_tableau(sc.n, rows);
        bad = run_pattern(sc, init, ideal_state(sc, init), pattern);
    } else {
        StateVector init = prepare_vector(sc.n, rows);
        bad = run_pattern(sc, init, ideal_state(sc, init), pattern);
    }
    std::ostringstream msg;
    msg << "pattern";
    for (const auto& [k, v] : pattern)
        if (v) msg << " " << k;
    if (weight_of(pattern) == 0) msg << " (none)";
    r.failure = bad.has_value();
    msg << (r.failure ? ": logical failure reproduced" : ": no logical failure");
    r.message = msg.str();
    return r;
}

ReplayResult replay_detection(const StabilizerCode& code, const Assignment& model) {
    ReplayResult r;
    PauliTerm e(code.n);
    std::size_t w = 0;
    for (std::size_t q = 1; q <= code.n; ++q) {
        auto get = [&](const std::string& k) {
            auto it = model.find(k);
            return it != model.end() && it->second != 0;
        };
        bool x = get("ex_" + std::to_string(q)), z = get("ez_" + std::to_string(q));
        if (x || z) {
            e.set_letter(q, x && z ? 'Y' : x ? 'X' : 'Z');
            ++w;
        }
    }
    auto anti = [&](const PauliTerm& p) {
        bool s = false;
        for (std::size_t q = 1; q <= code.n; ++q) s ^= anticommute_letters(p.letter(q), e.letter(q));
        return s;
    };
    bool silent = std::none_of(code.generators.begin(), code.generators.end(), anti);
    bool logical = std::any_of(code.logical_x.begin(), code.logical_x.end(), anti) ||
                   std::any_of(code.logical_z.begin(), code.logical_z.end(), anti);
    r.failure = w > 0 && silent && logical;
    r.message = "weight " + std::to_string(w) + " operator " + e.word() + (silent ? ", zero syndrome" : ", nonzero syndrome") +
                (logical ? ", flips a logical" : ", no logical flip");
    return r;
}

}  // namespace qecv::oracle
