#include "qecv/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qecv::pauli {

// ---------------------------------------------------------------- SRing

SRing::SRing(std::int64_t x, std::int64_t y, unsigned t) : x_(x), y_(y), t_(t) {
    if (x_ == 0 && y_ == 0) {
        t_ = 0;
        return;
    }
    while (t_ > 0 && x_ % 2 == 0 && y_ % 2 == 0) {
        x_ /= 2;
        y_ /= 2;
        --t_;
    }
}

int SRing::sign() const {
    if (x_ >= 0 && y_ >= 0) return (x_ == 0 && y_ == 0) ? 0 : 1;
    if (x_ <= 0 && y_ <= 0) return -1;
    __int128 xx = static_cast<__int128>(x_) * x_;
    __int128 yy = 2 * static_cast<__int128>(y_) * y_;
    if (x_ > 0) return xx > yy ? 1 : -1;  // x > 0, y < 0
    return yy > xx ? 1 : -1;              // x < 0, y > 0
}

double SRing::to_double() const { return (static_cast<double>(x_) + y_ * std::sqrt(2.0)) / std::ldexp(1.0, static_cast<int>(t_)); }

SRing operator+(const SRing& a, const SRing& b) {
    unsigned t = std::max(a.t_, b.t_);
    std::int64_t ax = a.x_ << (t - a.t_), ay = a.y_ << (t - a.t_);
    std::int64_t bx = b.x_ << (t - b.t_), by = b.y_ << (t - b.t_);
    return {ax + bx, ay + by, t};
}

SRing operator*(const SRing& a, const SRing& b) {
    return {a.x_ * b.x_ + 2 * a.y_ * b.y_, a.x_ * b.y_ + a.y_ * b.x_, a.t_ + b.t_};
}

std::string SRing::str() const {
    std::string num;
    if (y_ == 0) {
        num = std::to_string(x_);
    } else if (x_ == 0) {
        if (y_ == 1) num = "sqrt2";
        else if (y_ == -1) num = "-sqrt2";
        else num = std::to_string(y_) + "*sqrt2";
    } else {
        std::int64_t ay = y_ < 0 ? -y_ : y_;
        num = "(" + std::to_string(x_) + (y_ < 0 ? "-" : "+") + (ay == 1 ? std::string() : std::to_string(ay) + "*") +
              "sqrt2)";
    }
    if (t_ == 0) return num;
    return num + "/" + std::to_string(std::int64_t{1} << t_);
}

// ---------------------------------------------------------------- PauliTerm

char PauliTerm::letter(std::size_t q) const {
    bool x = xs.get(q - 1), z = zs.get(q - 1);
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

void PauliTerm::set_letter(std::size_t q, char l) {
    switch (l) {
        case 'I': xs.set(q - 1, false); zs.set(q - 1, false); break;
        case 'X': xs.set(q - 1, true); zs.set(q - 1, false); break;
        case 'Y': xs.set(q - 1, true); zs.set(q - 1, true); break;
        case 'Z': xs.set(q - 1, false); zs.set(q - 1, true); break;
        default: throw std::invalid_argument(std::string("bad Pauli letter '") + l + "'");
    }
}

std::vector<std::size_t> PauliTerm::support() const {
    std::vector<std::size_t> s;
    for (std::size_t q = 1; q <= n(); ++q)
        if (xs.get(q - 1) || zs.get(q - 1)) s.push_back(q);
    return s;
}

void PauliTerm::canonicalize() {
    iexp = ((iexp % 4) + 4) % 4;
    if (iexp >= 2) {
        iexp -= 2;
        sign = sign.flipped();
    }
    if (scalar.sign() < 0) {
        scalar = -scalar;
        sign = sign.flipped();
    }
}

std::string PauliTerm::word() const {
    std::string s;
    for (std::size_t q = 1; q <= n(); ++q) {
        char l = letter(q);
        if (l == 'I') continue;
        if (!s.empty()) s += ' ';
        s += l;
        s += std::to_string(q);
    }
    return s.empty() ? "I" : s;
}

std::string PauliTerm::dense() const {
    std::string s;
    for (std::size_t q = 1; q <= n(); ++q) s += letter(q);
    return s;
}

namespace {

std::string phase_prefix(const PhasePoly& p) {
    if (p.atoms().empty()) return p.constant_bit() ? "-" : "";
    return "(-1)^(" + p.str() + ") ";
}

// Term body without phase prefix: "i * sqrt2/2 * X1"
std::string term_body(const PauliTerm& t) {
    std::string s;
    if (t.iexp % 2) s += "i * ";
    if (!t.scalar.is_one()) s += t.scalar.str() + " * ";
    return s + t.word();
}

}  // namespace

std::string PauliTerm::str() const { return phase_prefix(sign) + term_body(*this); }

PauliTerm PauliTerm::from_letters(std::size_t n, const std::vector<std::pair<std::size_t, char>>& letters,
                                  bool negative) {
    PauliTerm t(n);
    for (auto [q, l] : letters) {
        if (q < 1 || q > n) throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
        if (t.letter(q) != 'I') {
            // repeated qubit: multiply in place
            PauliTerm u(n);
            u.set_letter(q, l);
            t = mul(t, u);
        } else {
            t.set_letter(q, l);
        }
    }
    if (negative) t.sign = t.sign.flipped();
    t.canonicalize();
    return t;
}

PauliTerm PauliTerm::parse_sparse(const std::string& s, std::size_t n) {
    std::istringstream in(s);
    std::string tok;
    bool neg = false;
    std::vector<std::pair<std::size_t, char>> letters;
    bool first = true;
    while (in >> tok) {
        if (first && (tok[0] == '-' || tok[0] == '+')) {
            neg = tok[0] == '-';
            tok = tok.substr(1);
            if (tok.empty()) {
                first = false;
                continue;
            }
        }
        first = false;
        if (tok == "I") continue;
        if (tok.size() < 2 || std::string("XYZ").find(tok[0]) == std::string::npos)
            throw std::invalid_argument("bad Pauli factor '" + tok + "'");
        std::size_t pos = tok[1] == '_' ? 2 : 1;
        std::size_t q = std::stoul(tok.substr(pos));
        letters.emplace_back(q, tok[0]);
    }
    return from_letters(n, letters, neg);
}

PauliTerm PauliTerm::parse_dense(const std::string& s) {
    std::size_t start = 0;
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        start = 1;
    }
    PauliTerm t(s.size() - start);
    for (std::size_t i = start; i < s.size(); ++i) t.set_letter(i - start + 1, s[i]);
    if (neg) t.sign = t.sign.flipped();
    return t;
}

PauliTerm mul(const PauliTerm& a, const PauliTerm& b) {
    if (a.n() != b.n()) throw std::invalid_argument("Pauli length mismatch");
    PauliTerm r(a.n());
    int g = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        int x1 = a.xs.get(i), z1 = a.zs.get(i), x2 = b.xs.get(i), z2 = b.zs.get(i);
        if (x1 && z1) g += z2 - x2;
        else if (x1) g += z2 * (2 * x2 - 1);
        else if (z1) g += x2 * (1 - 2 * z2);
    }
    r.xs = a.xs ^ b.xs;
    r.zs = a.zs ^ b.zs;
    r.iexp = a.iexp + b.iexp + g;
    r.sign = a.sign ^ b.sign;
    r.scalar = a.scalar * b.scalar;
    r.canonicalize();
    return r;
}

bool commutes(const PauliTerm& a, const PauliTerm& b) {
    return BitVec::dot(a.xs, b.zs) == BitVec::dot(a.zs, b.xs);
}

std::optional<PhasePoly> equal_up_to_phase(const PauliTerm& a, const PauliTerm& b) {
    if (!a.same_pauli(b) || a.iexp != b.iexp || a.scalar != b.scalar) return std::nullopt;
    return a.sign ^ b.sign;
}

BitVec symplectic(const PauliTerm& p) {
    std::size_t n = p.n();
    BitVec v(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (p.xs.get(i)) v.set(i);
        if (p.zs.get(i)) v.set(n + i);
    }
    return v;
}

// ---------------------------------------------------------------- PauliSum

PauliSum::PauliSum(const PauliTerm& t) : n_(t.n()) {
    PauliTerm c = t;
    c.canonicalize();
    if (!c.scalar.is_zero()) terms_.push_back(c);
}

namespace {

auto key(const PauliTerm& t) { return std::tie(t.xs, t.zs, t.iexp, t.sign.atoms()); }

}  // namespace

PauliSum PauliSum::from_terms(std::size_t n, std::vector<PauliTerm> terms) {
    for (auto& t : terms) t.canonicalize();
    std::stable_sort(terms.begin(), terms.end(), [](const PauliTerm& a, const PauliTerm& b) { return key(a) < key(b); });
    PauliSum s(n);
    for (std::size_t i = 0; i < terms.size();) {
        std::size_t j = i;
        SRing total;
        while (j < terms.size() && key(terms[j]) == key(terms[i])) {
            total = total + (terms[j].sign.constant_bit() ? -terms[j].scalar : terms[j].scalar);
            ++j;
        }
        if (!total.is_zero()) {
            PauliTerm t = terms[i];
            t.sign = PhasePoly::from(false, t.sign.atoms());
            t.scalar = total;
            t.canonicalize();
            s.terms_.push_back(t);
        }
        i = j;
    }
    return s;
}

PauliSum PauliSum::xor_sign(const PhasePoly& p) const {
    PauliSum r = *this;
    for (auto& t : r.terms_) t.sign ^= p;
    if (p.is_constant()) return r;
    return from_terms(n_, r.terms_);
}

PauliSum PauliSum::scaled(const SRing& s) const {
    std::vector<PauliTerm> ts = terms_;
    for (auto& t : ts) t.scalar = t.scalar * s;
    return from_terms(n_, ts);
}

PauliSum operator+(const PauliSum& a, const PauliSum& b) {
    std::vector<PauliTerm> ts = a.terms_;
    ts.insert(ts.end(), b.terms_.begin(), b.terms_.end());
    return PauliSum::from_terms(std::max(a.n_, b.n_), ts);
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    std::vector<PauliTerm> ts;
    ts.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) ts.push_back(mul(x, y));
    return PauliSum::from_terms(a.n_, ts);
}

PauliSum mul(const PauliSum& a, const PauliSum& b) { return a * b; }

bool commutes(const PauliSum& a, const PauliSum& b) {
    if (a.is_single() && b.is_single()) return commutes(a.single(), b.single());
    return a * b == b * a;
}

std::vector<std::size_t> PauliSum::support() const {
    BitVec m(n_);
    for (const auto& t : terms_) m |= t.xs | t.zs;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n_; ++i)
        if (m.get(i)) s.push_back(i + 1);
    return s;
}

unsigned PauliSum::letters_at(std::size_t q) const {
    unsigned m = 0;
    for (const auto& t : terms_) {
        char l = t.letter(q);
        if (l == 'X') m |= 1;
        else if (l == 'Y') m |= 2;
        else if (l == 'Z') m |= 4;
    }
    return m;
}

std::string PauliSum::str() const {
    if (terms_.empty()) return "[]";
    if (terms_.size() == 1 && terms_[0].scalar.is_one() && terms_[0].iexp == 0) return terms_[0].str();
    std::string s = "[";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (i == 0) {
            s += t.str();
        } else if (t.sign.atoms().empty()) {
            s += t.sign.constant_bit() ? " - " : " + ";
            s += term_body(t);
        } else {
            s += " + " + t.str();
        }
    }
    return s + "]";
}

// ---------------------------------------------------------------- gates

Gate gate_from_name(const std::string& s) {
    if (s == "X") return Gate::X;
    if (s == "Y") return Gate::Y;
    if (s == "Z") return Gate::Z;
    if (s == "H") return Gate::H;
    if (s == "S") return Gate::S;
    if (s == "T") return Gate::T;
    if (s == "CNOT") return Gate::CNOT;
    if (s == "CZ") return Gate::CZ;
    if (s == "iSWAP" || s == "ISWAP") return Gate::ISWAP;
    throw std::invalid_argument("unknown gate '" + s + "'");
}

const char* gate_name(Gate g) {
    switch (g) {
        case Gate::X: return "X";
        case Gate::Y: return "Y";
        case Gate::Z: return "Z";
        case Gate::H: return "H";
        case Gate::S: return "S";
        case Gate::T: return "T";
        case Gate::CNOT: return "CNOT";
        case Gate::CZ: return "CZ";
        case Gate::ISWAP: return "iSWAP";
    }
    return "?";
}

bool is_two_qubit(Gate g) { return g == Gate::CNOT || g == Gate::CZ || g == Gate::ISWAP; }
bool is_pauli_gate(Gate g) { return g == Gate::X || g == Gate::Y || g == Gate::Z; }
bool is_clifford(Gate g) { return g != Gate::T; }

namespace {

struct Img {
    bool neg;
    char li, lj;  // letters on the first and second gate qubit
    SRing scalar = SRing::one();
};

// Images of a single letter under U^dagger (.) U, as a list of terms.
std::vector<Img> image1(Gate g, char l) {
    switch (g) {
        case Gate::X:
            return {{l != 'X', l, 'I'}};
        case Gate::Y:
            return {{l != 'Y', l, 'I'}};
        case Gate::Z:
            return {{l != 'Z', l, 'I'}};
        case Gate::H:
            if (l == 'X') return {{false, 'Z', 'I'}};
            if (l == 'Y') return {{true, 'Y', 'I'}};
            return {{false, 'X', 'I'}};
        case Gate::S:
            if (l == 'X') return {{true, 'Y', 'I'}};
            if (l == 'Y') return {{false, 'X', 'I'}};
            return {{false, 'Z', 'I'}};
        case Gate::T:
            if (l == 'X') return {{false, 'X', 'I', SRing::inv_sqrt2()}, {true, 'Y', 'I', SRing::inv_sqrt2()}};
            if (l == 'Y') return {{false, 'X', 'I', SRing::inv_sqrt2()}, {false, 'Y', 'I', SRing::inv_sqrt2()}};
            return {{false, 'Z', 'I'}};
        default: break;
    }
    throw std::logic_error("not a single-qubit gate");
}

// Image of letter l sitting on gate qubit `pos` (0 = first, 1 = second).
Img image2(Gate g, int pos, char l) {
    if (g == Gate::CNOT) {
        if (pos == 0) {
            if (l == 'X') return {false, 'X', 'X'};
            if (l == 'Y') return {false, 'Y', 'X'};
            return {false, 'Z', 'I'};
        }
        if (l == 'X') return {false, 'I', 'X'};
        if (l == 'Y') return {false, 'Z', 'Y'};
        return {false, 'Z', 'Z'};
    }
    if (g == Gate::CZ) {
        if (pos == 0) {
            if (l == 'X') return {false, 'X', 'Z'};
            if (l == 'Y') return {false, 'Y', 'Z'};
            return {false, 'Z', 'I'};
        }
        if (l == 'X') return {false, 'Z', 'X'};
        if (l == 'Y') return {false, 'Z', 'Y'};
        return {false, 'I', 'Z'};
    }
    // iSWAP, signs as in the substitution rule
    if (pos == 0) {
        if (l == 'X') return {false, 'Z', 'Y'};
        if (l == 'Y') return {true, 'Z', 'X'};
        return {false, 'I', 'Z'};
    }
    if (l == 'X') return {false, 'Y', 'Z'};
    if (l == 'Y') return {true, 'X', 'Z'};
    return {false, 'Z', 'I'};
}

PauliSum image_sum(std::size_t n, std::size_t i, std::size_t j, const std::vector<Img>& imgs) {
    std::vector<PauliTerm> ts;
    for (const auto& im : imgs) {
        PauliTerm t(n);
        if (im.li != 'I') t.set_letter(i, im.li);
        if (im.lj != 'I') t.set_letter(j, im.lj);
        t.scalar = im.scalar;
        if (im.neg) t.sign = PhasePoly::one();
        ts.push_back(t);
    }
    return PauliSum::from_terms(n, ts);
}

}  // namespace

PauliSum conjugate(Gate g, std::size_t i, std::size_t j, const PauliSum& p) {
    std::size_t n = p.n();
    bool two = is_two_qubit(g);
    if (i < 1 || i > n) throw std::invalid_argument("qubit index " + std::to_string(i) + " out of range");
    if (two) {
        if (j < 1 || j > n) throw std::invalid_argument("qubit index " + std::to_string(j) + " out of range");
        if (i == j) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    std::vector<PauliTerm> out;
    for (const auto& t : p.terms()) {
        char li = t.letter(i);
        char lj = two ? t.letter(j) : 'I';
        if (li == 'I' && lj == 'I') {
            out.push_back(t);
            continue;
        }
        PauliTerm rest = t;
        rest.set_letter(i, 'I');
        if (two) rest.set_letter(j, 'I');
        PauliSum acc(rest);
        if (!two) {
            acc = acc * image_sum(n, i, i, image1(g, li));
        } else {
            if (li != 'I') acc = acc * image_sum(n, i, j, {image2(g, 0, li)});
            if (lj != 'I') acc = acc * image_sum(n, i, j, {image2(g, 1, lj)});
        }
        for (const auto& u : acc.terms()) out.push_back(u);
    }
    return PauliSum::from_terms(n, out);
}

PauliSum conjugate_forward(Gate g, std::size_t i, std::size_t j, const PauliSum& p) {
    int reps = 1;
    if (g == Gate::S || g == Gate::ISWAP) reps = 3;
    if (g == Gate::T) reps = 7;
    PauliSum r = p;
    for (int k = 0; k < reps; ++k) r = conjugate(g, i, j, r);
    return r;
}

}  // namespace qecv::pauli
