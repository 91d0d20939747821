#include "qecv/cexpr.hpp"

#include <algorithm>
#include <optional>

namespace qecv::cexpr {

namespace {
bool starts(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
}  // namespace

VarKind kind_of(std::string_view n) {
    if (starts(n, "ep_")) return VarKind::Propagated;
    if (starts(n, "e_") || starts(n, "ex_") || starts(n, "ez_")) return VarKind::Error;
    if (starts(n, "s_")) return VarKind::Syndrome;
    if (starts(n, "f_")) return VarKind::Decoder;
    if (starts(n, "x_")) return VarKind::XCorr;
    if (starts(n, "z_")) return VarKind::ZCorr;
    if (n == "b" || starts(n, "b_")) return VarKind::Param;
    return VarKind::User;
}

const char* kind_name(VarKind k) {
    switch (k) {
        case VarKind::Error: return "error";
        case VarKind::Propagated: return "propagated";
        case VarKind::Syndrome: return "syndrome";
        case VarKind::XCorr: return "x-correction";
        case VarKind::ZCorr: return "z-correction";
        case VarKind::Decoder: return "decoder";
        case VarKind::Param: return "parameter";
        case VarKind::User: return "user";
    }
    return "user";
}

// ---------------------------------------------------------------- BExp

BExp::BExp() : BExp(tt()) {}

BExp BExp::make(Op op, std::vector<BExp> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return BExp(std::move(n));
}

BExp BExp::tt() {
    static const BExp t = make(Op::True, {});
    return t;
}

BExp BExp::ff() {
    static const BExp f = make(Op::False, {});
    return f;
}

BExp BExp::num(std::int64_t v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Int;
    n->value = v;
    return BExp(std::move(n));
}

BExp BExp::var(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->name = name;
    return BExp(std::move(n));
}

bool BExp::is_bool() const {
    switch (op()) {
        case Op::True: case Op::False: case Op::Not: case Op::And: case Op::Or:
        case Op::Imp: case Op::Eq: case Op::Le: case Op::Lt:
            return true;
        default:
            return false;
    }
}

bool BExp::operator==(const BExp& o) const {
    if (node_ == o.node_) return true;
    if (op() != o.op() || value() != o.value() || name() != o.name()) return false;
    if (args().size() != o.args().size()) return false;
    for (std::size_t i = 0; i < args().size(); ++i)
        if (args()[i] != o.args()[i]) return false;
    return true;
}

namespace {

using Op = BExp::Op;

void flatten_into(Op op, const BExp& e, std::vector<BExp>& out) {
    if (e.op() == op)
        for (const auto& a : e.args()) out.push_back(a);
    else
        out.push_back(e);
}

bool is_bitconst(const BExp& e, bool& v) {
    if (e.op() == Op::True) { v = true; return true; }
    if (e.op() == Op::False) { v = false; return true; }
    if (e.op() == Op::Int && (e.value() == 0 || e.value() == 1)) { v = e.value() == 1; return true; }
    return false;
}

}  // namespace

BExp mk_not(const BExp& a) {
    if (a.op() == Op::True) return BExp::ff();
    if (a.op() == Op::False) return BExp::tt();
    if (a.op() == Op::Not) return a.args()[0];
    return BExp::make(Op::Not, {a});
}

BExp mk_and(std::vector<BExp> xs) {
    std::vector<BExp> flat;
    for (auto& x : xs) {
        if (x.op() == Op::False) return BExp::ff();
        if (x.op() == Op::True) continue;
        flatten_into(Op::And, x, flat);
    }
    if (flat.empty()) return BExp::tt();
    if (flat.size() == 1) return flat[0];
    return BExp::make(Op::And, std::move(flat));
}

BExp mk_or(std::vector<BExp> xs) {
    std::vector<BExp> flat;
    for (auto& x : xs) {
        if (x.op() == Op::True) return BExp::tt();
        if (x.op() == Op::False) continue;
        flatten_into(Op::Or, x, flat);
    }
    if (flat.empty()) return BExp::ff();
    if (flat.size() == 1) return flat[0];
    return BExp::make(Op::Or, std::move(flat));
}

BExp mk_imp(const BExp& a, const BExp& b) {
    if (a.op() == Op::True) return b;
    if (a.op() == Op::False || b.op() == Op::True) return BExp::tt();
    return BExp::make(Op::Imp, {a, b});
}

BExp mk_xor(std::vector<BExp> xs) {
    std::vector<BExp> flat;
    bool c = false;
    for (auto& x : xs) {
        std::vector<BExp> tmp;
        flatten_into(Op::Xor, x, tmp);
        for (auto& t : tmp) {
            bool v;
            if (is_bitconst(t, v)) c ^= v;
            else flat.push_back(t);
        }
    }
    if (flat.empty()) return BExp::num(c ? 1 : 0);
    if (c) flat.push_back(BExp::num(1));
    if (flat.size() == 1) return flat[0];
    return BExp::make(Op::Xor, std::move(flat));
}

BExp mk_eq(const BExp& a, const BExp& b) {
    if (a.is_const() && b.is_const()) return BExp::lit(eval_bexp(a, {}) == eval_bexp(b, {}));
    return BExp::make(Op::Eq, {a, b});
}

BExp mk_le(const BExp& a, const BExp& b) {
    if (a.is_const() && b.is_const()) return BExp::lit(eval_bexp(a, {}) <= eval_bexp(b, {}));
    return BExp::make(Op::Le, {a, b});
}

BExp mk_lt(const BExp& a, const BExp& b) {
    if (a.is_const() && b.is_const()) return BExp::lit(eval_bexp(a, {}) < eval_bexp(b, {}));
    return BExp::make(Op::Lt, {a, b});
}

BExp mk_add(std::vector<BExp> xs) {
    std::vector<BExp> flat;
    std::int64_t c = 0;
    bool saw_const = false;
    for (auto& x : xs) {
        std::vector<BExp> tmp;
        flatten_into(Op::Add, x, tmp);
        for (auto& t : tmp) {
            if (t.op() == Op::Int) {
                c += t.value();
                saw_const = true;
            } else {
                flat.push_back(t);
            }
        }
    }
    if (flat.empty()) return BExp::num(c);
    if (saw_const && c != 0) flat.push_back(BExp::num(c));
    if (flat.size() == 1) return flat[0];
    return BExp::make(Op::Add, std::move(flat));
}

BExp mk_sub(const BExp& a, const BExp& b) {
    if (a.op() == Op::Int && b.op() == Op::Int && a.value() >= b.value()) return BExp::num(a.value() - b.value());
    if (b.op() == Op::Int && b.value() == 0) return a;
    return BExp::make(Op::Sub, {a, b});
}

BExp mk_mul(const BExp& a, const BExp& b) {
    if (a.op() == Op::Int && b.op() == Op::Int) return BExp::num(a.value() * b.value());
    return BExp::make(Op::Mul, {a, b});
}

BExp sum_of(const std::vector<std::string>& names) {
    std::vector<BExp> xs;
    for (const auto& n : names) xs.push_back(BExp::var(n));
    return mk_add(std::move(xs));
}

// ---------------------------------------------------------------- printing

namespace {

int prec(const BExp& e) {
    switch (e.op()) {
        case Op::Imp: return 1;
        case Op::Or: return 2;
        case Op::And: return 3;
        case Op::Not: return 4;
        case Op::Eq: case Op::Le: case Op::Lt: return 5;
        case Op::Xor: return 6;
        case Op::Add: case Op::Sub: return 7;
        case Op::Mul: return 8;
        default: return 9;
    }
}

void print(const BExp& e, int min_prec, std::string& out) {
    bool paren = prec(e) < min_prec;
    if (paren) out += '(';
    const auto& a = e.args();
    switch (e.op()) {
        case Op::True: out += "true"; break;
        case Op::False: out += "false"; break;
        case Op::Int: out += std::to_string(e.value()); break;
        case Op::Var: out += e.name(); break;
        case Op::Not: out += '~'; print(a[0], 4, out); break;
        case Op::Imp: print(a[0], 2, out); out += " => "; print(a[1], 1, out); break;
        case Op::Or:
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += " \\/ ";
                print(a[i], 3, out);
            }
            break;
        case Op::And:
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += " /\\ ";
                print(a[i], 4, out);
            }
            break;
        case Op::Eq: case Op::Le: case Op::Lt:
            print(a[0], 6, out);
            out += e.op() == Op::Eq ? " == " : e.op() == Op::Le ? " <= " : " < ";
            print(a[1], 6, out);
            break;
        case Op::Xor:
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += " ^ ";
                print(a[i], 7, out);
            }
            break;
        case Op::Add:
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += " + ";
                print(a[i], i ? 8 : 7, out);
            }
            break;
        case Op::Sub: print(a[0], 7, out); out += " - "; print(a[1], 8, out); break;
        case Op::Mul: print(a[0], 8, out); out += " * "; print(a[1], 9, out); break;
    }
    if (paren) out += ')';
}

}  // namespace

int bexp_prec(const BExp& e) { return prec(e); }

std::string BExp::str() const {
    std::string s;
    print(*this, 0, s);
    return s;
}

// ---------------------------------------------------------------- eval

std::int64_t eval_bexp(const BExp& e, const Assignment& m) {
    const auto& a = e.args();
    switch (e.op()) {
        case Op::True: return 1;
        case Op::False: return 0;
        case Op::Int: return e.value();
        case Op::Var: {
            auto it = m.find(e.name());
            if (it == m.end()) throw EvalError("unbound variable '" + e.name() + "'");
            return it->second;
        }
        case Op::Not: return eval_bexp(a[0], m) == 0;
        case Op::And:
            for (const auto& x : a)
                if (!eval_bexp(x, m)) return 0;
            return 1;
        case Op::Or:
            for (const auto& x : a)
                if (eval_bexp(x, m)) return 1;
            return 0;
        case Op::Imp: return !eval_bexp(a[0], m) || eval_bexp(a[1], m);
        case Op::Xor: {
            bool v = false;
            for (const auto& x : a) v ^= eval_bexp(x, m) != 0;
            return v;
        }
        case Op::Eq: return eval_bexp(a[0], m) == eval_bexp(a[1], m);
        case Op::Le: return eval_bexp(a[0], m) <= eval_bexp(a[1], m);
        case Op::Lt: return eval_bexp(a[0], m) < eval_bexp(a[1], m);
        case Op::Add: {
            std::int64_t s = 0;
            for (const auto& x : a) s += eval_bexp(x, m);
            return s;
        }
        case Op::Sub: return eval_bexp(a[0], m) - eval_bexp(a[1], m);
        case Op::Mul: return eval_bexp(a[0], m) * eval_bexp(a[1], m);
    }
    return 0;
}

namespace {

BExp rebuild(const BExp& e, std::vector<BExp> args) {
    switch (e.op()) {
        case Op::Not: return mk_not(args[0]);
        case Op::And: return mk_and(std::move(args));
        case Op::Or: return mk_or(std::move(args));
        case Op::Imp: return mk_imp(args[0], args[1]);
        case Op::Xor: return mk_xor(std::move(args));
        case Op::Eq: return mk_eq(args[0], args[1]);
        case Op::Le: return mk_le(args[0], args[1]);
        case Op::Lt: return mk_lt(args[0], args[1]);
        case Op::Add: return mk_add(std::move(args));
        case Op::Sub: return mk_sub(args[0], args[1]);
        case Op::Mul: return mk_mul(args[0], args[1]);
        default: return e;
    }
}

template <class F>
BExp map_vars(const BExp& e, const F& f) {
    if (e.op() == Op::Var) return f(e);
    if (e.args().empty()) return e;
    std::vector<BExp> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto& a : e.args()) {
        args.push_back(map_vars(a, f));
        if (args.back() != a) changed = true;
    }
    if (!changed) return e;
    return rebuild(e, std::move(args));
}

}  // namespace

BExp substitute(const BExp& e, const std::string& x, const BExp& r) {
    return map_vars(e, [&](const BExp& v) { return v.name() == x ? r : v; });
}

BExp substitute(const BExp& e, const std::map<std::string, BExp>& sub) {
    if (sub.empty()) return e;
    return map_vars(e, [&](const BExp& v) {
        auto it = sub.find(v.name());
        return it == sub.end() ? v : it->second;
    });
}

namespace {

// Value range of an integer term; variables are single bits.
std::optional<std::pair<std::int64_t, std::int64_t>> range_of(const BExp& e) {
    switch (e.op()) {
        case Op::Int: return std::pair{e.value(), e.value()};
        case Op::Var: return std::pair<std::int64_t, std::int64_t>{0, 1};
        case Op::Add: {
            std::pair<std::int64_t, std::int64_t> r{0, 0};
            for (const auto& a : e.args()) {
                auto x = range_of(a);
                if (!x) return std::nullopt;
                r.first += x->first;
                r.second += x->second;
            }
            return r;
        }
        case Op::Sub: {
            auto a = range_of(e.args()[0]), b = range_of(e.args()[1]);
            if (!a || !b) return std::nullopt;
            return std::pair{a->first - b->second, a->second - b->first};
        }
        default: return std::nullopt;
    }
}

// Decide a comparison from operand ranges when possible.
std::optional<bool> decide(Op op, const BExp& a, const BExp& b) {
    auto x = range_of(a), y = range_of(b);
    if (!x || !y) return std::nullopt;
    switch (op) {
        case Op::Le:
            if (x->second <= y->first) return true;
            if (x->first > y->second) return false;
            break;
        case Op::Lt:
            if (x->second < y->first) return true;
            if (x->first >= y->second) return false;
            break;
        case Op::Eq:
            if (x->second < y->first || y->second < x->first) return false;
            break;
        default: break;
    }
    return std::nullopt;
}

}  // namespace

BExp partial_eval(const BExp& e, const Assignment& m) {
    if (e.op() == Op::Var) {
        auto it = m.find(e.name());
        return it == m.end() ? e : BExp::num(it->second);
    }
    if (e.args().empty()) return e;
    std::vector<BExp> args;
    bool all_const = true;
    for (const auto& a : e.args()) {
        args.push_back(partial_eval(a, m));
        if (!args.back().is_const()) all_const = false;
    }
    if (all_const) {
        std::int64_t v = eval_bexp(rebuild(e, args), {});
        return e.is_bool() ? BExp::lit(v != 0) : BExp::num(v);
    }
    // Short-circuit connectives whose constant operands decide the value.
    if (e.op() == Op::And || e.op() == Op::Or) {
        std::vector<BExp> rest;
        for (auto& a : args) {
            if (a.op() == Op::Int) a = BExp::lit(a.value() != 0);
            rest.push_back(a);
        }
        return e.op() == Op::And ? mk_and(std::move(rest)) : mk_or(std::move(rest));
    }
    if (e.op() == Op::Le || e.op() == Op::Lt || e.op() == Op::Eq)
        if (auto d = decide(e.op(), args[0], args[1])) return BExp::lit(*d);
    if (e.op() == Op::Not && args[0].op() == Op::Int) return BExp::lit(args[0].value() == 0);
    if (e.op() == Op::Not && args[0].is_const()) return BExp::lit(args[0].is_false());
    if (e.op() == Op::Imp) {
        auto a = args[0], b = args[1];
        if (a.op() == Op::Int) a = BExp::lit(a.value() != 0);
        if (b.op() == Op::Int) b = BExp::lit(b.value() != 0);
        return mk_imp(a, b);
    }
    return rebuild(e, std::move(args));
}

void free_vars(const BExp& e, std::set<std::string>& out) {
    if (e.op() == Op::Var) {
        out.insert(e.name());
        return;
    }
    for (const auto& a : e.args()) free_vars(a, out);
}

std::set<std::string> free_vars(const BExp& e) {
    std::set<std::string> s;
    free_vars(e, s);
    return s;
}

// ---------------------------------------------------------------- PhasePoly

PhasePoly PhasePoly::from(bool c, std::vector<std::string> atoms) {
    std::sort(atoms.begin(), atoms.end());
    PhasePoly p;
    p.c_ = c;
    for (std::size_t i = 0; i < atoms.size();) {
        std::size_t j = i;
        while (j < atoms.size() && atoms[j] == atoms[i]) ++j;
        if ((j - i) & 1) p.atoms_.push_back(atoms[i]);
        i = j;
    }
    return p;
}

bool PhasePoly::contains(const std::string& a) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

PhasePoly PhasePoly::operator^(const PhasePoly& o) const {
    PhasePoly r;
    r.c_ = c_ != o.c_;
    r.atoms_.reserve(atoms_.size() + o.atoms_.size());
    std::set_symmetric_difference(atoms_.begin(), atoms_.end(), o.atoms_.begin(), o.atoms_.end(),
                                  std::back_inserter(r.atoms_));
    return r;
}

bool PhasePoly::eval(const Assignment& m) const {
    bool v = c_;
    for (const auto& a : atoms_) {
        auto it = m.find(a);
        if (it == m.end()) throw EvalError("unbound variable '" + a + "'");
        v ^= it->second != 0;
    }
    return v;
}

PhasePoly PhasePoly::substitute(const std::string& x, const PhasePoly& r) const {
    if (!contains(x)) return *this;
    PhasePoly p = *this;
    p.atoms_.erase(std::lower_bound(p.atoms_.begin(), p.atoms_.end(), x));
    return p ^ r;
}

PhasePoly PhasePoly::substitute(const std::map<std::string, PhasePoly>& sub) const {
    PhasePoly p = constant(c_);
    for (const auto& a : atoms_) {
        auto it = sub.find(a);
        p ^= it == sub.end() ? atom(a) : it->second;
    }
    return p;
}

PhasePoly PhasePoly::partial_eval(const Assignment& m) const {
    PhasePoly p = constant(c_);
    for (const auto& a : atoms_) {
        auto it = m.find(a);
        if (it == m.end()) p.atoms_.push_back(a);
        else if (it->second) p.c_ = !p.c_;
    }
    return p;
}

BExp PhasePoly::to_bexp() const {
    std::vector<BExp> xs;
    for (const auto& a : atoms_) xs.push_back(BExp::var(a));
    if (c_) xs.push_back(BExp::num(1));
    return mk_xor(std::move(xs));
}

std::string PhasePoly::str() const {
    if (atoms_.empty()) return c_ ? "1" : "0";
    std::string s = c_ ? "1" : "";
    for (const auto& a : atoms_) {
        if (!s.empty()) s += '+';
        s += a;
    }
    return s;
}

std::optional<PhasePoly> as_phase(const BExp& e) {
    switch (e.op()) {
        case Op::True: return PhasePoly::one();
        case Op::False: return PhasePoly::zero();
        case Op::Int:
            if (e.value() == 0 || e.value() == 1) return PhasePoly::constant(e.value() == 1);
            return std::nullopt;
        case Op::Var: return PhasePoly::atom(e.name());
        case Op::Not: {
            auto p = as_phase(e.args()[0]);
            if (!p) return std::nullopt;
            return p->flipped();
        }
        case Op::Xor: {
            PhasePoly acc;
            for (const auto& a : e.args()) {
                auto p = as_phase(a);
                if (!p) return std::nullopt;
                acc ^= *p;
            }
            return acc;
        }
        case Op::Eq: {
            auto p = as_phase(e.args()[0]);
            auto q = as_phase(e.args()[1]);
            if (!p || !q) return std::nullopt;
            return (*p ^ *q).flipped();
        }
        default: return std::nullopt;
    }
}

PhasePoly substitute_phase(const PhasePoly& p, const std::string& x, const BExp& r) {
    if (!p.contains(x)) return p;
    auto rp = as_phase(r);
    if (!rp) throw std::invalid_argument("substituting '" + r.str() + "' for " + x + " makes a phase nonlinear");
    return p.substitute(x, *rp);
}

}  // namespace qecv::cexpr
