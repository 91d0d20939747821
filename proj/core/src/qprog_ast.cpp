#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <map>
#include <sstream>

#include "qecv/qprog.hpp"

namespace qecv::qprog {

using cexpr::bexp_prec;

// ---------------------------------------------------------------- Assertion

Assertion::Assertion() : Assertion(classical(BExp::tt())) {}

Assertion Assertion::make(Kind k, std::vector<Assertion> args) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    return Assertion(std::move(n));
}

Assertion Assertion::classical(const BExp& b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Classical;
    n->bexp = b;
    return Assertion(std::move(n));
}

Assertion Assertion::atom(const PauliSum& p) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pauli;
    n->pauli = p;
    return Assertion(std::move(n));
}

bool Assertion::operator==(const Assertion& o) const {
    if (node_ == o.node_) return true;
    if (kind() != o.kind()) return false;
    switch (kind()) {
        case Kind::Classical: return bexp() == o.bexp();
        case Kind::Pauli: return pauli() == o.pauli();
        case Kind::BigVee:
            if (bound() != o.bound()) return false;
            break;
        default: break;
    }
    return args() == o.args();
}

namespace {

using K = Assertion::Kind;

void push_flat(K k, cexpr::BExp::Op bop, const Assertion& x, std::vector<Assertion>& out) {
    if (x.kind() == k) {
        for (const auto& a : x.args()) out.push_back(a);
    } else if (x.is_classical() && x.bexp().op() == bop) {
        for (const auto& b : x.bexp().args()) out.push_back(Assertion::classical(b));
    } else {
        out.push_back(x);
    }
}

}  // namespace

Assertion a_not(const Assertion& a) {
    if (a.is_classical()) return Assertion::classical(cexpr::mk_not(a.bexp()));
    if (a.kind() == K::Not) return a.args()[0];
    return Assertion::make(K::Not, {a});
}

Assertion a_and(std::vector<Assertion> xs) {
    std::vector<Assertion> flat;
    for (const auto& x : xs) push_flat(K::And, cexpr::BExp::Op::And, x, flat);
    std::vector<Assertion> keep;
    bool all_classical = true;
    for (auto& x : flat) {
        if (x.is_false()) return Assertion::bottom();
        if (x.is_true()) continue;
        if (!x.is_classical()) all_classical = false;
        keep.push_back(x);
    }
    if (keep.empty()) return Assertion::top();
    if (keep.size() == 1) return keep[0];
    if (all_classical) {
        std::vector<BExp> bs;
        for (auto& x : keep) bs.push_back(x.bexp());
        return Assertion::classical(cexpr::mk_and(bs));
    }
    return Assertion::make(K::And, std::move(keep));
}

Assertion a_or(std::vector<Assertion> xs) {
    std::vector<Assertion> flat;
    for (const auto& x : xs) push_flat(K::Or, cexpr::BExp::Op::Or, x, flat);
    std::vector<Assertion> keep;
    bool all_classical = true;
    for (auto& x : flat) {
        if (x.is_true()) return Assertion::top();
        if (x.is_false()) continue;
        if (!x.is_classical()) all_classical = false;
        keep.push_back(x);
    }
    if (keep.empty()) return Assertion::bottom();
    if (keep.size() == 1) return keep[0];
    if (all_classical) {
        std::vector<BExp> bs;
        for (auto& x : keep) bs.push_back(x.bexp());
        return Assertion::classical(cexpr::mk_or(bs));
    }
    return Assertion::make(K::Or, std::move(keep));
}

Assertion a_imp(const Assertion& a, const Assertion& b) {
    if (a.is_classical() && b.is_classical()) return Assertion::classical(cexpr::mk_imp(a.bexp(), b.bexp()));
    if (a.is_true()) return b;
    if (a.is_false()) return Assertion::top();
    return Assertion::make(K::Imp, {a, b});
}

Assertion a_bigvee(std::vector<std::string> bound, const Assertion& body) {
    if (bound.empty()) return body;
    auto a = Assertion::make(K::BigVee, {body});
    auto n = std::make_shared<Assertion::Node>(*a.node_);
    n->bound = std::move(bound);
    return Assertion(std::move(n));
}

namespace {

int aprec(const Assertion& a) {
    switch (a.kind()) {
        case K::Classical: return bexp_prec(a.bexp());
        case K::Pauli: return 9;
        case K::Not: return 4;
        case K::And: return 3;
        case K::Or: return 2;
        case K::Imp: return 1;
        case K::BigVee: return 0;
    }
    return 9;
}

void aprint(const Assertion& a, int min_prec, std::string& out) {
    bool paren = aprec(a) < min_prec;
    if (paren) out += '(';
    switch (a.kind()) {
        case K::Classical: out += a.bexp().str(); break;
        case K::Pauli: out += a.pauli().str(); break;
        case K::Not: out += '~'; aprint(a.args()[0], 4, out); break;
        case K::And:
            for (std::size_t i = 0; i < a.args().size(); ++i) {
                if (i) out += " /\\ ";
                aprint(a.args()[i], 4, out);
            }
            break;
        case K::Or:
            for (std::size_t i = 0; i < a.args().size(); ++i) {
                if (i) out += " \\/ ";
                aprint(a.args()[i], 3, out);
            }
            break;
        case K::Imp:
            aprint(a.args()[0], 2, out);
            out += " => ";
            aprint(a.args()[1], 1, out);
            break;
        case K::BigVee: {
            out += "bigvee ";
            for (std::size_t i = 0; i < a.bound().size(); ++i) {
                if (i) out += ", ";
                out += a.bound()[i];
            }
            out += " in {0,1}^" + std::to_string(a.bound().size()) + " : ";
            aprint(a.args()[0], 0, out);
            break;
        }
    }
    if (paren) out += ')';
}

PauliTerm resize_term(const PauliTerm& t, std::size_t n) {
    PauliTerm r(n);
    r.scalar = t.scalar;
    r.sign = t.sign;
    r.iexp = t.iexp;
    for (std::size_t q = 1; q <= t.n(); ++q) r.set_letter(q, t.letter(q));
    return r;
}

}  // namespace

std::string Assertion::str() const {
    std::string s;
    aprint(*this, 0, s);
    return s;
}

std::size_t assertion_qubits(const Assertion& a) {
    if (a.kind() == K::Pauli) {
        std::size_t m = 0;
        for (const auto& t : a.pauli().terms()) {
            auto s = t.support();
            if (!s.empty()) m = std::max(m, s.back());
        }
        return m;
    }
    std::size_t m = 0;
    for (const auto& x : a.args()) m = std::max(m, assertion_qubits(x));
    return m;
}

Assertion resize_assertion(const Assertion& a, std::size_t n) {
    switch (a.kind()) {
        case K::Classical: return a;
        case K::Pauli: {
            if (a.pauli().n() == n) return a;
            std::vector<PauliTerm> ts;
            for (const auto& t : a.pauli().terms()) ts.push_back(resize_term(t, n));
            return Assertion::atom(PauliSum::from_terms(n, ts));
        }
        case K::Not: return a_not(resize_assertion(a.args()[0], n));
        case K::And:
        case K::Or: {
            std::vector<Assertion> xs;
            for (const auto& x : a.args()) xs.push_back(resize_assertion(x, n));
            return a.kind() == K::And ? a_and(xs) : a_or(xs);
        }
        case K::Imp: return a_imp(resize_assertion(a.args()[0], n), resize_assertion(a.args()[1], n));
        case K::BigVee: return a_bigvee(a.bound(), resize_assertion(a.args()[0], n));
    }
    return a;
}

// ---------------------------------------------------------------- statements

namespace {

std::shared_ptr<Stmt> node(Stmt::Kind k) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    return s;
}

int const_index(const BExp& e, const char* what) {
    if (e.op() != BExp::Op::Int) throw std::invalid_argument(std::string(what) + " index '" + e.str() + "' is not a literal");
    return static_cast<int>(e.value());
}

}  // namespace

int Stmt::qubit1() const { return const_index(q1, "qubit"); }
int Stmt::qubit2() const { return const_index(q2, "qubit"); }

PauliTerm MeasTarget::to_term(std::size_t n) const {
    std::vector<std::pair<std::size_t, char>> ls;
    for (const auto& f : factors) ls.emplace_back(static_cast<std::size_t>(const_index(f.index, "Pauli")), f.letter);
    return PauliTerm::from_letters(n, ls, negative);
}

StmtP mk_skip() { return node(Stmt::Kind::Skip); }

StmtP mk_init(int q) {
    auto s = node(Stmt::Kind::Init);
    s->q1 = BExp::num(q);
    return s;
}

StmtP mk_unitary(Gate g, int q) {
    auto s = node(Stmt::Kind::Unitary1);
    s->gate = g;
    s->q1 = BExp::num(q);
    return s;
}

StmtP mk_unitary2(Gate g, int q1, int q2) {
    if (q1 == q2) throw std::invalid_argument("two-qubit gate with equal qubit indices");
    auto s = node(Stmt::Kind::Unitary2);
    s->gate = g;
    s->q1 = BExp::num(q1);
    s->q2 = BExp::num(q2);
    return s;
}

StmtP mk_cond_error(const BExp& guard, Gate g, int q) {
    auto s = node(Stmt::Kind::CondError);
    s->gate = g;
    s->expr = guard;
    s->q1 = BExp::num(q);
    return s;
}

StmtP mk_assign(const std::string& x, const BExp& e) {
    auto s = node(Stmt::Kind::Assign);
    s->var = x;
    s->expr = e;
    return s;
}

StmtP mk_measure(const std::string& x, const PauliTerm& p) {
    auto s = node(Stmt::Kind::Measure);
    s->var = x;
    s->target.negative = p.sign.constant_bit();
    for (std::size_t q = 1; q <= p.n(); ++q)
        if (p.letter(q) != 'I') s->target.factors.push_back({p.letter(q), BExp::num(static_cast<std::int64_t>(q))});
    return s;
}

StmtP mk_decode(std::vector<DecodeFamily> fams, std::vector<std::string> args) {
    auto s = node(Stmt::Kind::Decode);
    s->families = std::move(fams);
    s->dec_args = std::move(args);
    return s;
}

StmtP mk_seq(std::vector<StmtP> xs) {
    std::vector<StmtP> flat;
    for (auto& x : xs) {
        if (x->kind == Stmt::Kind::Seq)
            flat.insert(flat.end(), x->body.begin(), x->body.end());
        else
            flat.push_back(x);
    }
    if (flat.empty()) return mk_skip();
    if (flat.size() == 1) return flat[0];
    auto s = node(Stmt::Kind::Seq);
    s->body = std::move(flat);
    return s;
}

StmtP mk_if(const BExp& c, StmtP then_s, StmtP else_s) {
    auto s = node(Stmt::Kind::If);
    s->expr = c;
    s->body = {std::move(then_s), std::move(else_s)};
    return s;
}

StmtP mk_while(const BExp& c, StmtP body, std::optional<Assertion> inv) {
    auto s = node(Stmt::Kind::While);
    s->expr = c;
    s->body = {std::move(body)};
    s->invariant = std::move(inv);
    return s;
}

StmtP mk_for(const std::string& v, const BExp& lo, const BExp& hi, StmtP body) {
    auto s = node(Stmt::Kind::For);
    s->var = v;
    s->expr = lo;
    s->expr2 = hi;
    s->body = {std::move(body)};
    return s;
}

bool stmt_equal(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    using SK = Stmt::Kind;
    switch (a.kind) {
        case SK::Skip: return true;
        case SK::Init: return a.q1 == b.q1;
        case SK::Unitary1: return a.gate == b.gate && a.q1 == b.q1;
        case SK::Unitary2: return a.gate == b.gate && a.q1 == b.q1 && a.q2 == b.q2;
        case SK::CondError: return a.gate == b.gate && a.q1 == b.q1 && a.expr == b.expr;
        case SK::Assign: return a.var == b.var && a.expr == b.expr;
        case SK::Measure: return a.var == b.var && a.target == b.target;
        case SK::Decode: return a.families == b.families && a.dec_args == b.dec_args;
        case SK::Seq:
        case SK::If:
        case SK::While:
        case SK::For: {
            if (a.kind == SK::If || a.kind == SK::While) {
                if (a.expr != b.expr) return false;
            }
            if (a.kind == SK::While && a.invariant.has_value() != b.invariant.has_value()) return false;
            if (a.kind == SK::While && a.invariant && *a.invariant != *b.invariant) return false;
            if (a.kind == SK::For && (a.var != b.var || a.expr != b.expr || a.expr2 != b.expr2)) return false;
            if (a.body.size() != b.body.size()) return false;
            for (std::size_t i = 0; i < a.body.size(); ++i)
                if (!stmt_equal(*a.body[i], *b.body[i])) return false;
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------- printing

namespace {

std::string qref(const BExp& e) {
    if (e.op() == BExp::Op::Int || e.op() == BExp::Op::Var) return "q_" + e.str();
    return "q_(" + e.str() + ")";
}

std::string factor_str(const MeasFactor& f) {
    if (f.index.op() == BExp::Op::Int) return std::string(1, f.letter) + f.index.str();
    if (f.index.op() == BExp::Op::Var) return std::string(1, f.letter) + "_" + f.index.str();
    return std::string(1, f.letter) + "_(" + f.index.str() + ")";
}

void sprint(const Stmt& s, int ind, std::string& out) {
    std::string pad(static_cast<std::size_t>(ind), ' ');
    using SK = Stmt::Kind;
    switch (s.kind) {
        case SK::Skip: out += pad + "skip"; break;
        case SK::Init: out += pad + qref(s.q1) + " := |0>"; break;
        case SK::Unitary1: out += pad + qref(s.q1) + " *= " + pauli::gate_name(s.gate); break;
        case SK::Unitary2: out += pad + qref(s.q1) + ", " + qref(s.q2) + " *= " + pauli::gate_name(s.gate); break;
        case SK::CondError:
            out += pad + qref(s.q1) + " *= [" + s.expr.str() + "] " + pauli::gate_name(s.gate);
            break;
        case SK::Assign: out += pad + s.var + " := " + s.expr.str(); break;
        case SK::Measure: {
            out += pad + s.var + " := meas[";
            if (s.target.negative) out += "-";
            for (std::size_t i = 0; i < s.target.factors.size(); ++i) {
                if (i) out += ' ';
                out += factor_str(s.target.factors[i]);
            }
            if (s.target.factors.empty()) out += "I";
            out += "]";
            break;
        }
        case SK::Decode: {
            out += pad;
            for (std::size_t i = 0; i < s.families.size(); ++i) {
                if (i) out += ", ";
                const auto& f = s.families[i];
                out += f.name + "[" + f.lo.str() + ".." + f.hi.str() + "]";
            }
            out += " := decode(";
            for (std::size_t i = 0; i < s.dec_args.size(); ++i) {
                if (i) out += ", ";
                out += s.dec_args[i];
            }
            out += ")";
            break;
        }
        case SK::Seq:
            for (std::size_t i = 0; i < s.body.size(); ++i) {
                if (i) out += ";\n";
                sprint(*s.body[i], ind, out);
            }
            break;
        case SK::If:
            out += pad + "if " + s.expr.str() + " then\n";
            sprint(*s.body[0], ind + 2, out);
            out += "\n" + pad + "else\n";
            sprint(*s.body[1], ind + 2, out);
            out += "\n" + pad + "end";
            break;
        case SK::While:
            out += pad + "while " + s.expr.str();
            if (s.invariant) out += " invariant: " + s.invariant->str();
            out += " do\n";
            sprint(*s.body[0], ind + 2, out);
            out += "\n" + pad + "end";
            break;
        case SK::For:
            out += pad + "for " + s.var + " in " + s.expr.str() + ".." + s.expr2.str() + " do\n";
            sprint(*s.body[0], ind + 2, out);
            out += "\n" + pad + "end";
            break;
    }
}

}  // namespace

std::string print_program(const Stmt& s) {
    std::string out;
    sprint(s, 0, out);
    return out;
}

// ---------------------------------------------------------------- desugar

namespace {

using Env = std::map<std::string, std::int64_t>;

std::string inst_name(const std::string& name, const Env& env) {
    if (env.empty() || name.find('_') == std::string::npos) return name;
    std::string out, seg;
    std::istringstream in(name);
    bool first = true;
    while (std::getline(in, seg, '_')) {
        if (!first) out += '_';
        first = false;
        auto it = env.find(seg);
        out += it == env.end() ? seg : std::to_string(it->second);
    }
    if (!name.empty() && name.back() == '_') out += '_';
    return out;
}

BExp inst(const BExp& e, const Env& env) {
    std::set<std::string> fv;
    cexpr::free_vars(e, fv);
    std::map<std::string, BExp> sub;
    for (const auto& v : fv) {
        auto it = env.find(v);
        if (it != env.end()) sub[v] = BExp::num(it->second);
        else {
            auto r = inst_name(v, env);
            if (r != v) sub[v] = BExp::var(r);
        }
    }
    return cexpr::partial_eval(cexpr::substitute(e, sub), {});
}

BExp inst_index(const BExp& e, const Env& env, const char* what) {
    BExp r = inst(e, env);
    if (r.op() != BExp::Op::Int) throw std::invalid_argument(std::string("unresolvable ") + what + " '" + e.str() + "'");
    return r;
}

PhasePoly inst_phase(const PhasePoly& p, const Env& env) {
    std::vector<std::string> atoms;
    bool c = p.constant_bit();
    for (const auto& a : p.atoms()) {
        auto it = env.find(a);
        if (it != env.end()) c ^= (it->second & 1) != 0;
        else atoms.push_back(inst_name(a, env));
    }
    return PhasePoly::from(c, atoms);
}

Assertion inst_assertion(const Assertion& a, const Env& env) {
    switch (a.kind()) {
        case K::Classical: return Assertion::classical(inst(a.bexp(), env));
        case K::Pauli: {
            std::vector<PauliTerm> ts;
            for (auto t : a.pauli().terms()) {
                t.sign = inst_phase(t.sign, env);
                ts.push_back(t);
            }
            return Assertion::atom(PauliSum::from_terms(a.pauli().n(), ts));
        }
        case K::Not: return a_not(inst_assertion(a.args()[0], env));
        case K::And:
        case K::Or: {
            std::vector<Assertion> xs;
            for (const auto& x : a.args()) xs.push_back(inst_assertion(x, env));
            return a.kind() == K::And ? a_and(xs) : a_or(xs);
        }
        case K::Imp: return a_imp(inst_assertion(a.args()[0], env), inst_assertion(a.args()[1], env));
        case K::BigVee: {
            std::vector<std::string> b;
            for (const auto& v : a.bound()) b.push_back(inst_name(v, env));
            return a_bigvee(b, inst_assertion(a.args()[0], env));
        }
    }
    return a;
}

void desugar_into(const StmtP& sp, const Env& env, std::vector<StmtP>& out) {
    const Stmt& s = *sp;
    using SK = Stmt::Kind;
    switch (s.kind) {
        case SK::Seq:
            for (const auto& c : s.body) desugar_into(c, env, out);
            return;
        case SK::For: {
            BExp lo = inst_index(s.expr, env, "loop bound");
            BExp hi = inst_index(s.expr2, env, "loop bound");
            for (std::int64_t v = lo.value(); v <= hi.value(); ++v) {
                Env e2 = env;
                e2[s.var] = v;
                desugar_into(s.body[0], e2, out);
            }
            return;
        }
        default: break;
    }
    auto r = std::make_shared<Stmt>(s);
    switch (s.kind) {
        case SK::Init:
        case SK::Unitary1:
            r->q1 = inst_index(s.q1, env, "qubit index");
            break;
        case SK::Unitary2:
            r->q1 = inst_index(s.q1, env, "qubit index");
            r->q2 = inst_index(s.q2, env, "qubit index");
            if (r->q1 == r->q2) throw std::invalid_argument("two-qubit gate with equal qubit indices");
            break;
        case SK::CondError:
            r->q1 = inst_index(s.q1, env, "qubit index");
            r->expr = inst(s.expr, env);
            break;
        case SK::Assign:
            r->var = inst_name(s.var, env);
            r->expr = inst(s.expr, env);
            break;
        case SK::Measure:
            r->var = inst_name(s.var, env);
            for (auto& f : r->target.factors) f.index = inst_index(f.index, env, "Pauli index");
            break;
        case SK::Decode:
            for (auto& f : r->families) {
                f.name = inst_name(f.name, env);
                f.lo = inst_index(f.lo, env, "decode range");
                f.hi = inst_index(f.hi, env, "decode range");
            }
            for (auto& a : r->dec_args) a = inst_name(a, env);
            break;
        case SK::If: {
            r->expr = inst(s.expr, env);
            std::vector<StmtP> t, e;
            desugar_into(s.body[0], env, t);
            desugar_into(s.body[1], env, e);
            r->body = {mk_seq(t), mk_seq(e)};
            break;
        }
        case SK::While: {
            r->expr = inst(s.expr, env);
            std::vector<StmtP> b;
            desugar_into(s.body[0], env, b);
            r->body = {mk_seq(b)};
            if (s.invariant) r->invariant = inst_assertion(*s.invariant, env);
            break;
        }
        default: break;
    }
    out.push_back(r);
}

}  // namespace

StmtP desugar(const StmtP& s) {
    std::vector<StmtP> out;
    desugar_into(s, {}, out);
    return mk_seq(out);
}

std::size_t program_qubits(const Stmt& s) {
    using SK = Stmt::Kind;
    std::size_t m = 0;
    switch (s.kind) {
        case SK::Init:
        case SK::Unitary1:
        case SK::CondError: return static_cast<std::size_t>(s.qubit1());
        case SK::Unitary2: return static_cast<std::size_t>(std::max(s.qubit1(), s.qubit2()));
        case SK::Measure:
            for (const auto& f : s.target.factors) m = std::max<std::size_t>(m, static_cast<std::size_t>(const_index(f.index, "Pauli")));
            return m;
        case SK::Decode:
            for (const auto& f : s.families) m = std::max<std::size_t>(m, static_cast<std::size_t>(const_index(f.hi, "decode")));
            return m;
        default:
            for (const auto& c : s.body) m = std::max(m, program_qubits(*c));
            return m;
    }
}

std::size_t count_primitive(const Stmt& s) {
    if (s.kind == Stmt::Kind::Seq) {
        std::size_t c = 0;
        for (const auto& x : s.body) c += count_primitive(*x);
        return c;
    }
    return 1;
}

std::vector<StmtP> flatten(const StmtP& s) {
    if (s->kind == Stmt::Kind::Seq) return s->body;
    return {s};
}

// ---------------------------------------------------------------- codes

std::vector<BitVec> StabilizerCode::check_matrix() const {
    std::vector<BitVec> h;
    for (const auto& g : generators) h.push_back(pauli::symplectic(g));
    return h;
}

bool StabilizerCode::is_x_type(std::size_t g) const { return generators[g].zs.none(); }
bool StabilizerCode::is_z_type(std::size_t g) const { return generators[g].xs.none(); }

bool StabilizerCode::is_css() const {
    for (std::size_t g = 0; g < generators.size(); ++g)
        if (!is_x_type(g) && !is_z_type(g)) return false;
    return true;
}

void StabilizerCode::validate() const {
    auto gname = [](std::size_t i) { return "g" + std::to_string(i + 1); };
    if (k > n) throw CodeError("k exceeds n");
    if (generators.size() != n - k)
        throw CodeError("expected " + std::to_string(n - k) + " generators, got " + std::to_string(generators.size()));
    if (logical_x.size() != k || logical_z.size() != k) throw CodeError("expected " + std::to_string(k) + " logical operators of each type");
    auto check_shape = [&](const PauliTerm& p, const std::string& nm) {
        if (p.n() != n) throw CodeError(nm + " has length " + std::to_string(p.n()) + ", expected " + std::to_string(n));
        if (!p.hermitian() || !p.scalar.is_one() || !p.sign.is_constant()) throw CodeError(nm + " is not a signed Pauli string");
    };
    for (std::size_t i = 0; i < generators.size(); ++i) check_shape(generators[i], gname(i));
    for (std::size_t i = 0; i < k; ++i) {
        check_shape(logical_x[i], "LX" + std::to_string(i + 1));
        check_shape(logical_z[i], "LZ" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = i + 1; j < generators.size(); ++j)
            if (!pauli::commutes(generators[i], generators[j]))
                throw CodeError("generators " + gname(i) + " and " + gname(j) + " anticommute");
    std::vector<BitVec> rows;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        rows.push_back(pauli::symplectic(generators[i]));
        if (gf2::rank(rows) != rows.size())
            throw CodeError("generators are dependent: " + gname(i) + " is a product of earlier generators");
    }
    for (int t = 0; t < 2; ++t) {
        const auto& ls = t == 0 ? logical_x : logical_z;
        std::string pre = t == 0 ? "LX" : "LZ";
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < generators.size(); ++j)
                if (!pauli::commutes(ls[i], generators[j]))
                    throw CodeError(pre + std::to_string(i + 1) + " anticommutes with " + gname(j));
            auto r2 = rows;
            r2.push_back(pauli::symplectic(ls[i]));
            if (gf2::rank(r2) != r2.size()) throw CodeError(pre + std::to_string(i + 1) + " lies in the stabilizer group");
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            bool c = pauli::commutes(logical_x[i], logical_z[j]);
            std::string pair = "LX" + std::to_string(i + 1) + " and LZ" + std::to_string(j + 1);
            if (i == j && c) throw CodeError(pair + " commute");
            if (i != j && !c) throw CodeError(pair + " anticommute");
            if (i < j) {
                if (!pauli::commutes(logical_x[i], logical_x[j]))
                    throw CodeError("LX" + std::to_string(i + 1) + " and LX" + std::to_string(j + 1) + " anticommute");
                if (!pauli::commutes(logical_z[i], logical_z[j]))
                    throw CodeError("LZ" + std::to_string(i + 1) + " and LZ" + std::to_string(j + 1) + " anticommute");
            }
        }
}

std::string StabilizerCode::to_text() const {
    std::ostringstream o;
    if (!name.empty()) o << "# " << name << "\n";
    o << n << " " << k << " " << d << "\n";
    for (const auto& g : generators) o << g.str() << "\n";
    o << "LX\n";
    for (const auto& l : logical_x) o << l.str() << "\n";
    o << "LZ\n";
    for (const auto& l : logical_z) o << l.str() << "\n";
    return o.str();
}

namespace {

PauliTerm parse_code_line(const std::string& line, std::size_t n, int lineno) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    try {
        if (toks.size() == 1) {
            std::string body = toks[0];
            if (!body.empty() && (body[0] == '-' || body[0] == '+')) body = body.substr(1);
            bool dense = !body.empty() && body.find_first_not_of("IXYZ") == std::string::npos;
            if (dense) {
                if (body.size() != n) throw CodeError("dense Pauli of length " + std::to_string(body.size()) + ", expected " + std::to_string(n));
                return PauliTerm::parse_dense(toks[0]);
            }
        }
        return PauliTerm::parse_sparse(line, n);
    } catch (const CodeError& e) {
        throw CodeError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
        throw CodeError("line " + std::to_string(lineno) + ": " + e.what());
    }
}

}  // namespace

StabilizerCode parse_code(const std::string& text, const std::string& name) {
    StabilizerCode c;
    c.name = name;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    enum { Header, Gens, LX, LZ } sect = Header;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        std::string line = raw.substr(0, hash);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
        if (sect == Header) {
            std::istringstream h(line);
            if (!(h >> c.n >> c.k >> c.d)) throw CodeError("line " + std::to_string(lineno) + ": expected header 'n k d'");
            sect = Gens;
            continue;
        }
        if (line == "LX") {
            sect = LX;
            continue;
        }
        if (line == "LZ") {
            sect = LZ;
            continue;
        }
        PauliTerm p = parse_code_line(line, c.n, lineno);
        if (sect == Gens) c.generators.push_back(p);
        else if (sect == LX) c.logical_x.push_back(p);
        else c.logical_z.push_back(p);
    }
    if (sect == Header) throw CodeError("empty code file");
    c.validate();
    return c;
}

StabilizerCode load_code(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CodeError("cannot open code file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    auto slash = path.find_last_of('/');
    return parse_code(ss.str(), slash == std::string::npos ? path : path.substr(slash + 1));
}

// ---------------------------------------------------------------- decoder

std::string family_var(const std::string& family, std::size_t i) { return family + "_" + std::to_string(i); }
std::string decoder_atom(const std::string& family, std::size_t i) { return "f_" + family + "_" + std::to_string(i); }

DecoderSpec derive_decoder_spec(const Stmt& prog, std::size_t n) {
    DecoderSpec spec;
    std::map<std::string, PauliTerm> measured;
    std::vector<const Stmt*> stack{&prog};
    std::vector<const Stmt*> order;
    // pre-order walk keeps program order
    std::function<void(const Stmt&)> walk = [&](const Stmt& s) {
        if (s.kind == Stmt::Kind::Seq || s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While) {
            for (const auto& c : s.body) walk(*c);
            return;
        }
        order.push_back(&s);
    };
    walk(prog);
    for (const Stmt* s : order) {
        if (s->kind == Stmt::Kind::Measure) {
            measured[s->var] = s->target.to_term(n);
        } else if (s->kind == Stmt::Kind::Decode) {
            DecoderCall call;
            call.syndromes = s->dec_args;
            for (const auto& f : s->families) {
                char letter = f.name.empty() ? '?' : static_cast<char>(std::toupper(static_cast<unsigned char>(f.name[0])));
                if (letter != 'X' && letter != 'Z')
                    throw std::invalid_argument("decode family '" + f.name + "' must start with x or z");
                for (auto i = f.lo.value(); i <= f.hi.value(); ++i) {
                    auto q = static_cast<std::size_t>(i);
                    call.corrections.push_back({family_var(f.name, q), decoder_atom(f.name, q), q, letter, f.name});
                }
            }
            for (const auto& sv : call.syndromes) {
                auto it = measured.find(sv);
                if (it == measured.end()) throw std::invalid_argument("decode argument '" + sv + "' is not a measured syndrome");
                std::vector<bool> row;
                for (const auto& c : call.corrections) {
                    PauliTerm e(n);
                    e.set_letter(c.qubit, c.letter);
                    row.push_back(!pauli::commutes(it->second, e));
                }
                call.rows.push_back(row);
            }
            spec.calls.push_back(std::move(call));
        }
    }
    return spec;
}

}  // namespace qecv::qprog
