#include "qecv/wlp.hpp"

#include <algorithm>
#include <functional>

namespace qecv::wlp {

using K = Assertion::Kind;
using SK = Stmt::Kind;
using qprog::a_and;
using qprog::a_bigvee;
using qprog::a_not;
using qprog::a_or;

namespace {

char gate_letter(Gate g) {
    switch (g) {
        case Gate::X: return 'X';
        case Gate::Y: return 'Y';
        case Gate::Z: return 'Z';
        default: return 0;
    }
}

bool anticommutes_letter(const PauliTerm& t, std::size_t q, char l) {
    char a = t.letter(q);
    return a != 'I' && a != l;
}

PauliSum map_terms(const PauliSum& p, const std::function<void(PauliTerm&)>& f) {
    std::vector<PauliTerm> ts = p.terms();
    for (auto& t : ts) f(t);
    return PauliSum::from_terms(p.n(), ts);
}

Assertion map_atoms(const Assertion& a, const std::function<Assertion(const Assertion&)>& f) {
    switch (a.kind()) {
        case K::Classical:
        case K::Pauli: return f(a);
        case K::Not: return a_not(map_atoms(a.args()[0], f));
        case K::And:
        case K::Or: {
            std::vector<Assertion> xs;
            for (const auto& x : a.args()) xs.push_back(map_atoms(x, f));
            return a.kind() == K::And ? a_and(xs) : a_or(xs);
        }
        case K::Imp: return qprog::a_imp(map_atoms(a.args()[0], f), map_atoms(a.args()[1], f));
        case K::BigVee: return a_bigvee(a.bound(), map_atoms(a.args()[0], f));
    }
    return a;
}

PauliTerm measured_term(const Stmt& s, std::size_t n) {
    PauliTerm p = s.target.to_term(n);
    if (!p.hermitian() || !p.scalar.is_one()) throw WlpError("measurement target of " + s.var + " is not a Hermitian Pauli string");
    if (p.is_identity()) throw WlpError("measurement of the identity");
    return p;
}

bool is_bound(const Assertion& a, const std::string& x) {
    return std::find(a.bound().begin(), a.bound().end(), x) != a.bound().end();
}

}  // namespace

Assertion subst_assertion(const Assertion& a, const std::string& x, const BExp& e) {
    switch (a.kind()) {
        case K::Classical:
            return Assertion::classical(cexpr::partial_eval(cexpr::substitute(a.bexp(), x, e), {}));
        case K::Pauli:
            return Assertion::atom(
                map_terms(a.pauli(), [&](PauliTerm& t) { t.sign = cexpr::substitute_phase(t.sign, x, e); }));
        case K::BigVee:
            if (is_bound(a, x)) return a;
            return a_bigvee(a.bound(), subst_assertion(a.args()[0], x, e));
        case K::Not: return a_not(subst_assertion(a.args()[0], x, e));
        case K::And:
        case K::Or: {
            std::vector<Assertion> xs;
            for (const auto& y : a.args()) xs.push_back(subst_assertion(y, x, e));
            return a.kind() == K::And ? a_and(xs) : a_or(xs);
        }
        case K::Imp: return qprog::a_imp(subst_assertion(a.args()[0], x, e), subst_assertion(a.args()[1], x, e));
    }
    return a;
}

Assertion conjugate_assertion(const Assertion& a, Gate g, std::size_t i, std::size_t j) {
    return map_atoms(a, [&](const Assertion& x) {
        if (x.kind() != K::Pauli) return x;
        return Assertion::atom(pauli::conjugate(g, i, j, x.pauli()));
    });
}

Assertion guard_assertion(const Assertion& a, Gate g, std::size_t i, const PhasePoly& guard) {
    char l = gate_letter(g);
    if (!l) throw WlpError("guarded phase rule needs a Pauli gate");
    return map_atoms(a, [&](const Assertion& x) {
        if (x.kind() != K::Pauli) return x;
        return Assertion::atom(map_terms(x.pauli(), [&](PauliTerm& t) {
            if (anticommutes_letter(t, i, l)) t.sign ^= guard;
        }));
    });
}

namespace {

Assertion assign_rule(const Assertion& a, const std::string& x, const BExp& e) {
    try {
        return subst_assertion(a, x, e);
    } catch (const std::invalid_argument&) {
        // nonlinear replacement inside a phase: split on the value of e
        BExp truth = e.is_bool() ? e : cexpr::mk_not(cexpr::mk_eq(e, BExp::num(0)));
        return a_or(a_and(Assertion::classical(truth), subst_assertion(a, x, BExp::num(1))),
                    a_and(Assertion::classical(cexpr::mk_not(truth)), subst_assertion(a, x, BExp::num(0))));
    }
}

Assertion pauli_atom(const PauliTerm& t) { return Assertion::atom(PauliSum(t)); }

struct Generic {
    std::size_t n;
    std::vector<Obligation> obligations;

    Assertion run(const StmtP& sp, const Assertion& post) {
        const Stmt& s = *sp;
        switch (s.kind) {
            case SK::Skip: return post;
            case SK::Assign: return assign_rule(post, s.var, s.expr);
            case SK::Init: {
                std::size_t q = static_cast<std::size_t>(s.qubit1());
                PauliTerm z(n);
                z.set_letter(q, 'Z');
                PauliTerm mz = z;
                mz.sign = PhasePoly::one();
                return a_or(a_and(pauli_atom(z), post), a_and(pauli_atom(mz), conjugate_assertion(post, Gate::X, q)));
            }
            case SK::Unitary1: return conjugate_assertion(post, s.gate, static_cast<std::size_t>(s.qubit1()));
            case SK::Unitary2:
                return conjugate_assertion(post, s.gate, static_cast<std::size_t>(s.qubit1()),
                                           static_cast<std::size_t>(s.qubit2()));
            case SK::CondError: {
                std::size_t q = static_cast<std::size_t>(s.qubit1());
                BExp guard = cexpr::partial_eval(s.expr, {});
                if (guard.is_false()) return post;
                if (guard.is_true() || (guard.op() == BExp::Op::Int && guard.value() != 0))
                    return conjugate_assertion(post, s.gate, q);
                auto ph = cexpr::as_phase(guard);
                if (pauli::is_pauli_gate(s.gate) && ph) return guard_assertion(post, s.gate, q, *ph);
                return a_or(a_and(Assertion::classical(cexpr::mk_not(guard)), post),
                            a_and(Assertion::classical(guard), conjugate_assertion(post, s.gate, q)));
            }
            case SK::Measure: {
                PauliTerm p = measured_term(s, n);
                return a_or(a_and(pauli_atom(p), assign_rule(post, s.var, BExp::num(0))),
                            a_and(a_not(pauli_atom(p)), assign_rule(post, s.var, BExp::num(1))));
            }
            case SK::Decode: {
                Assertion a = post;
                std::vector<std::pair<std::string, std::string>> vs;
                for (const auto& f : s.families)
                    for (auto i = f.lo.value(); i <= f.hi.value(); ++i)
                        vs.emplace_back(qprog::family_var(f.name, static_cast<std::size_t>(i)),
                                        qprog::decoder_atom(f.name, static_cast<std::size_t>(i)));
                for (auto it = vs.rbegin(); it != vs.rend(); ++it) a = subst_assertion(a, it->first, BExp::var(it->second));
                return a;
            }
            case SK::Seq: {
                Assertion a = post;
                for (auto it = s.body.rbegin(); it != s.body.rend(); ++it) a = run(*it, a);
                return a;
            }
            case SK::If: {
                Assertion a1 = run(s.body[0], post);
                Assertion a0 = run(s.body[1], post);
                return a_or(a_and(Assertion::classical(cexpr::mk_not(s.expr)), a0),
                            a_and(Assertion::classical(s.expr), a1));
            }
            case SK::While: {
                if (!s.invariant) throw WlpError("while loop without invariant");
                Assertion inv = qprog::resize_assertion(*s.invariant, n);
                Generic inner{n, {}};
                Assertion body_pre = inner.run(s.body[0], inv);
                obligations.push_back({a_and(Assertion::classical(s.expr), inv), body_pre, "while body preserves invariant"});
                for (auto& o : inner.obligations) obligations.push_back(o);
                obligations.push_back({a_and(Assertion::classical(cexpr::mk_not(s.expr)), inv), post, "while exit establishes post"});
                return inv;
            }
            case SK::For: throw WlpError("for loops must be desugared before wlp");
        }
        return post;
    }
};

}  // namespace

WlpResult wlp(const StmtP& s, const Assertion& post, std::size_t n) {
    Generic g{n, {}};
    Assertion pre = g.run(s, qprog::resize_assertion(post, n));
    return {pre, std::move(g.obligations)};
}

std::vector<Obligation> check_while_obligations(const Assertion& inv, const BExp& cond, const StmtP& body,
                                                const Assertion& post, std::size_t n) {
    auto loop = qprog::mk_while(cond, body, inv);
    return wlp(loop, post, n).obligations;
}

// ---------------------------------------------------------------- PhaseForm

namespace {

void normalize_row(Row& r) {
    if (!r.gen.is_single()) return;
    const PauliTerm& t = r.gen.single();
    if (!t.hermitian() || !t.scalar.is_one()) return;
    PauliTerm u = t;
    r.phase ^= u.sign;
    u.sign = PhasePoly::zero();
    r.gen = PauliSum(u);
}

bool single_plain(const Row& r) {
    return r.gen.is_single() && r.gen.single().hermitian() && r.gen.single().scalar.is_one() &&
           r.gen.single().sign.is_zero();
}

PhasePoly to_phase(const BExp& e, const char* what) {
    auto p = cexpr::as_phase(cexpr::partial_eval(e, {}));
    if (!p) throw WlpError(std::string(what) + " '" + e.str() + "' is not boolean-affine");
    return *p;
}

void subst_all(PhaseForm& f, const std::string& x, const BExp& e) {
    auto ph = [&](const PhasePoly& p) {
        try {
            return cexpr::substitute_phase(p, x, e);
        } catch (const std::invalid_argument& ex) {
            throw WlpError(ex.what());
        }
    };
    for (auto& r : f.rows) {
        r.phase = ph(r.phase);
        bool touched = false;
        for (const auto& t : r.gen.terms())
            if (t.sign.contains(x)) touched = true;
        if (touched) r.gen = map_terms(r.gen, [&](PauliTerm& t) { t.sign = ph(t.sign); });
    }
    for (auto& c : f.constraints) c = ph(c);
    f.classical = cexpr::partial_eval(cexpr::substitute(f.classical, x, e), {});
}

void pf_measure(PhaseForm& f, const Stmt& s) {
    if (std::find(f.bound.begin(), f.bound.end(), s.var) != f.bound.end())
        throw WlpError("syndrome variable " + s.var + " is measured twice");
    PauliTerm p = measured_term(s, f.n);
    PhasePoly alpha = p.sign;
    PauliTerm p0 = p;
    p0.sign = PhasePoly::zero();
    PhasePoly sa = PhasePoly::atom(s.var) ^ alpha;

    for (auto& r : f.rows) {
        if (single_plain(r) && r.gen.single().same_pauli(p0)) {
            PhasePoly c = r.phase ^ sa;
            if (!c.is_zero()) f.constraints.push_back(c);
            r.phase = sa;
            f.bound.insert(f.bound.begin(), s.var);
            f.order.insert(f.order.begin(), s.var);
            return;
        }
    }
    // product of single-term rows?
    std::vector<std::size_t> idx;
    std::vector<BitVec> cols;
    for (std::size_t i = 0; i < f.rows.size(); ++i)
        if (single_plain(f.rows[i])) {
            idx.push_back(i);
            cols.push_back(pauli::symplectic(f.rows[i].gen.single()));
        }
    if (auto sol = gf2::solve(cols, pauli::symplectic(p0))) {
        PauliTerm prod(f.n);
        PhasePoly phases;
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (sol->get(k)) {
                prod = pauli::mul(prod, f.rows[idx[k]].gen.single());
                phases ^= f.rows[idx[k]].phase;
            }
        bool all_commute = true;
        for (std::size_t k = 0; k < idx.size() && all_commute; ++k)
            if (sol->get(k))
                for (std::size_t l = k + 1; l < idx.size(); ++l)
                    if (sol->get(l) && !pauli::commutes(f.rows[idx[k]].gen.single(), f.rows[idx[l]].gen.single()))
                        all_commute = false;
        if (all_commute && prod.hermitian()) {
            auto beta = pauli::equal_up_to_phase(prod, p0);
            if (beta) {
                PhasePoly c = sa ^ *beta ^ phases;
                if (!c.is_zero()) f.constraints.push_back(c);
                f.bound.insert(f.bound.begin(), s.var);
                f.order.insert(f.order.begin(), s.var);
                return;
            }
        }
    }
    for (const auto& r : f.rows)
        if (!pauli::commutes(r.gen, PauliSum(p0)))
            throw WlpError("measured operator " + p.str() + " anticommutes with row " + r.gen.str());
    f.rows.push_back({PauliSum(p0), sa});
    f.bound.insert(f.bound.begin(), s.var);
    f.order.insert(f.order.begin(), s.var);
}

void pf_run(PhaseForm& f, const StmtP& sp) {
    const Stmt& s = *sp;
    switch (s.kind) {
        case SK::Skip: return;
        case SK::Seq:
            for (auto it = s.body.rbegin(); it != s.body.rend(); ++it) pf_run(f, *it);
            return;
        case SK::Assign:
            if (std::find(f.bound.begin(), f.bound.end(), s.var) != f.bound.end())
                throw WlpError("assignment to measured syndrome " + s.var);
            to_phase(s.expr, "assigned expression");
            subst_all(f, s.var, s.expr);
            return;
        case SK::Unitary1:
        case SK::Unitary2: {
            auto i = static_cast<std::size_t>(s.qubit1());
            auto j = s.kind == SK::Unitary2 ? static_cast<std::size_t>(s.qubit2()) : 0;
            for (auto& r : f.rows) {
                r.gen = pauli::conjugate(s.gate, i, j, r.gen);
                normalize_row(r);
            }
            return;
        }
        case SK::CondError: {
            auto q = static_cast<std::size_t>(s.qubit1());
            BExp guard = cexpr::partial_eval(s.expr, {});
            if (pauli::is_pauli_gate(s.gate)) {
                PhasePoly g;
                try {
                    g = to_phase(guard, "conditional-error guard");
                } catch (const WlpError&) {
                    throw WlpError("conditional-error guard not boolean: " + s.expr.str());
                }
                if (g.is_zero()) return;
                char l = gate_letter(s.gate);
                for (auto& r : f.rows) {
                    if (single_plain(r)) {
                        if (anticommutes_letter(r.gen.single(), q, l)) r.phase ^= g;
                    } else {
                        r.gen = map_terms(r.gen, [&](PauliTerm& t) {
                            if (anticommutes_letter(t, q, l)) t.sign ^= g;
                        });
                        normalize_row(r);
                    }
                }
                return;
            }
            auto g = cexpr::as_phase(guard);
            if (!g || !g->is_constant())
                throw WlpError("non-Pauli conditional error on q_" + std::to_string(q) +
                               " needs a constant guard; specialize the error instance first");
            if (!g->constant_bit()) return;
            for (auto& r : f.rows) {
                r.gen = pauli::conjugate(s.gate, q, 0, r.gen);
                normalize_row(r);
            }
            return;
        }
        case SK::Measure: pf_measure(f, s); return;
        case SK::Decode: {
            std::vector<std::string> atoms;
            for (const auto& fam : s.families)
                for (auto i = fam.lo.value(); i <= fam.hi.value(); ++i) {
                    auto q = static_cast<std::size_t>(i);
                    std::string v = qprog::family_var(fam.name, q), at = qprog::decoder_atom(fam.name, q);
                    subst_all(f, v, BExp::var(at));
                    atoms.push_back(at);
                }
            f.order.insert(f.order.begin(), atoms.begin(), atoms.end());
            return;
        }
        case SK::Init: throw WlpError("initialization is not supported in the structured engine");
        case SK::If: throw WlpError("if statements are not supported in the structured engine");
        case SK::While: throw WlpError("while loops are not supported in the structured engine");
        case SK::For: throw WlpError("for loops must be desugared before wlp");
    }
}

}  // namespace

PhaseForm wlp_phaseform(const StmtP& s, const PhaseForm& post) {
    PhaseForm f = post;
    pf_run(f, s);
    return f;
}

PhaseForm phaseform_from_rows(std::size_t n, const std::vector<std::pair<PauliTerm, PhasePoly>>& rows,
                              const BExp& classical) {
    PhaseForm f;
    f.n = n;
    f.classical = classical;
    for (const auto& [t, ph] : rows) {
        Row r{PauliSum(t), ph};
        normalize_row(r);
        f.rows.push_back(r);
    }
    return f;
}

PhaseForm phaseform_from_assertion(const Assertion& a, std::size_t n) {
    PhaseForm f;
    f.n = n;
    Assertion r = qprog::resize_assertion(a, n);
    std::vector<Assertion> parts = r.kind() == K::And ? r.args() : std::vector<Assertion>{r};
    std::vector<BExp> cls;
    for (const auto& p : parts) {
        if (p.kind() == K::Classical) {
            cls.push_back(p.bexp());
        } else if (p.kind() == K::Pauli) {
            Row row{p.pauli(), PhasePoly::zero()};
            normalize_row(row);
            f.rows.push_back(row);
        } else {
            throw WlpError("postcondition is not a conjunction of Pauli and classical atoms: " + p.str());
        }
    }
    f.classical = cls.empty() ? BExp::tt() : cexpr::mk_and(cls);
    return f;
}

Assertion PhaseForm::to_assertion() const {
    std::vector<Assertion> parts;
    for (const auto& r : rows) parts.push_back(Assertion::atom(r.gen.xor_sign(r.phase)));
    for (const auto& c : constraints) parts.push_back(Assertion::classical(cexpr::mk_not(c.to_bexp())));
    parts.push_back(Assertion::classical(classical));
    return a_bigvee(bound, a_and(parts));
}

std::string PhaseForm::str() const { return to_assertion().str(); }

}  // namespace qecv::wlp
