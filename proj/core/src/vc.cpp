#include "qecv/vc.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qecv::vc {

using qprog::Assertion;
using qprog::Stmt;
using qprog::StmtP;
using K = Assertion::Kind;
using SK = Stmt::Kind;

// ---------------------------------------------------------------- ClassicalVC

namespace {

BExp eq_zero(const PhasePoly& p) { return cexpr::mk_not(p.to_bexp()); }

BExp conj_eqs(const std::vector<PhasePoly>& eqs) {
    std::vector<BExp> xs;
    for (const auto& e : eqs) xs.push_back(eq_zero(e));
    return cexpr::mk_and(xs);
}

std::string eq_str(const PhasePoly& p) {
    // "s_1 = e_1+e_3" when the leading atom is a defined variable
    if (p.is_constant()) return p.constant_bit() ? "1 = 0" : "0 = 0";
    return p.str() + " = 0";
}

}  // namespace

BExp ClassicalVC::sd_bexp() const { return conj_eqs(sd); }

BExp ClassicalVC::goal_bexp() const { return cexpr::mk_and(conj_eqs(goal_eqs), goal_extra); }

BExp ClassicalVC::hypothesis() const { return cexpr::mk_and(std::vector<BExp>{budget, user, decoder, sd_bexp()}); }

std::vector<std::string> ClassicalVC::all_vars() const {
    std::vector<std::string> v = universals;
    v.insert(v.end(), defined.begin(), defined.end());
    return v;
}

std::string ClassicalVC::dump() const {
    std::ostringstream o;
    o << "vc " << label << "\n";
    o << "  mode: " << (mode == Mode::Validity ? (exists_form ? "validity (forall-exists)" : "validity (forall)") : "satisfiable")
      << "\n";
    auto list = [&](const char* h, const std::vector<std::string>& xs) {
        o << "  " << h << ":";
        for (const auto& x : xs) o << " " << x;
        o << "\n";
    };
    list("universals", universals);
    list("defined", defined);
    if (!fixed.empty()) {
        o << "  fixed:";
        for (const auto& [k, v] : fixed) o << " " << k << "=" << v;
        o << "\n";
    }
    o << "  budget: " << budget.str() << "\n";
    o << "  constraints: " << user.str() << "\n";
    o << "  decoder: " << decoder.str() << "\n";
    o << "  syndrome definitions:\n";
    for (const auto& e : sd) o << "    " << eq_str(e) << "\n";
    o << "  goal:\n";
    for (const auto& e : goal_eqs) o << "    " << eq_str(e) << "\n";
    if (!goal_extra.is_true()) o << "    " << goal_extra.str() << "\n";
    for (const auto& n : notes) o << "  note: " << n << "\n";
    return o.str();
}

ClassicalVC ClassicalVC::specialize(const Assignment& values) const {
    ClassicalVC r = *this;
    auto keep = [&](std::vector<std::string>& xs) {
        xs.erase(std::remove_if(xs.begin(), xs.end(), [&](const std::string& x) { return values.count(x) > 0; }), xs.end());
    };
    keep(r.universals);
    keep(r.error_vars);
    keep(r.defined);
    r.budget = cexpr::partial_eval(budget, values);
    r.user = cexpr::partial_eval(user, values);
    r.decoder = cexpr::partial_eval(decoder, values);
    r.goal_extra = cexpr::partial_eval(goal_extra, values);
    for (auto& e : r.sd) e = e.partial_eval(values);
    for (auto& e : r.goal_eqs) e = e.partial_eval(values);
    for (const auto& [k, v] : values) r.fixed[k] = v;
    return r;
}

const char* case_name(Case c) {
    switch (c) {
        case Case::Case1: return "case1";
        case Case::Case2: return "case2";
        case Case::Case3: return "case3";
    }
    return "?";
}

// ---------------------------------------------------------------- decomposition

ProductDecomposition decompose_products(const std::vector<PauliTerm>& basis, const PauliTerm& target) {
    if (basis.empty()) {
        if (target.is_identity()) return {0, target.sign.constant_bit(), {}};
        throw VcError("empty basis cannot generate " + target.str());
    }
    std::vector<BitVec> cols;
    for (const auto& b : basis) cols.push_back(pauli::symplectic(b));
    auto sol = gf2::solve(cols, pauli::symplectic(target));
    if (!sol) throw VcError(target.word() + " is not in the group generated by the precondition");
    ProductDecomposition d;
    PauliTerm prod(target.n());
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (sol->get(i)) {
            d.factors.push_back(i);
            PauliTerm b = basis[i];
            b.sign = PhasePoly::zero();
            prod = pauli::mul(prod, b);
        }
    PauliTerm t = target;
    t.sign = PhasePoly::zero();
    auto diff = pauli::equal_up_to_phase(prod, t);
    if (!diff || !diff->is_constant()) throw VcError("product for " + target.word() + " is not Hermitian");
    d.alpha = diff->constant_bit();
    return d;
}

namespace {

bool plain_single(const Row& r) {
    return r.gen.is_single() && r.gen.single().hermitian() && r.gen.single().scalar.is_one() && r.gen.single().sign.is_zero();
}

void normalize(Row& r) {
    if (!r.gen.is_single()) return;
    PauliTerm t = r.gen.single();
    if (!t.hermitian() || !t.scalar.is_one()) return;
    r.phase ^= t.sign;
    t.sign = PhasePoly::zero();
    r.gen = PauliSum(t);
}

std::vector<PauliTerm> paulis(const std::vector<Row>& rows) {
    std::vector<PauliTerm> out;
    for (const auto& r : rows) out.push_back(r.gen.single());
    return out;
}

}  // namespace

Case classify(const std::vector<Row>& lhs, const std::vector<Row>& rhs) {
    bool all_single = std::all_of(rhs.begin(), rhs.end(), plain_single);
    if (!all_single) return Case::Case3;
    bool matched = std::all_of(rhs.begin(), rhs.end(), [&](const Row& r) {
        return std::any_of(lhs.begin(), lhs.end(), [&](const Row& l) { return l.gen.single().same_pauli(r.gen.single()); });
    });
    if (matched) return Case::Case1;
    // rows outside the precondition's group anticommute with one of its rows
    for (const auto& r : rhs)
        for (const auto& l : lhs)
            if (!pauli::commutes(r.gen.single(), l.gen.single())) return Case::Case3;
    return Case::Case2;
}

std::vector<PhasePoly> reduce_commuting(const std::vector<Row>& lhs, const std::vector<Row>& rhs) {
    auto basis = paulis(lhs);
    std::vector<PhasePoly> eqs;
    for (const auto& r : rhs) {
        if (!plain_single(r)) throw VcError("row " + r.gen.str() + " is not a single Pauli string");
        auto d = decompose_products(basis, r.gen.single());
        PhasePoly e = r.phase ^ PhasePoly::constant(d.alpha);
        for (auto f : d.factors) e ^= lhs[f].phase;
        eqs.push_back(e);
    }
    return eqs;
}

// ---------------------------------------------------------------- case 3

namespace {

std::string row_name(std::size_t i, std::size_t ngen) {
    return i < ngen ? "g" + std::to_string(i + 1) : "L" + std::to_string(i - ngen + 1);
}

// qubits where the (possibly multi-term) row differs from a single Pauli
std::size_t diff_count(const PauliSum& r, const PauliTerm& b) {
    std::size_t c = 0;
    for (std::size_t q = 1; q <= b.n(); ++q) {
        unsigned m = 0;
        char l = b.letter(q);
        if (l == 'X') m = 1;
        else if (l == 'Y') m = 2;
        else if (l == 'Z') m = 4;
        if (r.letters_at(q) != m) ++c;
    }
    return c;
}

bool matches(const Row& r, const Row& b) { return plain_single(r) && r.gen.single().same_pauli(b.gen.single()); }

Row row_product(const Row& a, const Row& b) {
    Row r{a.gen * b.gen, a.phase ^ b.phase};
    normalize(r);
    return r;
}

std::size_t agreement(const PauliSum& a, const PauliSum& b) {
    std::size_t c = 0;
    for (std::size_t q = 1; q <= a.n(); ++q) {
        unsigned m = a.letters_at(q);
        if (m != 0 && m == b.letters_at(q)) ++c;
    }
    return c;
}

std::size_t overlap(const PauliSum& a, const PauliSum& b) {
    auto sa = a.support(), sb = b.support();
    std::size_t c = 0;
    for (auto q : sa)
        if (std::find(sb.begin(), sb.end(), q) != sb.end()) ++c;
    return c;
}

std::string bits(const BitVec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += v.get(i) ? '1' : '0';
    return s;
}

}  // namespace

Elimination eliminate_noncommuting(const std::vector<Row>& lhs, const std::vector<Row>& rhs,
                                   const std::vector<Row>& reference, std::size_t ngen,
                                   const std::vector<std::string>& syndromes, std::size_t cap) {
    if (rhs.size() != lhs.size() || reference.size() != lhs.size())
        throw VcError("row counts of precondition, instance and reference differ");
    Elimination el;
    el.trace.ngen = ngen;
    auto basis = paulis(lhs);

    // realign the precondition with the error-free rows
    std::vector<Row> bp;
    for (const auto& ref : reference) {
        if (!ref.gen.is_single()) throw VcError("reference row " + ref.gen.str() + " is not a Pauli string");
        PauliTerm t = ref.gen.single();
        t.sign = PhasePoly::zero();
        auto d = decompose_products(basis, t);
        PhasePoly psi = PhasePoly::constant(d.alpha);
        for (auto f : d.factors) psi ^= lhs[f].phase;
        bp.push_back({PauliSum(t), psi});
    }
    std::vector<Row> r = rhs;
    for (auto& x : r) normalize(x);

    auto collect = [&](std::vector<std::size_t>& g, std::vector<std::size_t>& l) {
        g.clear();
        l.clear();
        for (std::size_t i = 0; i < r.size(); ++i)
            if (!matches(r[i], bp[i])) (i < ngen ? g : l).push_back(i);
    };
    std::vector<std::size_t> G, L;
    collect(G, L);
    std::set<std::size_t> touched;
    auto settled = [&]() {
        if (!L.empty()) return false;
        std::set<std::size_t> seen;
        for (auto i : G) {
            if (diff_count(r[i].gen, bp[i].gen.single()) != 1) return false;
            // residual rows must differ on distinct qubits
            for (std::size_t q = 1; q <= bp[i].gen.n(); ++q)
                if (r[i].gen.letters_at(q) != bp[i].gen.letters_at(q) && !seen.insert(q).second) return false;
        }
        return true;
    };
    std::size_t iter = 0;
    while (!settled()) {
        if (G.empty()) throw VcError("logical rows differ but no generator row is available as a pivot");
        if (iter++ >= cap) throw VcError("pivot loop exceeded " + std::to_string(cap) + " iterations");
        std::vector<std::size_t> GL = G;
        GL.insert(GL.end(), L.begin(), L.end());
        std::size_t best = G.front();
        std::pair<std::size_t, std::size_t> best_key{0, 0};
        bool first = true;
        for (auto p : G) {
            std::size_t agree = 0, inter = 0;
            for (auto l : L) agree += agreement(r[p].gen, r[l].gen);
            for (auto j : GL)
                if (j != p) inter += overlap(r[p].gen, r[j].gen);
            std::pair<std::size_t, std::size_t> key{agree, inter};
            if (first || key > best_key) {
                best = p;
                best_key = key;
                first = false;
            }
        }
        el.trace.pivots.push_back(best);
        for (auto j : GL) {
            if (j == best) continue;
            r[j] = row_product(r[j], r[best]);
            bp[j] = row_product(bp[j], bp[best]);
            touched.insert(j);
        }
        collect(G, L);
    }
    for (auto j : touched) {
        el.trace.updated_rhs.push_back({j, r[j].gen.str()});
        el.trace.updated_lhs.push_back({j, bp[j].gen.str()});
    }
    for (std::size_t j = 0; j < r.size(); ++j)
        if (touched.count(j) || std::find(G.begin(), G.end(), j) != G.end()) el.trace.phase_map.push_back({j, r[j].phase});

    // step (c): pair branches that differ only in the residual row's sign
    el.dropped.assign(r.size(), false);
    // columns follow the generator rows that carry each syndrome
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < ngen; ++j)
        for (const auto& a : reference[j].phase.atoms())
            if (std::find(syndromes.begin(), syndromes.end(), a) != syndromes.end() &&
                std::find(cols.begin(), cols.end(), a) == cols.end())
                cols.push_back(a);
    for (const auto& a : syndromes)
        if (std::find(cols.begin(), cols.end(), a) == cols.end()) cols.push_back(a);
    std::map<std::string, std::size_t> scol;
    for (std::size_t k = 0; k < cols.size(); ++k) scol[cols[k]] = k;
    el.trace.columns = cols;
    auto coeffs = [&](const PhasePoly& p, bool& rhs_bit) {
        BitVec v(syndromes.size());
        rhs_bit = p.constant_bit();
        for (const auto& a : p.atoms()) {
            auto it = scol.find(a);
            if (it != scol.end()) v.flip(it->second);
        }
        return v;
    };
    for (auto p : G) {
        for (std::size_t j = 0; j < r.size(); ++j)
            if (j != p && !pauli::commutes(r[p].gen, r[j].gen))
                throw VcError("residual row " + row_name(p, ngen) + " does not commute with " + row_name(j, ngen));
        for (const auto& a : r[p].phase.atoms())
            if (cexpr::kind_of(a) == cexpr::VarKind::Decoder)
                throw VcError("phase of residual row " + row_name(p, ngen) + " depends on decoder output " + a);
        std::vector<BitVec> M;
        std::vector<bool> rhs_bits;
        for (std::size_t j = 0; j < ngen; ++j) {
            if (j == p || el.dropped[j]) continue;
            bool c = false;
            M.push_back(coeffs(r[j].phase ^ bp[j].phase, c));
            rhs_bits.push_back(c);
        }
        bool cp_const = false;
        BitVec cp = coeffs(r[p].phase, cp_const);
        if (cp.none()) throw VcError("residual row " + row_name(p, ngen) + " carries no syndrome in its phase");
        auto ns = gf2::nullspace(M, syndromes.size());
        std::optional<BitVec> delta;
        if (ns.size() <= 16) {
            for (std::uint32_t mask = 1; mask < (1u << ns.size()); ++mask) {
                BitVec v(syndromes.size());
                for (std::size_t b = 0; b < ns.size(); ++b)
                    if (mask >> b & 1u) v ^= ns[b];
                if (!BitVec::dot(v, cp)) continue;
                if (!delta || v.popcount() < delta->popcount()) delta = v;
            }
        } else {
            for (const auto& v : ns)
                if (BitVec::dot(v, cp)) {
                    delta = v;
                    break;
                }
        }
        if (!delta) throw VcError("no syndrome pair isolates residual row " + row_name(p, ngen));
        auto s0 = gf2::solve_system(M, rhs_bits, syndromes.size());
        if (!s0) throw VcError("syndrome definitions are inconsistent around row " + row_name(p, ngen));
        el.trace.pairs.push_back({p, r[p].gen.str(), bits(*s0), bits(*s0 ^ *delta), bits(*delta)});
        r[p] = {bp[p].gen, bp[p].phase};
        el.dropped[p] = true;
    }
    for (std::size_t j = 0; j < r.size(); ++j)
        if (!el.dropped[j] && !matches(r[j], bp[j]))
            throw VcError("row " + row_name(j, ngen) + " still differs after elimination");
    el.lhs = bp;
    el.rhs = r;
    return el;
}

std::string Case3Trace::str() const {
    std::ostringstream o;
    o << "pivots:";
    for (auto p : pivots) o << " " << row_name(p, ngen);
    o << "\n";
    for (std::size_t k = 0; k < updated_rhs.size(); ++k) {
        auto j = updated_rhs[k].first;
        o << "  " << row_name(j, ngen) << "'' = " << updated_rhs[k].second << "   (pre: " << updated_lhs[k].second
          << ")\n";
    }
    for (const auto& [j, ph] : phase_map) o << "  t_" << j + 1 << " = " << ph.str() << "\n";
    if (!pairs.empty()) {
        o << "  syndrome order:";
        for (const auto& c : columns) o << " " << c;
        o << "\n";
    }
    for (const auto& bpair : pairs)
        o << "  pair on " << row_name(bpair.row, ngen) << ": s = " << bpair.s0 << " / " << bpair.s1 << " (delta "
          << bpair.delta << ")\n";
    return o.str();
}

// ---------------------------------------------------------------- rewrite laws

namespace {

std::optional<std::pair<PauliSum, PhasePoly>> signed_atom(const Assertion& a) {
    if (a.kind() != K::Pauli || !a.pauli().is_single()) return std::nullopt;
    PauliTerm t = a.pauli().single();
    if (!t.hermitian() || !t.scalar.is_one()) return std::nullopt;
    PhasePoly s = t.sign;
    t.sign = PhasePoly::zero();
    return std::make_pair(PauliSum(t), s);
}

// a and b are complementary: ~P vs P, or -P vs P with matching phases
bool complementary(const Assertion& a, const Assertion& b) {
    if (a.kind() == K::Not && a.args()[0] == b) return true;
    if (b.kind() == K::Not && b.args()[0] == a) return true;
    auto sa = signed_atom(a), sb = signed_atom(b);
    return sa && sb && sa->first == sb->first && (sa->second ^ sb->second) == PhasePoly::one();
}

std::vector<Assertion> conjuncts(const Assertion& a) {
    return a.kind() == K::And ? a.args() : std::vector<Assertion>{a};
}

const PauliSum* pauli_of(const Assertion& a) {
    if (a.kind() == K::Pauli) return &a.pauli();
    if (a.kind() == K::Not && a.args()[0].kind() == K::Pauli) return &a.args()[0].pauli();
    return nullptr;
}

bool commutes_with_all(const Assertion& p, const std::vector<Assertion>& rest) {
    const PauliSum* pp = pauli_of(p);
    if (!pp) return true;
    for (const auto& x : rest) {
        const PauliSum* q = pauli_of(x);
        if (q && !pauli::commutes(*pp, *q)) return false;
        if (!q && x.kind() != K::Classical) return false;
    }
    return true;
}

Assertion rewrite_once(const Assertion& a) {
    switch (a.kind()) {
        case K::Classical:
        case K::Pauli: return a;
        case K::Not: return qprog::a_not(rewrite_once(a.args()[0]));
        case K::Imp: return qprog::a_imp(rewrite_once(a.args()[0]), rewrite_once(a.args()[1]));
        case K::BigVee: return qprog::a_bigvee(a.bound(), rewrite_once(a.args()[0]));
        case K::And: {
            std::vector<Assertion> xs;
            for (const auto& x : a.args()) {
                Assertion y = rewrite_once(x);
                if (std::find(xs.begin(), xs.end(), y) == xs.end()) xs.push_back(y);
            }
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = i + 1; j < xs.size(); ++j)
                    if (complementary(xs[i], xs[j]) && (signed_atom(xs[i]) || signed_atom(xs[j])) &&
                        xs[i].kind() != K::Not && xs[j].kind() != K::Not)
                        return Assertion::bottom();
            return qprog::a_and(xs);
        }
        case K::Or: {
            std::vector<Assertion> xs;
            for (const auto& x : a.args()) xs.push_back(rewrite_once(x));
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = i + 1; j < xs.size(); ++j) {
                    auto ci = conjuncts(xs[i]), cj = conjuncts(xs[j]);
                    if (ci.size() != cj.size()) continue;
                    // find the unique differing conjunct
                    std::vector<std::size_t> di, dj;
                    for (std::size_t u = 0; u < ci.size(); ++u)
                        if (std::find(cj.begin(), cj.end(), ci[u]) == cj.end()) di.push_back(u);
                    for (std::size_t u = 0; u < cj.size(); ++u)
                        if (std::find(ci.begin(), ci.end(), cj[u]) == ci.end()) dj.push_back(u);
                    if (di.size() != 1 || dj.size() != 1) continue;
                    if (!complementary(ci[di[0]], cj[dj[0]])) continue;
                    std::vector<Assertion> rest;
                    for (std::size_t u = 0; u < ci.size(); ++u)
                        if (u != di[0]) rest.push_back(ci[u]);
                    if (!commutes_with_all(ci[di[0]], rest)) continue;
                    std::vector<Assertion> ys;
                    for (std::size_t u = 0; u < xs.size(); ++u)
                        if (u != i && u != j) ys.push_back(xs[u]);
                    ys.insert(ys.begin() + static_cast<std::ptrdiff_t>(i), qprog::a_and(rest));
                    return qprog::a_or(ys);
                }
            return qprog::a_or(xs);
        }
    }
    return a;
}

}  // namespace

Assertion rewrite_laws(const Assertion& a) {
    Assertion cur = a;
    for (int i = 0; i < 1000; ++i) {
        Assertion nxt = rewrite_once(cur);
        if (nxt == cur) return cur;
        cur = nxt;
    }
    return cur;
}

// ---------------------------------------------------------------- builders

std::vector<Row> lhs_rows(const codes::Scenario& sc, char basis) {
    std::vector<Row> rows;
    for (const auto& g : sc.code.generators) {
        PauliTerm t = g;
        PhasePoly s = t.sign;
        t.sign = PhasePoly::zero();
        rows.push_back({PauliSum(t), s});
    }
    const auto& ls = basis == 'X' ? sc.code.logical_x : sc.code.logical_z;
    for (std::size_t j = 0; j < ls.size(); ++j) {
        PauliTerm t = ls[j];
        PhasePoly s = t.sign;
        t.sign = PhasePoly::zero();
        std::string p = ls.size() == sc.params.size() ? sc.params[j] : "b_" + std::to_string(j + 1);
        rows.push_back({PauliSum(t), s ^ PhasePoly::atom(p)});
    }
    return rows;
}

std::vector<Row> post_rows(const codes::Scenario& sc, char basis) {
    std::vector<Row> rows = lhs_rows(sc, basis);
    for (const auto& s : qprog::flatten(sc.program)) {
        if (s->kind != SK::Unitary1 && s->kind != SK::Unitary2) continue;
        auto i = static_cast<std::size_t>(s->qubit1());
        auto j = s->kind == SK::Unitary2 ? static_cast<std::size_t>(s->qubit2()) : 0;
        for (auto& r : rows) {
            r.gen = pauli::conjugate_forward(s->gate, i, j, r.gen);
            normalize(r);
        }
    }
    for (const auto& r : rows)
        if (!plain_single(r)) throw VcError("ideal unitary maps a row outside the Pauli group: " + r.gen.str());
    return rows;
}

BExp decoder_condition(const qprog::DecoderSpec& spec, const std::vector<std::string>& error_vars,
                       const Assignment& fixed, bool weight_bound) {
    std::vector<BExp> parts;
    std::int64_t fixed_weight = 0;
    for (const auto& [k, v] : fixed) {
        auto kd = cexpr::kind_of(k);
        if ((kd == cexpr::VarKind::Error || kd == cexpr::VarKind::Propagated) && v) ++fixed_weight;
    }
    for (const auto& call : spec.calls) {
        for (std::size_t j = 0; j < call.syndromes.size(); ++j) {
            std::vector<std::string> atoms;
            for (std::size_t c = 0; c < call.corrections.size(); ++c)
                if (call.rows[j][c]) atoms.push_back(call.corrections[c].atom);
            std::sort(atoms.begin(), atoms.end());
            PhasePoly p = PhasePoly::from(false, atoms) ^ PhasePoly::atom(call.syndromes[j]);
            parts.push_back(eq_zero(p));
        }
        if (!weight_bound || !spec.weight_bound) continue;
        std::vector<std::string> fams;
        for (const auto& c : call.corrections)
            if (std::find(fams.begin(), fams.end(), c.family) == fams.end()) fams.push_back(c.family);
        for (const auto& fam : fams) {
            std::vector<std::string> atoms;
            for (const auto& c : call.corrections)
                if (c.family == fam) atoms.push_back(c.atom);
            BExp bound = cexpr::sum_of(error_vars);
            if (fixed_weight) bound = cexpr::mk_add({bound, BExp::num(fixed_weight)});
            parts.push_back(cexpr::mk_le(cexpr::sum_of(atoms), bound));
        }
    }
    return cexpr::mk_and(parts);
}

StmtP specialize_program(const StmtP& prog, const Assignment& values) {
    const Stmt& s = *prog;
    switch (s.kind) {
        case SK::Seq: {
            std::vector<StmtP> xs;
            for (const auto& c : s.body) xs.push_back(specialize_program(c, values));
            return qprog::mk_seq(xs);
        }
        case SK::CondError: {
            BExp g = cexpr::partial_eval(s.expr, values);
            if (g == s.expr) return prog;
            auto r = std::make_shared<Stmt>(s);
            r->expr = g;
            return r;
        }
        case SK::Assign: {
            auto r = std::make_shared<Stmt>(s);
            r->expr = cexpr::partial_eval(s.expr, values);
            return r;
        }
        default: return prog;
    }
}

std::vector<Assignment> error_instances(const codes::Scenario& sc, const BExp& user) {
    auto evs = sc.error_vars();
    std::vector<Assignment> out;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t left) {
        Assignment a;
        for (const auto& v : evs) a[v] = 0;
        for (auto i : pick) a[evs[i]] = 1;
        if (!cexpr::partial_eval(user, a).is_false()) out.push_back(a);
        if (left == 0) return;
        for (std::size_t i = start; i < evs.size(); ++i) {
            pick.push_back(i);
            rec(i + 1, left - 1);
            pick.pop_back();
        }
    };
    rec(0, sc.budget);
    std::stable_sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
        auto w = [](const Assignment& m) {
            std::size_t c = 0;
            for (const auto& [k, v] : m) c += v != 0;
            return c;
        };
        return w(a) < w(b);
    });
    return out;
}

namespace {

// Row-echelon by variable rank; rows led by a syndrome become definitions.
void extract(const std::vector<PhasePoly>& eqs, const std::vector<std::string>& order, ClassicalVC& vc) {
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i + 1;
    auto top = [&](const PhasePoly& p) -> std::string {
        std::string best;
        std::size_t br = 0;
        for (const auto& a : p.atoms()) {
            auto it = rank.find(a);
            if (it != rank.end() && it->second > br) {
                br = it->second;
                best = a;
            }
        }
        return best;
    };
    std::map<std::string, PhasePoly> pivots;
    std::vector<std::string> pivot_order;
    for (PhasePoly e : eqs) {
        while (true) {
            std::string t = top(e);
            if (t.empty()) break;
            auto it = pivots.find(t);
            if (it == pivots.end()) {
                pivots[t] = e;
                pivot_order.push_back(t);
                break;
            }
            e ^= it->second;
        }
    }
    // keep definitions in definition order
    std::vector<std::string> by_rank = pivot_order;
    std::sort(by_rank.begin(), by_rank.end(), [&](const std::string& a, const std::string& b) { return rank[a] < rank[b]; });
    for (const auto& t : by_rank)
        if (cexpr::kind_of(t) == cexpr::VarKind::Syndrome) vc.sd.push_back(pivots[t]);
    // Under the definitions the original system is equivalent to the
    // echelon goal rows; the original rows read better.
    for (const auto& e : eqs)
        if (!e.is_zero() && std::find(vc.sd.begin(), vc.sd.end(), e) == vc.sd.end() &&
            std::find(vc.goal_eqs.begin(), vc.goal_eqs.end(), e) == vc.goal_eqs.end())
            vc.goal_eqs.push_back(e);
}

std::string instance_label(const Assignment& inst) {
    std::string s;
    for (const auto& [k, v] : inst)
        if (v) s += (s.empty() ? "" : ",") + k + "=1";
    return s.empty() ? "no-error" : s;
}

bool needs_instances(const codes::Scenario& sc) {
    for (const auto& s : qprog::flatten(sc.program))
        if (s->kind == SK::CondError && !pauli::is_pauli_gate(s->gate)) {
            auto g = cexpr::as_phase(s->expr);
            if (!g || !g->is_constant()) return true;
        }
    return false;
}

void finish_vars(ClassicalVC& vc, const codes::Scenario& sc, const wlp::PhaseForm& pf, const Assignment& fixed) {
    std::set<std::string> all;
    cexpr::free_vars(vc.budget, all);
    cexpr::free_vars(vc.user, all);
    cexpr::free_vars(vc.decoder, all);
    for (const auto& e : vc.sd)
        for (const auto& a : e.atoms()) all.insert(a);
    for (const auto& e : vc.goal_eqs)
        for (const auto& a : e.atoms()) all.insert(a);
    for (const auto& v : sc.error_vars()) all.insert(v);
    for (const auto& v : sc.params) all.insert(v);
    for (const auto& [k, v] : fixed) all.erase(k);

    std::set<std::string> def;
    for (const auto& v : pf.order)
        if (all.count(v)) {
            vc.defined.push_back(v);
            def.insert(v);
        }
    for (const auto& v : all) {
        auto kd = cexpr::kind_of(v);
        if (!def.count(v) && (kd == cexpr::VarKind::Syndrome || kd == cexpr::VarKind::Decoder)) {
            vc.defined.push_back(v);
            def.insert(v);
        }
    }
    for (const auto& v : sc.error_vars())
        if (all.count(v)) {
            vc.universals.push_back(v);
            vc.error_vars.push_back(v);
        }
    for (const auto& v : sc.params)
        if (all.count(v) && std::find(vc.universals.begin(), vc.universals.end(), v) == vc.universals.end())
            vc.universals.push_back(v);
    for (const auto& v : all)
        if (!def.count(v) && std::find(vc.universals.begin(), vc.universals.end(), v) == vc.universals.end())
            vc.universals.push_back(v);
}

VcInstance build_one(const codes::Scenario& sc, const VcOptions& opts, char basis, const std::vector<Row>& lhs,
                     const wlp::PhaseForm& pf, const std::vector<Row>* reference, const Assignment& fixed,
                     const std::string& label) {
    VcInstance inst;
    ClassicalVC& vc = inst.vc;
    vc.label = sc.name + " basis=" + std::string(1, basis) + (fixed.empty() ? "" : " " + label);
    vc.exists_form = opts.exists_form;
    vc.fixed = fixed;
    std::vector<std::string> free_errors;
    for (const auto& v : sc.error_vars())
        if (!fixed.count(v)) free_errors.push_back(v);
    vc.budget = fixed.empty() ? sc.budget_bexp() : cexpr::partial_eval(sc.budget_bexp(), fixed);
    vc.user = cexpr::partial_eval(opts.user, fixed);
    vc.decoder = decoder_condition(sc.decoder, free_errors, fixed, opts.weight_bound);

    std::vector<PhasePoly> eqs;
    inst.kind = classify(lhs, pf.rows);
    try {
        if (inst.kind != Case::Case3) {
            eqs = reduce_commuting(lhs, pf.rows);
        } else {
            if (!reference) throw VcError("non-commuting rows without a reference instance");
            std::size_t ngen = sc.code.generators.size();
            std::size_t cap = opts.case3_cap ? opts.case3_cap : ngen * ngen;
            Elimination el = eliminate_noncommuting(lhs, pf.rows, *reference, ngen, pf.bound, cap);
            for (std::size_t j = 0; j < el.rhs.size(); ++j)
                if (!el.dropped[j]) eqs.push_back(el.rhs[j].phase ^ el.lhs[j].phase);
            inst.trace = el.trace;
        }
    } catch (const VcError& e) {
        if (inst.kind == Case::Case3) {
            inst.failure = e.what();
            vc.notes.push_back(std::string("elimination failed: ") + e.what());
        } else {
            // a row outside the precondition's group can never be implied
            vc.notes.push_back(e.what());
            eqs.push_back(PhasePoly::one());
        }
    }
    for (const auto& c : pf.constraints) eqs.push_back(c);
    if (!pf.classical.is_true()) vc.goal_extra = pf.classical;
    for (auto& e : eqs) e = e.partial_eval(fixed);
    extract(eqs, pf.order, vc);
    finish_vars(vc, sc, pf, fixed);
    return inst;
}

}  // namespace

std::vector<VcInstance> build_correction_vcs(const codes::Scenario& sc, const VcOptions& opts) {
    std::vector<VcInstance> out;
    bool split = needs_instances(sc);
    std::vector<Assignment> instances;
    if (split) instances = error_instances(sc, opts.user);
    for (char basis : opts.bases) {
        auto lhs = lhs_rows(sc, basis);
        auto post = post_rows(sc, basis);
        std::vector<std::pair<PauliTerm, PhasePoly>> pr;
        for (const auto& r : post) pr.push_back({r.gen.single(), r.phase});
        wlp::PhaseForm postf = wlp::phaseform_from_rows(sc.n, pr);
        if (!split) {
            auto pf = wlp::wlp_phaseform(sc.program, postf);
            out.push_back(build_one(sc, opts, basis, lhs, pf, nullptr, {}, ""));
            continue;
        }
        Assignment zero;
        for (const auto& v : sc.error_vars()) zero[v] = 0;
        auto ref = wlp::wlp_phaseform(specialize_program(sc.program, zero), postf);
        for (const auto& inst : instances) {
            auto pf = wlp::wlp_phaseform(specialize_program(sc.program, inst), postf);
            out.push_back(build_one(sc, opts, basis, lhs, pf, &ref.rows, inst, instance_label(inst)));
        }
    }
    return out;
}

ClassicalVC build_detection_vc(const qprog::StabilizerCode& code, std::size_t dt, const DetectionOptions& opts) {
    ClassicalVC vc;
    vc.mode = ClassicalVC::Mode::Satisfiable;
    vc.label = code.name + " detection d_t=" + std::to_string(dt);
    std::vector<BExp> weight_terms;
    std::vector<std::string> ex(code.n + 1), ez(code.n + 1);
    for (std::size_t q = 1; q <= code.n; ++q) {
        std::vector<BExp> on;
        if (opts.x_errors) {
            ex[q] = "ex_" + std::to_string(q);
            vc.universals.push_back(ex[q]);
            vc.error_vars.push_back(ex[q]);
            on.push_back(BExp::var(ex[q]));
        }
        if (opts.z_errors) {
            ez[q] = "ez_" + std::to_string(q);
            vc.universals.push_back(ez[q]);
            vc.error_vars.push_back(ez[q]);
            on.push_back(BExp::var(ez[q]));
        }
        weight_terms.push_back(cexpr::mk_or(on));
    }
    // parity of anticommutation between an error pattern and a Pauli string
    auto parity = [&](const PauliTerm& p) {
        std::vector<std::string> atoms;
        for (std::size_t q = 1; q <= code.n; ++q) {
            char l = p.letter(q);
            bool needs_ez = l == 'X' || l == 'Y', needs_ex = l == 'Z' || l == 'Y';
            if (needs_ez && !ez[q].empty()) atoms.push_back(ez[q]);
            if (needs_ex && !ex[q].empty()) atoms.push_back(ex[q]);
        }
        std::sort(atoms.begin(), atoms.end());
        return PhasePoly::from(false, atoms);
    };
    BExp w = cexpr::mk_add(weight_terms);
    vc.budget = cexpr::mk_and(cexpr::mk_le(BExp::num(1), w), cexpr::mk_le(w, BExp::num(static_cast<std::int64_t>(dt) - 1)));
    for (const auto& g : code.generators) vc.sd.push_back(parity(g));
    std::vector<BExp> flips;
    for (const auto& l : code.logical_x) flips.push_back(parity(l).to_bexp());
    for (const auto& l : code.logical_z) flips.push_back(parity(l).to_bexp());
    vc.goal_extra = cexpr::mk_or(flips);
    return vc;
}

}  // namespace qecv::vc
