#include "qecv/codes.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qecv::codes {

using pauli::PauliTerm;
using qprog::StabilizerCode;

namespace {

PauliTerm word(std::size_t n, const std::vector<std::size_t>& qs, char l) {
    std::vector<std::pair<std::size_t, char>> ls;
    for (auto q : qs) ls.emplace_back(q, l);
    return PauliTerm::from_letters(n, ls);
}

}  // namespace

StabilizerCode repetition(std::size_t d) {
    if (d < 2) throw qprog::CodeError("repetition code needs d >= 2");
    StabilizerCode c;
    c.name = "repetition-" + std::to_string(d);
    c.n = d;
    c.k = 1;
    c.d = d;
    for (std::size_t i = 1; i < d; ++i) c.generators.push_back(word(d, {i, i + 1}, 'Z'));
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), 1);
    c.logical_x.push_back(word(d, all, 'X'));
    c.logical_z.push_back(word(d, {1}, 'Z'));
    c.validate();
    return c;
}

StabilizerCode steane() {
    StabilizerCode c;
    c.name = "steane";
    c.n = 7;
    c.k = 1;
    c.d = 3;
    const std::vector<std::vector<std::size_t>> supp = {{1, 3, 5, 7}, {2, 3, 6, 7}, {4, 5, 6, 7}};
    for (const auto& s : supp) c.generators.push_back(word(7, s, 'X'));
    for (const auto& s : supp) c.generators.push_back(word(7, s, 'Z'));
    c.logical_x.push_back(word(7, {1, 2, 3, 4, 5, 6, 7}, 'X'));
    c.logical_z.push_back(word(7, {1, 2, 3, 4, 5, 6, 7}, 'Z'));
    c.validate();
    return c;
}

StabilizerCode rotated_surface(std::size_t d) {
    if (d < 3 || d % 2 == 0) throw qprog::CodeError("rotated surface code needs an odd distance >= 3");
    StabilizerCode c;
    c.name = "surface-" + std::to_string(d);
    c.n = d * d;
    c.k = 1;
    c.d = d;
    auto q = [d](std::size_t r, std::size_t col) { return r * d + col + 1; };
    std::vector<PauliTerm> xs, zs;
    for (std::size_t r = 0; r + 1 < d; ++r)
        for (std::size_t col = 0; col + 1 < d; ++col) {
            std::vector<std::size_t> f = {q(r, col), q(r, col + 1), q(r + 1, col), q(r + 1, col + 1)};
            if ((r + col) % 2 == 0) zs.push_back(word(c.n, f, 'Z'));
            else xs.push_back(word(c.n, f, 'X'));
        }
    for (std::size_t col = 1; col + 1 < d; col += 2) zs.push_back(word(c.n, {q(0, col), q(0, col + 1)}, 'Z'));
    for (std::size_t col = 0; col + 2 < d; col += 2) zs.push_back(word(c.n, {q(d - 1, col), q(d - 1, col + 1)}, 'Z'));
    for (std::size_t r = 0; r + 1 < d; r += 2) xs.push_back(word(c.n, {q(r, 0), q(r + 1, 0)}, 'X'));
    for (std::size_t r = 1; r + 1 < d; r += 2) xs.push_back(word(c.n, {q(r, d - 1), q(r + 1, d - 1)}, 'X'));
    c.generators = xs;
    c.generators.insert(c.generators.end(), zs.begin(), zs.end());
    std::vector<std::size_t> row0, col0;
    for (std::size_t i = 0; i < d; ++i) {
        row0.push_back(q(0, i));
        col0.push_back(q(i, 0));
    }
    c.logical_x.push_back(word(c.n, row0, 'X'));
    c.logical_z.push_back(word(c.n, col0, 'Z'));
    c.validate();
    return c;
}

namespace {

PauliTerm shift(const PauliTerm& t, std::size_t n, std::size_t off) {
    PauliTerm r(n);
    r.sign = t.sign;
    for (std::size_t q = 1; q <= t.n(); ++q) r.set_letter(q + off, t.letter(q));
    return r;
}

}  // namespace

StabilizerCode direct_sum(const std::vector<StabilizerCode>& blocks) {
    if (blocks.size() == 1) return blocks[0];
    StabilizerCode c;
    for (const auto& b : blocks) {
        c.n += b.n;
        c.k += b.k;
    }
    c.d = blocks.empty() ? 0 : blocks[0].d;
    std::size_t off = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        c.d = std::min(c.d, b.d);
        if (i) c.name += "+";
        c.name += b.name;
        for (const auto& g : b.generators) c.generators.push_back(shift(g, c.n, off));
        for (const auto& l : b.logical_x) c.logical_x.push_back(shift(l, c.n, off));
        for (const auto& l : b.logical_z) c.logical_z.push_back(shift(l, c.n, off));
        off += b.n;
    }
    c.validate();
    return c;
}

StabilizerCode resolve_code(const std::string& spec, std::size_t distance) {
    if (spec == "builtin:steane" || spec == "steane") return steane();
    if (spec == "builtin:repetition" || spec == "repetition") return repetition(distance ? distance : 3);
    if (spec == "builtin:surface" || spec == "surface") return rotated_surface(distance ? distance : 3);
    if (spec.rfind("builtin:", 0) == 0) throw qprog::CodeError("unknown builtin code '" + spec + "'");
    return qprog::load_code(spec);
}

LogicalOp logical_from_name(const std::string& s) {
    if (s == "none" || s.empty()) return LogicalOp::None;
    if (s == "H") return LogicalOp::H;
    if (s == "S") return LogicalOp::S;
    if (s == "CNOT") return LogicalOp::CNOT;
    throw std::invalid_argument("unknown logical operation '" + s + "'");
}

const char* logical_name(LogicalOp op) {
    switch (op) {
        case LogicalOp::None: return "none";
        case LogicalOp::H: return "H";
        case LogicalOp::S: return "S";
        case LogicalOp::CNOT: return "CNOT";
    }
    return "?";
}

// ---------------------------------------------------------------- scenario

std::vector<std::string> Scenario::error_vars() const {
    std::vector<std::string> v;
    for (const auto& s : sites) v.push_back(s.var);
    return v;
}

BExp Scenario::budget_bexp() const {
    return cexpr::mk_le(cexpr::sum_of(error_vars()), BExp::num(static_cast<std::int64_t>(budget)));
}

std::string Scenario::program_text() const {
    std::ostringstream o;
    o << "# scenario " << name << "\n";
    o << "# code " << code.name << " [[" << code.n << "," << code.k << "," << code.d << "]]\n";
    o << "# error " << pauli::gate_name(error_gate) << ", budget " << budget << "\n";
    o << qprog::print_program(*source) << "\n";
    return o.str();
}

namespace {

struct Names {
    std::string ep, e, s, x, z;
};

Names names_for(const std::string& tag) {
    if (tag.empty()) return {"ep", "e", "s", "x", "z"};
    return {"ep_" + tag, "e_" + tag, "s_" + tag, "x_" + tag, "z_" + tag};
}

std::string range(std::size_t lo, std::size_t hi) { return std::to_string(lo) + ".." + std::to_string(hi); }

// text builder for the correction part of one block
struct BlockText {
    const StabilizerCode& code;
    std::size_t off;
    Names nm;
    std::string err;

    std::size_t lo() const { return off + 1; }
    std::size_t hi() const { return off + code.n; }

    std::string errors() const {
        return "for i in " + range(lo(), hi()) + " do q_i *= [" + nm.e + "_i] " + err + " end";
    }
    std::vector<std::string> measurements() const {
        std::vector<std::string> out;
        for (std::size_t j = 0; j < code.generators.size(); ++j) {
            const auto& g = code.generators[j];
            std::string w;
            for (std::size_t q = 1; q <= g.n(); ++q)
                if (g.letter(q) != 'I') w += (w.empty() ? "" : " ") + std::string(1, g.letter(q)) + std::to_string(q + off);
            if (g.sign.constant_bit()) w = "-" + w;
            out.push_back(nm.s + "_" + std::to_string(j + 1) + " := meas[" + w + "]");
        }
        return out;
    }
    std::vector<std::size_t> checks(bool xtype) const {
        std::vector<std::size_t> r;
        for (std::size_t j = 0; j < code.generators.size(); ++j)
            if (xtype ? code.is_x_type(j) : code.is_z_type(j)) r.push_back(j + 1);
        return r;
    }
    std::string args(const std::vector<std::size_t>& js) const {
        std::string a;
        for (auto j : js) a += (a.empty() ? "" : ", ") + nm.s + "_" + std::to_string(j);
        return a;
    }
    bool has_x() const { return !code.is_css() || !checks(false).empty(); }
    bool has_z() const { return !code.is_css() || !checks(true).empty(); }
    std::vector<std::string> decoders() const {
        std::string r = "[" + range(lo(), hi()) + "]";
        if (!code.is_css()) {
            std::vector<std::size_t> all(code.generators.size());
            std::iota(all.begin(), all.end(), 1);
            return {nm.x + r + ", " + nm.z + r + " := decode(" + args(all) + ")"};
        }
        std::vector<std::string> out;
        if (has_x()) out.push_back(nm.x + r + " := decode(" + args(checks(false)) + ")");
        if (has_z()) out.push_back(nm.z + r + " := decode(" + args(checks(true)) + ")");
        return out;
    }
    std::vector<std::string> corrections() const {
        std::vector<std::string> out;
        if (has_x()) out.push_back("for i in " + range(lo(), hi()) + " do q_i *= [" + nm.x + "_i] X end");
        if (has_z()) out.push_back("for i in " + range(lo(), hi()) + " do q_i *= [" + nm.z + "_i] Z end");
        return out;
    }
    std::vector<std::string> full_cycle() const {
        std::vector<std::string> out{errors()};
        for (auto& m : measurements()) out.push_back(m);
        for (auto& d : decoders()) out.push_back(d);
        for (auto& c : corrections()) out.push_back(c);
        return out;
    }
};

std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";\n" : "") + xs[i];
    return s;
}

std::vector<ErrorSite> collect_sites(const StmtP& prog) {
    std::vector<ErrorSite> out;
    for (const auto& s : qprog::flatten(prog)) {
        if (s->kind != qprog::Stmt::Kind::CondError || s->expr.op() != BExp::Op::Var) continue;
        auto k = cexpr::kind_of(s->expr.name());
        if (k != cexpr::VarKind::Error && k != cexpr::VarKind::Propagated) continue;
        out.push_back({s->expr.name(), static_cast<std::size_t>(s->qubit1()), k == cexpr::VarKind::Propagated});
    }
    std::stable_sort(out.begin(), out.end(), [](const ErrorSite& a, const ErrorSite& b) {
        if (a.qubit != b.qubit) return a.qubit < b.qubit;
        return a.propagated < b.propagated;
    });
    return out;
}

Scenario finish(Scenario sc, const std::string& text) {
    sc.code = direct_sum(sc.blocks);
    sc.n = sc.code.n;
    sc.source = qprog::parse_program(text);
    sc.program = qprog::desugar(sc.source);
    sc.sites = collect_sites(sc.program);
    sc.decoder = qprog::derive_decoder_spec(*sc.program, sc.n);
    if (sc.blocks.size() == 1) sc.params = {"b"};
    else
        for (std::size_t i = 1; i <= sc.blocks.size(); ++i) sc.params.push_back("b_" + std::to_string(i));
    return sc;
}

}  // namespace

Scenario ec_cycle(const StabilizerCode& code, const CycleOptions& opts) {
    Scenario sc;
    std::size_t nb = opts.op == LogicalOp::CNOT ? 2 : 1;
    sc.blocks.assign(nb, code);
    sc.error_gate = opts.error;
    sc.budget = opts.budget.value_or((code.d - 1) / 2);
    std::string err = pauli::gate_name(opts.error);
    sc.name = code.name + "(" + err + "," + logical_name(opts.op) + ")";
    if (opts.op != LogicalOp::None && !code.is_css())
        throw qprog::CodeError("transversal logical templates need a CSS code");

    std::vector<BlockText> bt;
    for (std::size_t b = 0; b < nb; ++b)
        bt.push_back({code, b * code.n, names_for(nb == 1 ? "" : "b" + std::to_string(b + 1)), err});

    std::vector<std::string> lines;
    if (opts.op != LogicalOp::None || !opts.ep_sites.empty()) {
        if (opts.ep_sites.empty()) {
            for (const auto& b : bt)
                lines.push_back("for i in " + range(b.lo(), b.hi()) + " do q_i *= [" + b.nm.ep + "_i] " + err + " end");
        } else {
            for (auto q : opts.ep_sites) {
                if (q < 1 || q > code.n) throw std::invalid_argument("propagated site out of range");
                lines.push_back("q_" + std::to_string(q) + " *= [" + bt[0].nm.ep + "_" + std::to_string(q) + "] " + err);
            }
        }
    }
    switch (opts.op) {
        case LogicalOp::None: break;
        case LogicalOp::H: lines.push_back("for i in " + range(1, code.n) + " do q_i *= H end"); break;
        case LogicalOp::S: lines.push_back("for i in " + range(1, code.n) + " do q_i *= Z; q_i *= S end"); break;
        case LogicalOp::CNOT:
            lines.push_back("for i in " + range(1, code.n) + " do q_i, q_(i+" + std::to_string(code.n) + ") *= CNOT end");
            break;
    }
    for (const auto& b : bt) lines.push_back(b.errors());
    for (const auto& b : bt)
        for (auto& m : b.measurements()) lines.push_back(m);
    for (const auto& b : bt)
        for (auto& d : b.decoders()) lines.push_back(d);
    for (const auto& b : bt)
        for (auto& c : b.corrections()) lines.push_back(c);
    return finish(std::move(sc), join(lines));
}

Scenario ghz_scenario(Gate error) {
    Scenario sc;
    StabilizerCode st = steane();
    sc.blocks.assign(3, st);
    sc.error_gate = error;
    sc.budget = 1;
    sc.name = "ghz(" + std::string(pauli::gate_name(error)) + ")";
    std::string err = pauli::gate_name(error);
    std::vector<std::string> lines{"for i in 8..14 do q_i *= H end"};
    auto round = [&](int r) {
        for (std::size_t b = 0; b < 3; ++b) {
            BlockText t{st, b * 7, names_for("r" + std::to_string(r) + "b" + std::to_string(b + 1)), err};
            for (auto& l : t.full_cycle()) lines.push_back(l);
        }
    };
    round(1);
    lines.push_back("for i in 8..14 do q_i, q_(i-7) *= CNOT end");
    lines.push_back("for i in 1..7 do q_i, q_(i+7) *= CNOT end");
    round(2);
    return finish(std::move(sc), join(lines));
}

Scenario cnot_propagated_scenario(Gate error) {
    Scenario sc;
    StabilizerCode st = steane();
    sc.blocks.assign(2, st);
    sc.error_gate = error;
    sc.budget = 1;
    std::string err = pauli::gate_name(error);
    sc.name = "cnot-propagated(" + err + ")";
    std::vector<std::string> lines{"for i in 1..7 do q_i *= [ep_i] " + err + " end",
                                   "for i in 1..7 do q_i, q_(i+7) *= CNOT end"};
    for (std::size_t b = 0; b < 2; ++b) {
        BlockText t{st, b * 7, names_for("b" + std::to_string(b + 1)), err};
        for (auto& l : t.full_cycle()) lines.push_back(l);
    }
    return finish(std::move(sc), join(lines));
}

Scenario custom_scenario(const StabilizerCode& code, const StmtP& program, std::size_t budget, const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.blocks = {code};
    sc.code = code;
    sc.n = code.n;
    sc.source = program;
    sc.program = qprog::desugar(program);
    if (qprog::program_qubits(*sc.program) > sc.n)
        throw std::invalid_argument("program addresses qubits beyond the code length");
    sc.sites = collect_sites(sc.program);
    sc.error_gate = Gate::Y;
    for (const auto& s : qprog::flatten(sc.program))
        if (s->kind == qprog::Stmt::Kind::CondError && s->expr.op() == BExp::Op::Var &&
            (cexpr::kind_of(s->expr.name()) == cexpr::VarKind::Error ||
             cexpr::kind_of(s->expr.name()) == cexpr::VarKind::Propagated)) {
            sc.error_gate = s->gate;
            break;
        }
    sc.decoder = qprog::derive_decoder_spec(*sc.program, sc.n);
    sc.budget = budget;
    sc.params = {"b"};
    return sc;
}

// ---------------------------------------------------------------- constraints

BExp locality(const Scenario& sc, const std::vector<std::size_t>& qubits) {
    std::vector<BExp> zero;
    for (const auto& s : sc.sites)
        if (std::find(qubits.begin(), qubits.end(), s.qubit) == qubits.end()) zero.push_back(cexpr::mk_not(BExp::var(s.var)));
    return cexpr::mk_and(zero);
}

std::vector<std::size_t> random_sites(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 1);
    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(count, n));
    std::sort(all.begin(), all.end());
    return all;
}

BExp discreteness(const Scenario& sc, std::size_t segments) {
    if (segments == 0) throw std::invalid_argument("need at least one segment");
    std::vector<BExp> parts;
    std::size_t n = sc.n;
    for (std::size_t k = 0; k < segments; ++k) {
        std::size_t lo = k * n / segments + 1, hi = (k + 1) * n / segments;
        std::vector<std::string> vs;
        for (const auto& s : sc.sites)
            if (s.qubit >= lo && s.qubit <= hi) vs.push_back(s.var);
        if (vs.size() > 1) parts.push_back(cexpr::mk_le(cexpr::sum_of(vs), BExp::num(1)));
    }
    return cexpr::mk_and(parts);
}

// ---------------------------------------------------------------- mutations

std::string Mutation::describe() const {
    switch (kind) {
        case Kind::ParityRow:
            return "measure check " + std::to_string(a + 1) + " times check " + std::to_string(b + 1);
        case Kind::DecoderFlip:
            return "flip decoder call " + std::to_string(a + 1) + " row " + std::to_string(b + 1) + " column " +
                   std::to_string(c + 1);
        case Kind::DropCorrection: return "drop correction statement " + std::to_string(a + 1);
    }
    return "?";
}

Scenario mutate(const Scenario& sc, const Mutation& m) {
    Scenario r = sc;
    auto stmts = qprog::flatten(sc.program);
    switch (m.kind) {
        case Mutation::Kind::ParityRow: {
            std::size_t seen = 0;
            for (auto& s : stmts) {
                if (s->kind != qprog::Stmt::Kind::Measure) continue;
                if (seen++ != m.a) continue;
                PauliTerm g = pauli::mul(sc.code.generators[m.a], sc.code.generators[m.b]);
                g.canonicalize();
                auto ns = std::make_shared<qprog::Stmt>(*qprog::mk_measure(s->var, g));
                s = ns;
                break;
            }
            break;
        }
        case Mutation::Kind::DecoderFlip: {
            auto& row = r.decoder.calls.at(m.a).rows.at(m.b);
            row.at(m.c) = !row.at(m.c);
            break;
        }
        case Mutation::Kind::DropCorrection: {
            std::size_t seen = 0;
            for (std::size_t i = 0; i < stmts.size(); ++i) {
                const auto& s = stmts[i];
                if (s->kind != qprog::Stmt::Kind::CondError || s->expr.op() != BExp::Op::Var) continue;
                auto k = cexpr::kind_of(s->expr.name());
                if (k != cexpr::VarKind::XCorr && k != cexpr::VarKind::ZCorr) continue;
                if (seen++ == m.a) {
                    stmts.erase(stmts.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
            break;
        }
    }
    r.program = qprog::mk_seq(stmts);
    r.source = r.program;
    r.name = sc.name + " [" + m.describe() + "]";
    return r;
}

std::vector<Mutation> standard_mutations(const Scenario& sc, std::size_t count) {
    std::vector<Mutation> out;
    const auto& gens = sc.code.generators;
    // measure a product of two same-type checks in place of the first
    for (std::size_t a = 0; a < gens.size() && out.size() < count; ++a)
        for (std::size_t b = 0; b < gens.size(); ++b) {
            if (a == b) continue;
            if (sc.code.is_x_type(a) != sc.code.is_x_type(b) || sc.code.is_z_type(a) != sc.code.is_z_type(b)) continue;
            out.push_back({Mutation::Kind::ParityRow, a, b, 0});
            break;
        }
    // flip one entry so that a column coincides with another column: the
    // mutated decoder confuses two qubits
    std::size_t cutoff = out.size() + (count - std::min(count, out.size())) / 2;
    for (std::size_t a = 0; a < sc.decoder.calls.size() && out.size() < cutoff; ++a) {
        const auto& call = sc.decoder.calls[a];
        std::size_t ncol = call.corrections.size();
        auto column = [&](std::size_t c) {
            std::vector<bool> v;
            for (const auto& r : call.rows) v.push_back(r[c]);
            return v;
        };
        for (std::size_t col = 0; col < ncol && out.size() < cutoff; ++col)
            for (std::size_t row = 0; row < call.rows.size(); ++row) {
                auto v = column(col);
                v[row] = !v[row];
                bool hit = false;
                for (std::size_t c2 = 0; c2 < ncol && !hit; ++c2)
                    if (c2 != col && call.corrections[c2].letter == call.corrections[col].letter && column(c2) == v) hit = true;
                if (hit) {
                    out.push_back({Mutation::Kind::DecoderFlip, a, row, col});
                    break;
                }
            }
    }
    std::size_t ncorr = 0;
    for (const auto& s : qprog::flatten(sc.program))
        if (s->kind == qprog::Stmt::Kind::CondError && s->expr.op() == BExp::Op::Var &&
            (cexpr::kind_of(s->expr.name()) == cexpr::VarKind::XCorr ||
             cexpr::kind_of(s->expr.name()) == cexpr::VarKind::ZCorr))
            ++ncorr;
    for (std::size_t i = 0; i < ncorr && out.size() < count; i += std::max<std::size_t>(1, ncorr / count + 1))
        out.push_back({Mutation::Kind::DropCorrection, i, 0, 0});
    return out;
}

}  // namespace qecv::codes
