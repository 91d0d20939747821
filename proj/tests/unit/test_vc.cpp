#include <doctest.h>

#include <algorithm>

#include "qecv/vc.hpp"

using namespace qecv;
using namespace qecv::vc;
using cexpr::PhasePoly;
using pauli::Gate;

namespace {

PauliTerm P(const std::string& s, std::size_t n) { return PauliTerm::parse_sparse(s, n); }

Row row(const std::string& s, std::size_t n, PhasePoly ph = {}) { return {PauliSum(P(s, n)), ph}; }

codes::Scenario steane_cycle(Gate g) {
    codes::CycleOptions o;
    o.error = g;
    o.op = codes::LogicalOp::H;
    return codes::ec_cycle(codes::steane(), o);
}

const VcInstance* find(const std::vector<VcInstance>& xs, const std::string& label_part) {
    for (const auto& x : xs)
        if (x.vc.label.find(label_part) != std::string::npos) return &x;
    return nullptr;
}

}  // namespace

TEST_CASE("product decomposition") {
    std::vector<PauliTerm> basis{P("Z1 Z2", 3), P("Z2 Z3", 3), P("Z1", 3)};
    auto d = decompose_products(basis, P("Z3", 3));
    CHECK(d.factors == std::vector<std::size_t>{0, 1, 2});
    CHECK_FALSE(d.alpha);
    // Y1 Y2 = -(X1 X2)(Z1 Z2)
    auto y = decompose_products({P("X1 X2", 2), P("Z1 Z2", 2)}, P("Y1 Y2", 2));
    CHECK(y.factors == std::vector<std::size_t>{0, 1});
    CHECK(y.alpha);
    CHECK_THROWS_AS(decompose_products(basis, P("X1", 3)), VcError);
}

TEST_CASE("case classification") {
    std::vector<Row> lhs{row("Z1 Z2", 3), row("Z2 Z3", 3), row("Z1", 3)};
    CHECK(classify(lhs, {row("Z1 Z2", 3, PhasePoly::atom("s_1")), row("Z2 Z3", 3), row("Z1", 3)}) == Case::Case1);
    CHECK(classify(lhs, {row("Z1 Z3", 3), row("Z2 Z3", 3), row("Z1", 3)}) == Case::Case2);
    CHECK(classify(lhs, {row("X1 Z2", 3), row("Z2 Z3", 3), row("Z1", 3)}) == Case::Case3);
}

TEST_CASE("commuting reduction") {
    std::vector<Row> lhs{row("Z1 Z2", 3), row("Z2 Z3", 3), row("Z1", 3, PhasePoly::atom("b"))};
    auto eqs = reduce_commuting(lhs, {row("Z1 Z3", 3, PhasePoly::atom("s_1")), row("Z2 Z3", 3), row("Z1", 3, PhasePoly::atom("b"))});
    REQUIRE(eqs.size() == 3);
    CHECK(eqs[0].str() == "s_1");
    CHECK(eqs[1].is_zero());
    CHECK(eqs[2].is_zero());
}

TEST_CASE("rewrite laws") {
    auto a = qprog::parse_assertion("X1 /\\ -X1");
    CHECK(rewrite_laws(a).is_false());
    CHECK(rewrite_laws(qprog::parse_assertion("Z1 /\\ Z1")).str() == "Z1");
    CHECK(rewrite_laws(qprog::parse_assertion("(Z1 /\\ X2) \\/ (-Z1 /\\ X2)")).str() == "X2");
}

TEST_CASE("steane Y-error VCs are Case 1") {
    auto vcs = build_correction_vcs(steane_cycle(Gate::Y));
    REQUIRE(vcs.size() == 2);
    for (const auto& v : vcs) {
        CHECK(v.kind == Case::Case1);
        CHECK(v.failure.empty());
        CHECK(v.vc.sd.size() == 6);
        CHECK(std::find(v.vc.universals.begin(), v.vc.universals.end(), "b") != v.vc.universals.end());
        CHECK(v.vc.error_vars.size() == 14);
    }
}

TEST_CASE("non-Pauli errors split into instances") {
    auto sc = steane_cycle(Gate::T);
    auto inst = error_instances(sc, BExp::tt());
    CHECK(inst.size() == 15);
    for (const auto& [k, v] : inst.front()) CHECK(v == 0);
    auto vcs = build_correction_vcs(sc);
    CHECK(vcs.size() == 30);
}

TEST_CASE("T error elimination trace") {
    auto vcs = build_correction_vcs(steane_cycle(Gate::T));
    auto* v = find(vcs, "basis=X ep_5=1");
    REQUIRE(v);
    REQUIRE(v->trace);
    const auto& t = *v->trace;
    CHECK(t.pivots == std::vector<std::size_t>{0});
    auto has = [&](const std::vector<std::pair<std::size_t, std::string>>& xs, std::size_t i, const std::string& s) {
        return std::any_of(xs.begin(), xs.end(), [&](const auto& p) { return p.first == i && p.second == s; });
    };
    CHECK(has(t.updated_rhs, 2, "X1 X3 X4 X6"));
    CHECK(has(t.updated_rhs, 6, "X2 X4 X6"));
    bool t7 = false;
    for (const auto& [i, ph] : t.phase_map)
        if (i == 6) t7 = ph.str() == "b+f_x_1+f_x_2+f_x_3+f_x_4+f_x_5+f_x_6+f_x_7+s_4";
    CHECK(t7);
    REQUIRE(t.pairs.size() == 1);
    CHECK(t.pairs[0].s0 == "000000");
    CHECK(t.pairs[0].s1 == "101000");
}

TEST_CASE("H error elimination trace") {
    auto vcs = build_correction_vcs(steane_cycle(Gate::H));
    auto* v = find(vcs, "basis=Z e_7=1");
    REQUIRE(v);
    REQUIRE(v->trace);
    REQUIRE(v->trace->pairs.size() == 1);
    const auto& p = v->trace->pairs[0];
    CHECK(p.eliminated == "Z1 Z3 Z5 X7");
    CHECK(p.delta == "111111");
}

TEST_CASE("specialization fixes universals") {
    auto vcs = build_correction_vcs(steane_cycle(Gate::Y));
    auto s = vcs[0].vc.specialize({{"e_1", 1}, {"ep_1", 0}});
    CHECK(s.fixed.at("e_1") == 1);
    CHECK(std::find(s.error_vars.begin(), s.error_vars.end(), "e_1") == s.error_vars.end());
    CHECK(s.error_vars.size() == 12);
}

TEST_CASE("decoder condition") {
    auto sc = steane_cycle(Gate::Y);
    auto pf = decoder_condition(sc.decoder, sc.error_vars(), {}, true);
    auto fv = cexpr::free_vars(pf);
    CHECK(fv.count("f_x_1"));
    CHECK(fv.count("s_6"));
    CHECK(fv.count("e_1"));  // weight bound refers to the error count
}

TEST_CASE("detection VC") {
    auto v = build_detection_vc(codes::rotated_surface(3), 3);
    CHECK(v.mode == ClassicalVC::Mode::Satisfiable);
    CHECK(v.sd.size() == 8);
    CHECK(v.error_vars.size() == 18);
    auto x = build_detection_vc(codes::repetition(3), 3, {true, false});
    CHECK(x.error_vars.size() == 3);
}
