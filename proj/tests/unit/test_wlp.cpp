#include <doctest.h>

#include "qecv/oracle.hpp"
#include "qecv/wlp.hpp"

using namespace qecv;
using namespace qecv::qprog;

TEST_CASE("repetition fragment") {
    auto p = desugar(parse_program("for i in 1..3 do q_i *= [x_i] X end"));
    auto post = parse_assertion("Z1 Z2 /\\ Z2 Z3 /\\ (-1)^(b) Z1");
    auto golden = parse_assertion("(-1)^(x_2+x_1) Z1 Z2 /\\ (-1)^(x_3+x_2) Z2 Z3 /\\ (-1)^(b+x_1) Z1");
    CHECK(wlp::wlp_pre(p, post, 3).str() == golden.str());
    auto pf = wlp::wlp_phaseform(p, wlp::phaseform_from_assertion(post, 3));
    CHECK(pf.to_assertion().str() == golden.str());
}

TEST_CASE("assignment substitutes") {
    auto p = parse_program("x := a ^ b");
    auto pre = wlp::wlp_pre(p, parse_assertion("(-1)^(x) Z1"), 1);
    CHECK(pre.str() == "(-1)^(a+b) Z1");
}

TEST_CASE("measurement splits on the outcome") {
    auto p = desugar(parse_program("x := meas[Z2]; if x then q_2 *= X else skip end"));
    auto r = wlp::wlp(p, parse_assertion("X1 /\\ Z2"), 2);
    // both branches end in +Z2, so the precondition is just X1
    auto s = oracle::assertion_subspace(r.pre, {}, 2);
    CHECK(s == oracle::assertion_subspace(parse_assertion("X1"), {}, 2));
}

TEST_CASE("unitaries conjugate the postcondition") {
    auto p = parse_program("q_1 *= H; q_1, q_2 *= CNOT");
    CHECK(wlp::wlp_pre(p, parse_assertion("Z2"), 2).str() == "X1 Z2");
    CHECK(wlp::conjugate_assertion(parse_assertion("X1"), Gate::S, 1).str() == "-Y1");
}

TEST_CASE("guards flip anticommuting terms") {
    auto a = wlp::guard_assertion(parse_assertion("Z1 Z2 /\\ X1"), Gate::X, 1, cexpr::PhasePoly::atom("e_1"));
    CHECK(a.str() == "(-1)^(e_1) Z1 Z2 /\\ X1");
}

TEST_CASE("phase form of a decode block") {
    auto p = desugar(parse_program(
        "s_1 := meas[Z1 Z2]; s_2 := meas[Z2 Z3]; x[1..3] := decode(s_1, s_2); for i in 1..3 do q_i *= [x_i] X end"));
    auto pf = wlp::wlp_phaseform(p, wlp::phaseform_from_assertion(parse_assertion("Z1 Z2 /\\ Z2 Z3 /\\ (-1)^(b) Z1"), 3));
    CHECK(pf.bound == std::vector<std::string>{"s_1", "s_2"});
    REQUIRE(pf.rows.size() == 3);
    CHECK(pf.rows[0].phase.str() == "s_1");
    CHECK(pf.rows[2].phase.str() == "b+f_x_1");
    CHECK(pf.constraints.size() == 2);
}

TEST_CASE("phase form rejects unsupported statements") {
    auto post = wlp::phaseform_from_assertion(parse_assertion("Z1"), 1);
    CHECK_THROWS_AS(wlp::wlp_phaseform(parse_program("s_1 := meas[X1]"), post), wlp::WlpError);
}

TEST_CASE("loop obligations") {
    auto obs = wlp::check_while_obligations(parse_assertion("Z1"), BExp::var("b"), parse_program("q_1 *= Z"),
                                            parse_assertion("Z1"), 1);
    CHECK(obs.size() == 2);
    for (const auto& o : obs) CHECK(oracle::entails(o.lhs, o.rhs, {{"b", 1}}, 1));
}
