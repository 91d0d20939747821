#include <doctest.h>

#include "qecv/cexpr.hpp"
#include "qecv/qprog.hpp"

using namespace qecv;
using namespace qecv::cexpr;

TEST_CASE("bitvec basics") {
    BitVec a(70), b(70);
    a.set(0);
    a.set(65);
    b.set(65);
    b.set(3);
    CHECK(a.popcount() == 2);
    CHECK((a ^ b).popcount() == 2);
    CHECK(BitVec::dot(a, b));
    CHECK((a & b).first() == 65);
    CHECK(BitVec(5).first() == 5);
    CHECK(BitVec(5).none());
}

TEST_CASE("gf2 rank, solve and nullspace") {
    auto row = [](std::string s) {
        BitVec v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v.set(i, s[i] == '1');
        return v;
    };
    std::vector<BitVec> rows{row("1100"), row("0110"), row("1010")};
    CHECK(gf2::rank(rows) == 2);
    auto c = gf2::solve(rows, row("1010"));
    REQUIRE(c);
    BitVec acc(4);
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (c->get(i)) acc ^= rows[i];
    CHECK(acc == row("1010"));
    CHECK_FALSE(gf2::solve(rows, row("0001")));
    auto ns = gf2::nullspace(rows, 4);
    CHECK(ns.size() == 2);
    for (const auto& x : ns)
        for (const auto& r : rows) CHECK_FALSE(BitVec::dot(r, x));
    auto sol = gf2::solve_system(rows, {true, false, true}, 4);
    REQUIRE(sol);
    CHECK(BitVec::dot(rows[0], *sol));
    CHECK_FALSE(BitVec::dot(rows[1], *sol));
    CHECK_FALSE(gf2::solve_system(rows, {true, true, true}, 4));
}

TEST_CASE("variable kinds follow the name prefix") {
    CHECK(kind_of("e_3") == VarKind::Error);
    CHECK(kind_of("ep_3") == VarKind::Propagated);
    CHECK(kind_of("s_1") == VarKind::Syndrome);
    CHECK(kind_of("f_x_2") == VarKind::Decoder);
    CHECK(kind_of("b") == VarKind::Param);
}

TEST_CASE("expression evaluation") {
    auto e = qprog::parse_bexp("(e_1 + e_2 + e_3) <= 1 /\\ ~(s_1 ^ s_2)");
    CHECK(holds(e, {{"e_1", 1}, {"e_2", 0}, {"e_3", 0}, {"s_1", 1}, {"s_2", 1}}));
    CHECK_FALSE(holds(e, {{"e_1", 1}, {"e_2", 1}, {"e_3", 0}, {"s_1", 0}, {"s_2", 0}}));
    CHECK_FALSE(holds(e, {{"e_1", 0}, {"e_2", 0}, {"e_3", 0}, {"s_1", 1}, {"s_2", 0}}));
    CHECK_THROWS_AS(eval_bexp(e, {}), EvalError);
    CHECK(eval_bexp(qprog::parse_bexp("2 * 3 - 1"), {}) == 5);
}

TEST_CASE("smart constructors fold constants") {
    auto x = BExp::var("x");
    CHECK(mk_and(BExp::tt(), x) == x);
    CHECK(mk_and(BExp::ff(), x).is_false());
    CHECK(mk_or(BExp::tt(), x).is_true());
    CHECK(mk_not(mk_not(x)) == x);
    CHECK(mk_and({}).is_true());
    CHECK(mk_or({}).is_false());
}

TEST_CASE("partial evaluation and substitution") {
    auto e = qprog::parse_bexp("a /\\ (b \\/ c)");
    CHECK(partial_eval(e, {{"a", 0}}).is_false());
    CHECK(partial_eval(e, {{"a", 1}, {"b", 1}}).is_true());
    CHECK(partial_eval(e, {{"a", 1}}) == mk_or(BExp::var("b"), BExp::var("c")));
    auto s = substitute(e, "a", BExp::var("d"));
    CHECK(free_vars(s) == std::set<std::string>{"b", "c", "d"});
}

TEST_CASE("phase polynomials are affine over GF(2)") {
    auto p = PhasePoly::from(true, {"x_2", "x_1", "x_2"});
    CHECK(p.atoms() == std::vector<std::string>{"x_1"});
    CHECK(p.constant_bit());
    CHECK(p.str() == "1+x_1");
    auto q = PhasePoly::atom("x_1") ^ PhasePoly::atom("b");
    CHECK((p ^ q).str() == "1+b");
    CHECK((q ^ q).is_zero());
    CHECK(q.eval({{"x_1", 1}, {"b", 0}}));
    CHECK(q.substitute("x_1", PhasePoly::atom("b")).is_zero());
    CHECK(q.partial_eval({{"b", 1}}).str() == "1+x_1");
    auto lin = as_phase(qprog::parse_bexp("a ^ ~b"));
    REQUIRE(lin);
    CHECK(lin->str() == "1+a+b");
    CHECK_FALSE(as_phase(qprog::parse_bexp("a /\\ b")));
    CHECK_THROWS_AS(substitute_phase(q, "b", qprog::parse_bexp("a /\\ c")), std::invalid_argument);
}

TEST_CASE("phase to expression round trip") {
    auto p = PhasePoly::from(true, {"a", "b"});
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Assignment m{{"a", a}, {"b", b}};
            CHECK(holds(p.to_bexp(), m) == p.eval(m));
        }
}

TEST_CASE("partial evaluation bounds sums of bits") {
    auto e = qprog::parse_bexp("a + b + c <= 1");
    CHECK(partial_eval(e, {{"a", 1}, {"b", 1}}).is_false());
    CHECK(partial_eval(e, {{"a", 1}}).op() == BExp::Op::Le);
    CHECK(partial_eval(qprog::parse_bexp("a + b <= 2"), {}).op() == BExp::Op::True);
    CHECK(partial_eval(qprog::parse_bexp("a + b == 3"), {}).is_false());
}
