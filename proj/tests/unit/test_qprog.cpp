#include <doctest.h>

#include "qecv/codes.hpp"

using namespace qecv;
using namespace qecv::qprog;

TEST_CASE("assertions print and reparse") {
    const char* cases[] = {
        "X1 X2 /\\ b == 1",
        "(-1)^(b+x_1) Z1 Z2 => ~X3",
        "bigvee s_1, s_2 in {0,1}^2 : (-1)^(s_1) Z1 Z2 /\\ (a + b) <= 1",
        "(a /\\ X1) \\/ (c + 1) == 2",
        "-ZIIZ",
    };
    for (auto c : cases) {
        auto a = parse_assertion(c);
        CHECK(parse_assertion(a.str()) == a);
    }
}

TEST_CASE("assertion constructors collapse classical parts") {
    auto a = a_and(Assertion::classical(BExp::var("a")), Assertion::classical(BExp::var("b")));
    CHECK(a.is_classical());
    CHECK(a_and(Assertion::bottom(), parse_assertion("X1")).is_false());
    CHECK(a_or(Assertion::top(), parse_assertion("X1")).is_true());
    CHECK(assertion_qubits(parse_assertion("X1 /\\ Z4")) == 4);
}

TEST_CASE("programs print and reparse") {
    auto p = parse_program(
        "for i in 1..3 do q_i *= [e_i] X end; s_1 := meas[Z1 Z2]; s_2 := meas[Z_(1+1) Z3]; "
        "x[1..3] := decode(s_1, s_2); if s_1 then q_1 *= H else skip end; q_1, q_2 *= CNOT; "
        "while b invariant: Z1 do q_1 *= X end");
    auto again = parse_program(print_program(*p));
    CHECK(stmt_equal(*p, *again));
}

TEST_CASE("desugaring unrolls loops and resolves indices") {
    auto d = desugar(parse_program("for i in 1..3 do q_i *= [e_i] X end; s_1 := meas[Z_(1+1) Z3]"));
    auto flat = flatten(d);
    REQUIRE(flat.size() == 4);
    CHECK(flat[0]->kind == Stmt::Kind::CondError);
    CHECK(flat[2]->qubit1() == 3);
    CHECK(flat[3]->target.to_term(3).str() == "Z2 Z3");
    CHECK(program_qubits(*d) == 3);
    CHECK(count_primitive(*d) == 4);
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_program("q_1 *= H;\nq_2 *= FOO");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parse_assertion("X1 /\\"), ParseError);
    CHECK_THROWS_AS(parse_bexp("a + "), ParseError);
}

TEST_CASE("code files") {
    auto c = codes::steane();
    auto back = parse_code(c.to_text(), "steane");
    CHECK(back.n == 7);
    CHECK(back.generators.size() == 6);
    CHECK(back.logical_x.size() == 1);
    CHECK_NOTHROW(back.validate());
    CHECK(back.is_css());
    auto bad = c;
    bad.generators[0] = PauliTerm::parse_sparse("Z1", 7);
    CHECK_THROWS_AS(bad.validate(), CodeError);
    CHECK(c.check_matrix().size() == 6);
}

TEST_CASE("decoder contract derived from measurements") {
    auto p = desugar(parse_program(
        "s_1 := meas[Z1 Z2]; s_2 := meas[Z2 Z3]; x[1..3] := decode(s_1, s_2); for i in 1..3 do q_i *= [x_i] X end"));
    auto spec = derive_decoder_spec(*p, 3);
    REQUIRE(spec.calls.size() == 1);
    const auto& call = spec.calls[0];
    CHECK(call.syndromes == std::vector<std::string>{"s_1", "s_2"});
    REQUIRE(call.corrections.size() == 3);
    CHECK(call.corrections[0].atom == "f_x_1");
    CHECK(call.rows[0] == std::vector<bool>{true, true, false});
    CHECK(call.rows[1] == std::vector<bool>{false, true, true});
}

TEST_CASE("hoare triples") {
    auto t = parse_triple("pre { Z1 } prog { q_1 *= X } post { -Z1 }");
    CHECK(t.pre.str() == "Z1");
    CHECK(t.post.str() == "-Z1");
}
