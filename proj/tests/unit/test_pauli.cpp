#include <doctest.h>

#include "qecv/oracle.hpp"
#include "qecv/pauli.hpp"

using namespace qecv;
using namespace qecv::pauli;

namespace {
PauliTerm P(const std::string& s, std::size_t n) { return PauliTerm::parse_sparse(s, n); }
}  // namespace

TEST_CASE("scalar ring stays canonical") {
    SRing h = SRing::inv_sqrt2();
    CHECK(h * h == SRing(1, 0, 1));
    CHECK((h + h) == SRing(0, 1, 0));
    CHECK(SRing(2, 2, 1) == SRing(1, 1, 0));
    CHECK(SRing(-1).sign() < 0);
    CHECK(h.to_double() == doctest::Approx(0.70710678));
}

TEST_CASE("products of Pauli terms") {
    auto x = P("X1", 1), y = P("Y1", 1), z = P("Z1", 1);
    auto xy = mul(x, y);
    CHECK(xy.same_pauli(z));
    CHECK(xy.iexp == 1);
    auto yx = mul(y, x);
    CHECK(yx.same_pauli(z));
    CHECK(yx.sign.constant_bit());
    CHECK(mul(x, x).is_identity());
    CHECK(commutes(P("X1 X2", 2), P("Z1 Z2", 2)));
    CHECK_FALSE(commutes(P("X1", 2), P("Z1 Z2", 2)));
}

TEST_CASE("parsing and printing") {
    auto t = P("-X1 Z3", 3);
    CHECK(t.word() == "X1 Z3");
    CHECK(t.dense() == "XIZ");
    CHECK(t.str() == "-X1 Z3");
    CHECK(PauliTerm::parse_dense("-ZIIZ").str() == "-Z1 Z4");
    CHECK(t.weight() == 2);
    CHECK(t.support() == std::vector<std::size_t>{1, 3});
}

TEST_CASE("phase difference of equal strings") {
    auto a = P("X1 X2", 2);
    auto b = a;
    b.sign = cexpr::PhasePoly::atom("s_1");
    auto d = equal_up_to_phase(a, b);
    REQUIRE(d);
    CHECK(d->str() == "s_1");
    CHECK_FALSE(equal_up_to_phase(a, P("X1", 2)));
}

TEST_CASE("conjugation table entries") {
    CHECK(conjugate(Gate::H, 1, PauliSum(P("X1", 1))).str() == "Z1");
    CHECK(conjugate(Gate::H, 1, PauliSum(P("Y1", 1))).str() == "-Y1");
    CHECK(conjugate(Gate::S, 1, PauliSum(P("X1", 1))).str() == "-Y1");
    CHECK(conjugate(Gate::CNOT, 1, 2, PauliSum(P("X1", 2))).str() == "X1 X2");
    CHECK(conjugate(Gate::CNOT, 1, 2, PauliSum(P("Z2", 2))).str() == "Z1 Z2");
    auto tx = conjugate(Gate::T, 1, PauliSum(P("X1", 1)));
    CHECK(tx.terms().size() == 2);
    CHECK(conjugate(Gate::T, 1, PauliSum(P("Z1", 1))).str() == "Z1");
}

TEST_CASE("forward conjugation inverts the table") {
    for (Gate g : {Gate::H, Gate::S, Gate::T, Gate::X, Gate::Y, Gate::Z})
        for (const char* s : {"X1", "Y1", "Z1"}) {
            PauliSum p(P(s, 1));
            CHECK(conjugate_forward(g, 1, 0, conjugate(g, 1, 0, p)) == p);
        }
    for (Gate g : {Gate::CNOT, Gate::CZ, Gate::ISWAP})
        for (const char* s : {"X1", "Z1", "X2", "Z2", "Y1 X2"}) {
            PauliSum p(P(s, 2));
            CHECK(conjugate_forward(g, 1, 2, conjugate(g, 1, 2, p)) == p);
            CHECK(conjugate_forward(g, 2, 1, conjugate(g, 2, 1, p)) == p);
        }
}

TEST_CASE("gate metadata") {
    CHECK(gate_from_name("CNOT") == Gate::CNOT);
    CHECK_THROWS_AS(gate_from_name("Q"), std::invalid_argument);
    CHECK(is_two_qubit(Gate::ISWAP));
    CHECK_FALSE(is_clifford(Gate::T));
    CHECK(is_pauli_gate(Gate::Y));
}

TEST_CASE("sum algebra") {
    PauliSum a = PauliSum(P("X1", 1)) + PauliSum(P("Z1", 1));
    PauliSum sq = a * a;  // (X + Z)^2 = 2 I
    REQUIRE(sq.terms().size() == 1);
    CHECK(sq.single().is_identity());
    CHECK(sq.single().scalar == SRing(2));
    CHECK(a.letters_at(1) == (1u | 4u));
    CHECK(commutes(a, a));
    CHECK_FALSE(commutes(a, PauliSum(P("Y1", 1))));
}
