#include <doctest.h>

#include <random>

#include "qecv/oracle.hpp"

using namespace qecv;
using namespace qecv::oracle;
using pauli::PauliTerm;

namespace {

PauliTerm P(const std::string& s, std::size_t n) { return PauliTerm::parse_sparse(s, n); }

Vec basis_vec(std::size_t dim, std::size_t k) {
    Vec v(dim);
    v[k] = QF(1);
    return v;
}

}  // namespace

TEST_CASE("exact field arithmetic") {
    QF w = QF::omega();
    QF w8 = QF(1);
    for (int k = 0; k < 8; ++k) w8 = w8 * w;
    CHECK(w8 == QF(1));
    CHECK(w * w == QF::i());
    CHECK(QF::sqrt2() * QF::inv_sqrt2() == QF(1));
    QF a = QF(3) + QF::sqrt2() * QF::i();
    CHECK(a * a.inv() == QF(1));
    CHECK((a / a) == QF(1));
    CHECK((a - a).is_zero());
    CHECK(w.conj() * w == QF(1));
}

TEST_CASE("state vector gates") {
    StateVector s(2);
    s.apply(Gate::H, 1);
    s.apply(Gate::CNOT, 1, 2);
    CHECK(s.amps()[0] == QF::inv_sqrt2());
    CHECK(s.amps()[3] == QF::inv_sqrt2());
    CHECK(s.amps()[1].is_zero());
    auto [plus, minus] = s.project(P("Z1 Z2", 2));
    CHECK(plus.proportional(s));
    CHECK(minus.is_zero());
    auto [p2, m2] = s.project(P("Z1", 2));
    CHECK_FALSE(p2.is_zero());
    CHECK_FALSE(m2.is_zero());
    CHECK_FALSE(p2.proportional(m2));
    CHECK_THROWS_AS(s.apply(Gate::X, 3), std::out_of_range);
}

TEST_CASE("iSWAP convention") {
    // |01> -> -i |10>
    StateVector s(2, basis_vec(4, 1));
    s.apply(Gate::ISWAP, 1, 2);
    CHECK(s.amps()[2] == -QF::i());
}

TEST_CASE("tableau measurement") {
    Tableau t(2);
    t.apply(Gate::H, 1);
    t.apply(Gate::CNOT, 1, 2);
    int o = -1;
    CHECK(t.deterministic(P("Z1 Z2", 2), &o));
    CHECK(o == 0);
    CHECK(t.stabilized_by(P("X1 X2", 2)));
    CHECK_FALSE(t.deterministic(P("Z1", 2)));
    auto outs = t.measure(P("Z1", 2));
    REQUIRE(outs.size() == 2);
    CHECK(outs[1].second.stabilized_by(P("-Z2", 2)));
    CHECK_THROWS(t.apply(Gate::T, 1));
}

TEST_CASE("tableau and state vector agree on random Clifford circuits") {
    std::mt19937 rng(11);
    const Gate gates[] = {Gate::H, Gate::S, Gate::X, Gate::Y, Gate::Z, Gate::CNOT, Gate::CZ, Gate::ISWAP};
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3;
        StateVector sv(n);
        Tableau tb(n);
        for (int k = 0; k < 15; ++k) {
            Gate g = gates[rng() % 8];
            std::size_t i = rng() % n + 1, j = rng() % n + 1;
            if (pauli::is_two_qubit(g)) {
                if (i == j) j = i % n + 1;
                sv.apply(g, i, j);
                tb.apply(g, i, j);
            } else {
                sv.apply(g, i);
                tb.apply(g, i);
            }
        }
        for (const auto& p : tb.stabilizers()) {
            auto [plus, minus] = sv.project(p);
            CHECK(minus.is_zero());
        }
    }
}

TEST_CASE("subspace operations") {
    auto z = assertion_subspace(qprog::parse_assertion("Z1"), {}, 1);
    auto x = assertion_subspace(qprog::parse_assertion("X1"), {}, 1);
    CHECK(z.rank() == 1);
    CHECK(meet(z, x).rank() == 0);
    CHECK(join(z, x).rank() == 2);
    CHECK(orthocomplement(z) == assertion_subspace(qprog::parse_assertion("-Z1"), {}, 1));
    // Sasaki implication between non-commuting atoms
    CHECK(sasaki(z, x) == orthocomplement(z));
    CHECK(included(meet(z, x), x));
    auto bell = assertion_subspace(qprog::parse_assertion("X1 X2 /\\ Z1 Z2"), {}, 2);
    CHECK(bell.rank() == 1);
    auto sum = assertion_subspace(qprog::parse_assertion("bigvee s in {0,1}^1 : (-1)^(s) Z1"), {}, 1);
    CHECK(sum.rank() == 2);
    CHECK(entails(qprog::parse_assertion("Z1 Z2 /\\ Z1"), qprog::parse_assertion("Z2"), {}, 2));
    CHECK_FALSE(entails(qprog::parse_assertion("Z1"), qprog::parse_assertion("Z2"), {}, 2));
}

TEST_CASE("symbolic signs are evaluated") {
    auto a = qprog::parse_assertion("(-1)^(b) Z1");
    CHECK(assertion_subspace(a, {{"b", 1}}, 1) == assertion_subspace(qprog::parse_assertion("-Z1"), {}, 1));
}

TEST_CASE("exhaustive decoder") {
    auto c = codes::steane();
    std::vector<PauliTerm> xs(c.generators.begin(), c.generators.begin() + 3);
    auto sol = exhaustive_decoder(xs, {true, true, false}, 'Z');
    REQUIRE(sol.size() == 1);
    CHECK(sol[0] == std::vector<std::size_t>{3});
    CHECK(exhaustive_decoder(xs, {false, false, false}, 'Z') == std::vector<std::vector<std::size_t>>{{}});
    // repetition code: syndrome 11 on Z1Z2, Z2Z3 points at qubit 2
    auto r = codes::repetition(3);
    CHECK(exhaustive_decoder(r.generators, {true, true}, 'X')[0] == std::vector<std::size_t>{2});
}

TEST_CASE("conforming decoder outputs") {
    auto sc = codes::ec_cycle(codes::repetition(3), {pauli::Gate::X});
    const auto& call = sc.decoder.calls.at(0);
    cexpr::Assignment mem;
    for (const auto& s : call.syndromes) mem[s] = 0;
    mem[call.syndromes[0]] = 1;
    auto outs = conforming_outputs(call, mem, 1);
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].at(call.corrections[0].var) == 1);
    CHECK(conforming_outputs(call, mem, 0).empty());
}

TEST_CASE("brute force verification") {
    codes::CycleOptions o;
    o.op = codes::LogicalOp::H;
    auto sc = codes::ec_cycle(codes::steane(), o);
    auto v = brute_force_verify(sc, {});
    CHECK(v.verified);
    CHECK(v.path == "tableau");
    CHECK(v.patterns == 15);
    OracleOptions two;
    two.max_weight = 2;
    auto w = brute_force_verify(sc, two);
    CHECK_FALSE(w.verified);
    auto r = replay(sc, w.witness, w.basis);
    CHECK(r.failure);
    o.error = Gate::T;
    auto t = brute_force_verify(codes::ec_cycle(codes::steane(), o), {});
    CHECK(t.verified);
    CHECK(t.path == "statevector");
}

TEST_CASE("simulation branches on measurements") {
    auto p = qprog::parse_program("q_1 *= H; m := meas[Z1]; if m then q_1 *= X else skip end");
    auto out = simulate(p, {Branch<StateVector>{{}, StateVector(1)}});
    REQUIRE(out.size() == 2);
    for (const auto& b : out) CHECK(b.state.proportional(StateVector(1)));
}

TEST_CASE("detection witness replay") {
    auto c = codes::repetition(3);
    auto r = replay_detection(c, {{"ex_1", 1}, {"ex_2", 1}, {"ex_3", 1}});
    CHECK(r.failure);
    CHECK_FALSE(replay_detection(c, {{"ex_1", 1}}).failure);
}
