#include <doctest.h>

#include "qecv/codes.hpp"

using namespace qecv;
using namespace qecv::codes;

TEST_CASE("builtin codes are valid") {
    for (auto c : {steane(), repetition(3), repetition(5), rotated_surface(3), rotated_surface(5), rotated_surface(7)}) {
        CAPTURE(c.name);
        CHECK_NOTHROW(c.validate());
        CHECK(c.generators.size() == c.n - c.k);
        CHECK(c.logical_x.size() == c.k);
    }
    CHECK(rotated_surface(5).n == 25);
    CHECK(rotated_surface(5).d == 5);
    CHECK(repetition(5).generators[0].str() == "Z1 Z2");
}

TEST_CASE("direct sums shift qubits") {
    auto c = direct_sum({repetition(3), repetition(3)});
    CHECK(c.n == 6);
    CHECK(c.k == 2);
    CHECK(c.generators.back().str() == "Z5 Z6");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("code resolution") {
    CHECK(resolve_code("builtin:surface", 5).n == 25);
    CHECK(resolve_code("steane", 0).n == 7);
    CHECK_THROWS_AS(resolve_code("builtin:nope", 3), qprog::CodeError);
}

TEST_CASE("correction cycle scenario") {
    CycleOptions o;
    o.op = LogicalOp::H;
    auto sc = ec_cycle(steane(), o);
    CHECK(sc.n == 7);
    CHECK(sc.budget == 1);
    CHECK(sc.sites.size() == 14);
    CHECK(sc.error_vars().front() == "e_1");
    CHECK(sc.params == std::vector<std::string>{"b"});
    REQUIRE(sc.decoder.calls.size() == 2);
    cexpr::Assignment m;
    for (const auto& v : sc.error_vars()) m[v] = 0;
    m["e_1"] = 1;
    CHECK(cexpr::holds(sc.budget_bexp(), m));
    m["ep_3"] = 1;
    CHECK_FALSE(cexpr::holds(sc.budget_bexp(), m));
}

TEST_CASE("cycle without a logical operation has no propagated block") {
    auto sc = ec_cycle(rotated_surface(3), {});
    CHECK(sc.sites.size() == 9);
    CHECK(sc.budget == 1);
}

TEST_CASE("locality and discreteness") {
    auto sc = ec_cycle(rotated_surface(3), {});
    auto loc = locality(sc, {1, 2, 3, 4});
    CHECK(loc.op() == cexpr::BExp::Op::And);
    CHECK(loc.args().size() == 5);
    auto sites = random_sites(9, 4, 7);
    CHECK(sites.size() == 4);
    CHECK(std::is_sorted(sites.begin(), sites.end()));
    CHECK(random_sites(9, 4, 7) == sites);
    auto dis = discreteness(sc, 3);
    CHECK(dis.args().size() == 3);
    CHECK_THROWS(discreteness(sc, 0));
}

TEST_CASE("fault-tolerant scenarios") {
    auto g = ghz_scenario();
    CHECK(g.blocks.size() == 3);
    auto c = cnot_propagated_scenario();
    CHECK(c.blocks.size() == 2);
    CHECK(c.n == 14);
}

TEST_CASE("mutations change the program or the contract") {
    CycleOptions o;
    o.op = LogicalOp::H;
    auto sc = ec_cycle(steane(), o);
    auto ms = standard_mutations(sc, 12);
    CHECK(ms.size() == 12);
    for (const auto& m : ms) {
        auto mu = mutate(sc, m);
        CAPTURE(m.describe());
        bool program_changed = !qprog::stmt_equal(*mu.program, *sc.program);
        bool contract_changed = mu.decoder.calls.size() != sc.decoder.calls.size() ||
                                mu.decoder.calls[0].rows != sc.decoder.calls[0].rows ||
                                mu.decoder.calls[1].rows != sc.decoder.calls[1].rows;
        CHECK((program_changed || contract_changed));
    }
}
