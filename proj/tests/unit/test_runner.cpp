#include <doctest.h>

#include <set>

#include "qecv/runner.hpp"

using namespace qecv;
using namespace qecv::runner;

namespace {

ClassicalVC cube_vc(std::size_t n, const BExp& budget, const BExp& user = BExp::tt()) {
    ClassicalVC v;
    for (std::size_t i = 1; i <= n; ++i) v.error_vars.push_back("e_" + std::to_string(i));
    v.universals = v.error_vars;
    v.budget = budget;
    v.user = user;
    return v;
}

std::size_t leaf_of(const std::vector<Subtask>& ts, std::size_t mask, std::size_t n, int* hits) {
    std::size_t which = ts.size();
    *hits = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        bool match = true;
        for (const auto& [var, val] : ts[k].assignment) {
            std::size_t i = std::stoul(var.substr(2)) - 1;
            if (static_cast<std::int64_t>((mask >> i) & 1u) != val) match = false;
        }
        if (match) {
            ++*hits;
            which = k;
        }
    }
    (void)n;
    return which;
}

RunOptions quick(std::size_t jobs) {
    RunOptions o;
    o.jobs = jobs;
    o.solver = smt::default_config();
    o.solver.timeout_ms = 60000;
    return o;
}

codes::Scenario steane_yh() {
    codes::CycleOptions o;
    o.op = codes::LogicalOp::H;
    return codes::ec_cycle(codes::steane(), o);
}

}  // namespace

TEST_CASE("split leaves partition the cube") {
    for (std::size_t n = 1; n <= 10; ++n)
        for (std::size_t d : {1, 2, 3}) {
            CAPTURE(n);
            CAPTURE(d);
            auto ts = split(cube_vc(n, BExp::tt()), d, n);
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                int hits = 0;
                leaf_of(ts, mask, n, &hits);
                REQUIRE(hits == 1);
            }
        }
}

TEST_CASE("split prunes infeasible branches") {
    std::vector<std::string> names;
    for (int i = 1; i <= 6; ++i) names.push_back("e_" + std::to_string(i));
    auto budget = cexpr::mk_le(cexpr::sum_of(names), BExp::num(1));
    auto ts = split(cube_vc(6, budget), 1, 6);
    CHECK(ts.size() < split(cube_vc(6, BExp::tt()), 1, 6).size());
    for (const auto& t : ts) {
        std::int64_t ones = 0;
        for (const auto& [k, v] : t.assignment) ones += v;
        CHECK(ones <= 1);
    }
    for (std::size_t mask = 0; mask < 64; ++mask) {
        if (__builtin_popcount(mask) > 1) continue;
        int hits = 0;
        leaf_of(ts, mask, 6, &hits);
        CHECK(hits == 1);
    }
}

TEST_CASE("ET heuristic closes branches early") {
    // d=3, n=9: a branch with one error among four bits closes (6 + 4 > 9)
    auto ts = split(cube_vc(9, BExp::tt()), 3, 9);
    bool found = false;
    for (const auto& t : ts)
        if (t.assignment.size() == 4 && t.assignment.at("e_4") == 1 && t.assignment.at("e_1") == 0) found = true;
    CHECK(found);
    auto zero = split(cube_vc(5, cexpr::mk_le(cexpr::sum_of({"e_1", "e_2", "e_3", "e_4", "e_5"}), BExp::num(0))), 3, 5);
    REQUIRE(zero.size() == 1);
    for (const auto& [k, v] : zero[0].assignment) CHECK(v == 0);
}

TEST_CASE("empty task list is Verified") {
    auto r = run_parallel({}, quick(4));
    CHECK(r.status == smt::Status::Verified);
    CHECK(r.total == 0);
}

TEST_CASE("verdicts do not depend on the worker count") {
    auto sc = steane_yh();
    for (std::size_t jobs : {1, 2, 8}) {
        VerifyOptions o;
        o.run = quick(jobs);
        CHECK(verify_correction(sc, o).run.status == smt::Status::Verified);
    }
}

TEST_CASE("a refuted subtask cancels the rest") {
    auto sc = steane_yh();
    auto bug = codes::mutate(sc, codes::standard_mutations(sc, 1).at(0));
    VerifyOptions o;
    o.run = quick(4);
    auto rep = verify_correction(bug, o);
    CHECK(rep.run.status == smt::Status::Refuted);
    CHECK(rep.run.completed < rep.run.total);
    REQUIRE(rep.replay);
    CHECK(rep.replay->failure);
}

TEST_CASE("reduction failures and solver errors surface as Unknown") {
    Subtask t;
    t.vc.label = "broken";
    t.failure = "no pivot";
    auto r = run_parallel({t}, quick(1));
    CHECK(r.status == smt::Status::Unknown);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].reason.find("no pivot") != std::string::npos);

    auto o = quick(1);
    o.solver.command = "qecv-no-such-solver";
    Subtask u;
    u.vc.universals = {"x"};
    u.vc.goal_eqs = {cexpr::PhasePoly::atom("x")};
    CHECK(run_parallel({u}, o).status == smt::Status::Unknown);
}

TEST_CASE("records are JSON lines") {
    TaskRecord r;
    r.id = 3;
    r.label = "a \"quoted\" label";
    r.status = smt::Status::Verified;
    r.seconds = 0.5;
    auto j = record_json(r);
    CHECK(j.find("\"id\":3") != std::string::npos);
    CHECK(j.find("\"verdict\":\"Verified\"") != std::string::npos);
    CHECK(j.find("\\\"quoted\\\"") != std::string::npos);
    CHECK(j.find('\n') == std::string::npos);
}

TEST_CASE("scenario files round trip") {
    auto sc = steane_yh();
    auto back = parse_scenario_file(scenario_file(sc));
    CHECK(back.n == 7);
    CHECK(back.budget == 1);
    CHECK(back.error_vars() == sc.error_vars());
    CHECK(oracle::brute_force_verify(back, {}).verified);
    CHECK_THROWS(parse_scenario_file("q_1 *= X"));
    CHECK_THROWS(parse_scenario_file("#! colour blue\n#! code steane\nq_1 *= X"));
}

TEST_CASE("constraint files") {
    auto sc = codes::ec_cycle(codes::rotated_surface(3), {});
    auto c = parse_constraints("# local errors\nlocality 1 2 3 4\ndiscreteness 3\ne_1 + e_2 <= 1\n", sc);
    CHECK(c.op() == cexpr::BExp::Op::And);
    CHECK(c.args().size() == 9);
    CHECK_THROWS(parse_constraints("locality x", sc));
}
