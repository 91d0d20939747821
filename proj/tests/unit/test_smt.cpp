#include <doctest.h>

#include <thread>

#include "qecv/smt.hpp"

using namespace qecv;
using namespace qecv::smt;
using cexpr::PhasePoly;

namespace {

// forall x, y : (x + y = 0) => goal
ClassicalVC tiny(const PhasePoly& goal) {
    ClassicalVC v;
    v.label = "tiny";
    v.universals = {"x"};
    v.defined = {"y"};
    v.sd = {PhasePoly::from(false, {"x", "y"})};
    v.goal_eqs = {goal};
    return v;
}

SolverConfig cfg() {
    auto c = default_config();
    c.timeout_ms = 30000;
    return c;
}

}  // namespace

TEST_CASE("sum width") {
    CHECK(sum_width(1, 1) == 2);
    CHECK(sum_width(7, 1) == 4);
    CHECK(sum_width(14, 1) == 5);
    CHECK(sum_width(3, 9) == 5);
}

TEST_CASE("term translation") {
    auto e = qprog::parse_bexp("x ^ ~y");
    CHECK(to_smt_bool(e, 3) == "(xor (= x #b1) (not (= y #b1)))");
    auto s = qprog::parse_bexp("x + y <= 1");
    auto str = to_smt_bool(s, 3);
    CHECK(str.find("bvule") != std::string::npos);
    CHECK(str.find("(_ zero_extend 2) x") != std::string::npos);
}

TEST_CASE("encoding layout") {
    auto enc = encode(tiny(PhasePoly::from(false, {"x", "y"})));
    CHECK(enc.script.find("(set-logic QF_BV)") != std::string::npos);
    CHECK(enc.script.find("(declare-fun x () (_ BitVec 1))") != std::string::npos);
    CHECK(enc.script.find("(check-sat)") != std::string::npos);
    CHECK(enc.vars == std::vector<std::string>{"x", "y"});
    auto ex = tiny(PhasePoly::atom("x"));
    ex.exists_form = true;
    CHECK(encode(ex).script.find("exists") != std::string::npos);
}

TEST_CASE("valid and invalid conditions") {
    auto ok = check(tiny(PhasePoly::from(false, {"x", "y"})), cfg());
    CHECK(ok.status == Status::Verified);
    auto bad = check(tiny(PhasePoly::atom("x")), cfg());
    REQUIRE(bad.status == Status::Refuted);
    CHECK(bad.model.at("x") == 1);
    CHECK(bad.model.at("y") == 1);
    CHECK(model_replays(tiny(PhasePoly::atom("x")), bad.model));
    CHECK_FALSE(model_replays(tiny(PhasePoly::atom("x")), {{"x", 0}, {"y", 0}}));
}

TEST_CASE("the forall-exists layout agrees") {
    auto v = tiny(PhasePoly::from(false, {"x", "y"}));
    v.exists_form = true;
    CHECK(check(v, cfg()).status == Status::Verified);
    auto w = tiny(PhasePoly::atom("x"));
    w.exists_form = true;
    CHECK(check(w, cfg()).status == Status::Refuted);
}

TEST_CASE("satisfiable mode") {
    ClassicalVC v;
    v.mode = ClassicalVC::Mode::Satisfiable;
    v.universals = {"a", "b"};
    v.goal_extra = qprog::parse_bexp("a /\\ ~b");
    auto r = check(v, cfg());
    REQUIRE(r.status == Status::Refuted);
    CHECK(r.model.at("a") == 1);
    CHECK(r.model.at("b") == 0);
}

TEST_CASE("fixed values join the model") {
    auto v = tiny(PhasePoly::atom("x")).specialize({{"x", 1}});
    auto r = check(v, cfg());
    REQUIRE(r.status == Status::Refuted);
    CHECK(r.model.at("x") == 1);
}

TEST_CASE("model parsing") {
    auto m = parse_model("sat\n((x #b1)\n (y #b0)\n (s_1 #b1))\n");
    CHECK(m.at("x") == 1);
    CHECK(m.at("y") == 0);
    CHECK(m.at("s_1") == 1);
}

TEST_CASE("solver failures are Unknown") {
    auto c = cfg();
    c.command = "qecv-no-such-solver";
    auto r = check(tiny(PhasePoly::atom("x")), c);
    CHECK(r.status == Status::Unknown);
    CHECK(r.reason.rfind("solver-error", 0) == 0);

    c.command = "sleep 5";
    c.timeout_ms = 200;
    r = check(tiny(PhasePoly::atom("x")), c);
    CHECK(r.status == Status::Unknown);
    CHECK(r.reason == "timeout");
    CHECK(r.seconds < 4);
}

TEST_CASE("cancellation stops the solver") {
    auto c = cfg();
    c.command = "sleep 5";
    std::atomic<bool> cancel{false};
    std::thread t([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        cancel.store(true);
    });
    auto r = check(tiny(PhasePoly::atom("x")), c, &cancel);
    t.join();
    CHECK(r.status == Status::Unknown);
    CHECK(r.reason == "cancelled");
    CHECK(r.seconds < 4);
}
