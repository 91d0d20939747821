// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails. Arguments select criteria by
// number (default: all).

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "qecv/runner.hpp"

using namespace qecv;
using pauli::Gate;
using pauli::PauliSum;
using pauli::PauliTerm;
using smt::Status;
using cexpr::Assignment;

namespace {

// wall-clock limits in seconds
constexpr double kWlpLimit = 1;
constexpr double kSteaneLimit = 60;
constexpr double kTraceLimit = 60;
constexpr double kSurface3Limit = 120;
constexpr double kSurface5Limit = 3600;
constexpr double kDetect3Limit = 120;
constexpr double kDetect5Limit = 1800;
constexpr double kOracleSuiteLimit = 1800;
constexpr double kScenarioLimit = 600;
constexpr std::size_t kParallelJobs = 8;
constexpr std::size_t kMutants = 20;
constexpr std::size_t kDecompositions = 500;
constexpr std::uint64_t kLocalitySeed = 20240611;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

runner::VerifyOptions options(std::size_t jobs, bool split = true) {
    runner::VerifyOptions o;
    o.run.jobs = jobs;
    o.run.solver = smt::default_config();
    o.run.solver.timeout_ms = 600000;
    o.split = split;
    return o;
}

codes::Scenario steane_yh(std::size_t budget = 1, Gate error = Gate::Y) {
    codes::CycleOptions o;
    o.error = error;
    o.op = codes::LogicalOp::H;
    o.budget = budget;
    return codes::ec_cycle(codes::steane(), o);
}

codes::Scenario cycle(const qprog::StabilizerCode& c, Gate error) {
    codes::CycleOptions o;
    o.error = error;
    return codes::ec_cycle(c, o);
}

const char* name(Status s) { return smt::status_name(s); }

// ---------------------------------------------------------------- 1

void c1(Outcome& out) {
    auto t0 = Clock::now();
    auto p = qprog::desugar(qprog::parse_program("for i in 1..3 do q_i *= [x_i] X end"));
    auto post = qprog::parse_assertion("Z1 Z2 /\\ Z2 Z3 /\\ (-1)^(b) Z1");
    auto got = wlp::wlp_pre(p, post, 3).str();
    auto want = qprog::parse_assertion("(-1)^(x_2+x_1) Z1 Z2 /\\ (-1)^(x_3+x_2) Z2 Z3 /\\ (-1)^(b+x_1) Z1").str();
    double s = since(t0);
    out.detail << "pre = " << got << ", " << s << " s";
    out.require(got == want, "expected " + want);
    out.require(s < kWlpLimit, "runtime");
}

// ---------------------------------------------------------------- 2

void c2(Outcome& out) {
    auto t0 = Clock::now();
    auto one = runner::verify_correction(steane_yh(1), options(1, false));
    double s1 = since(t0);
    auto t1 = Clock::now();
    auto two = runner::verify_correction(steane_yh(2), options(1, false));
    double s2 = since(t1);
    out.detail << "budget 1: " << name(one.run.status) << " " << s1 << " s; budget 2: " << name(two.run.status) << " "
               << s2 << " s";
    out.require(one.run.status == Status::Verified, "budget 1 verdict");
    out.require(two.run.status == Status::Refuted, "budget 2 verdict");
    out.require(two.replay && two.replay->failure, "budget 2 replay");
    if (two.replay) out.detail << "; replay: " << two.replay->message;
    out.require(s1 < kSteaneLimit && s2 < kSteaneLimit, "runtime");
}

// ---------------------------------------------------------------- 3, 4

const vc::VcInstance* find(const std::vector<vc::VcInstance>& xs, const std::string& part) {
    for (const auto& x : xs)
        if (x.vc.label.find(part) != std::string::npos) return &x;
    return nullptr;
}

bool has_row(const std::vector<std::pair<std::size_t, std::string>>& xs, std::size_t i, const std::string& s) {
    for (const auto& [k, v] : xs)
        if (k == i && v == s) return true;
    return false;
}

// every VC instance of the scenario, solved whole
Status solve_all(const std::vector<vc::VcInstance>& vcs) {
    auto opts = options(1, false);
    return runner::run_parallel(runner::whole(vcs), opts.run).status;
}

void c3(Outcome& out) {
    auto t0 = Clock::now();
    auto vcs = vc::build_correction_vcs(steane_yh(1, Gate::T));
    auto* v = find(vcs, "basis=X ep_5=1");
    out.require(v && v->trace, "ep_5 instance with a trace");
    if (!v || !v->trace) return;
    const auto& t = *v->trace;
    // g_3 is row 2, the logical X is row 6
    out.require(has_row(t.updated_rhs, 2, "X1 X3 X4 X6"), "g3 update");
    out.require(has_row(t.updated_rhs, 6, "X2 X4 X6"), "logical update");
    std::string t7;
    for (const auto& [i, ph] : t.phase_map)
        if (i == 6) t7 = ph.str();
    // the scenario's first syndrome of the X-check block is s_4
    out.require(t7 == "b+f_x_1+f_x_2+f_x_3+f_x_4+f_x_5+f_x_6+f_x_7+s_4", "t_7 map");
    Status st = smt::check(v->vc, smt::default_config()).status;
    Status all = solve_all(vcs);
    double s = since(t0);
    out.detail << "t_7 = " << t7 << "; ep_5 instance " << name(st) << "; all " << vcs.size() << " VCs " << name(all)
               << ", " << s << " s";
    out.require(st == Status::Verified && all == Status::Verified, "decoder formula check");
    out.require(s < kTraceLimit, "runtime");
}

void c4(Outcome& out) {
    auto t0 = Clock::now();
    auto vcs = vc::build_correction_vcs(steane_yh(1, Gate::H));
    auto* v = find(vcs, "basis=Z e_7=1");
    out.require(v && v->trace && v->trace->pairs.size() == 1, "e_7 instance with one branch pair");
    if (!v || !v->trace || v->trace->pairs.empty()) return;
    const auto& p = v->trace->pairs[0];
    std::string cols;
    for (const auto& c : v->trace->columns) cols += (cols.empty() ? "" : " ") + c;
    Status all = solve_all(vcs);
    double s = since(t0);
    out.detail << "pair " << p.s0 << "/" << p.s1 << " (columns " << cols << ", delta " << p.delta << "), eliminated "
               << p.eliminated << ", verdict " << name(all) << ", " << s << " s";
    out.require(p.s0 == "111000" && p.s1 == "111111", "branch pair 111000/111111");
    out.require(p.eliminated == "Z1 Z3 Z5 X7", "eliminated row");
    out.require(all == Status::Verified, "verdict");
    out.require(s < kTraceLimit, "runtime");
}

// ---------------------------------------------------------------- 5, 7

struct Timed {
    runner::Report rep;
    double wall = 0;
};

Timed timed_verify(const codes::Scenario& sc, const runner::VerifyOptions& o) {
    auto t0 = Clock::now();
    Timed t{runner::verify_correction(sc, o), 0};
    t.wall = since(t0);
    return t;
}

std::optional<Timed> g_surface5_parallel;

const Timed& surface5_parallel() {
    if (!g_surface5_parallel) g_surface5_parallel = timed_verify(cycle(codes::rotated_surface(5), Gate::Y), options(kParallelJobs));
    return *g_surface5_parallel;
}

void c5(Outcome& out) {
    auto d3 = timed_verify(cycle(codes::rotated_surface(3), Gate::Y), options(kParallelJobs));
    const auto& par = surface5_parallel();
    auto seq = timed_verify(cycle(codes::rotated_surface(5), Gate::Y), options(1));
    out.detail << "d=3 " << name(d3.rep.run.status) << " " << d3.wall << " s; d=5 jobs=" << kParallelJobs << " "
               << name(par.rep.run.status) << " " << par.wall << " s over " << par.rep.subtasks << " subtasks; d=5 jobs=1 "
               << name(seq.rep.run.status) << " " << seq.wall << " s; host reports " << runner::default_jobs()
               << " hardware threads";
    out.require(d3.rep.run.status == Status::Verified && d3.wall < kSurface3Limit, "d=3");
    out.require(par.rep.run.status == Status::Verified && par.wall < kSurface5Limit, "d=5");
    out.require(seq.rep.run.status == Status::Verified, "d=5 sequential verdict");
    out.require(par.wall < seq.wall, "parallel wall below sequential wall");
}

void c7(Outcome& out) {
    auto sc = cycle(codes::rotated_surface(5), Gate::Y);
    std::size_t sites = (5 * 5 - 1) / 2;
    auto text = "locality random " + std::to_string(sites) + " " + std::to_string(kLocalitySeed) + "\ndiscreteness 5\n";
    auto o = options(kParallelJobs);
    o.vc.user = runner::parse_constraints(text, sc);
    auto con = timed_verify(sc, o);
    const auto& base = surface5_parallel();
    out.detail << "constrained " << name(con.rep.run.status) << " " << con.wall << " s over " << con.rep.subtasks
               << " subtasks; unconstrained " << name(base.rep.run.status) << " " << base.wall << " s over "
               << base.rep.subtasks << " subtasks";
    out.require(con.rep.run.status == Status::Verified, "constrained verdict");
    out.require(con.wall < base.wall, "constrained faster");
}

// ---------------------------------------------------------------- 6

std::size_t witness_weight(const Assignment& m, std::size_t n) {
    std::size_t w = 0;
    auto get = [&](const std::string& k) {
        auto it = m.find(k);
        return it != m.end() && it->second != 0;
    };
    for (std::size_t q = 1; q <= n; ++q) w += get("ex_" + std::to_string(q)) || get("ez_" + std::to_string(q));
    return w;
}

void c6(Outcome& out) {
    for (std::size_t d : {3u, 5u}) {
        auto code = codes::rotated_surface(d);
        auto t0 = Clock::now();
        auto unsat = runner::verify_detection(code, d, {}, options(kParallelJobs));
        auto sat = runner::verify_detection(code, d + 1, {}, options(kParallelJobs));
        double s = since(t0);
        std::size_t w = witness_weight(sat.run.model, code.n);
        auto rp = oracle::replay_detection(code, sat.run.model);
        out.detail << "d=" << d << ": dt=d " << name(unsat.run.status) << ", dt=d+1 " << name(sat.run.status)
                   << " weight " << w << " (" << rp.message << "), " << s << " s; ";
        std::string tag = "d=" + std::to_string(d);
        out.require(unsat.run.status == Status::Verified, tag + " unsat");
        out.require(sat.run.status == Status::Refuted && w == d && rp.failure, tag + " witness");
        out.require(s < (d == 3 ? kDetect3Limit : kDetect5Limit), tag + " runtime");
    }
}

// ---------------------------------------------------------------- 8

bool oracle_verified(const codes::Scenario& sc) {
    oracle::OracleOptions o;
    o.max_weight = sc.budget;
    o.jobs = runner::default_jobs();
    return oracle::brute_force_verify(sc, o).verified;
}

void c8(Outcome& out) {
    auto t0 = Clock::now();
    std::vector<codes::Scenario> suite{steane_yh(),
                                       cycle(codes::steane(), Gate::Y),
                                       cycle(codes::repetition(3), Gate::X),
                                       cycle(codes::repetition(3), Gate::Y),
                                       cycle(codes::repetition(5), Gate::X),
                                       cycle(codes::rotated_surface(3), Gate::Y)};
    std::size_t agree = 0;
    for (const auto& sc : suite) {
        bool o = oracle_verified(sc);
        auto r = runner::verify_correction(sc, options(runner::default_jobs(), false)).run.status;
        bool same = (o && r == Status::Verified) || (!o && r == Status::Refuted);
        agree += same;
        if (!same) out.detail << " mismatch on " << sc.name << " (oracle " << o << ", smt " << name(r) << ")";
    }
    out.require(agree == suite.size(), "verdict equality");

    // mutants drawn round-robin from the Pauli-error scenarios; mutants the
    // oracle verifies are equivalent programs and are skipped
    std::vector<codes::Scenario> bases{steane_yh(), cycle(codes::rotated_surface(3), Gate::Y),
                                       cycle(codes::repetition(3), Gate::X), cycle(codes::repetition(5), Gate::X)};
    std::vector<std::vector<codes::Mutation>> pools;
    for (const auto& b : bases) {
        // interleave the kinds so every kind appears early
        std::map<codes::Mutation::Kind, std::vector<codes::Mutation>> by_kind;
        for (const auto& m : codes::standard_mutations(b, 12)) by_kind[m.kind].push_back(m);
        std::vector<codes::Mutation> pool;
        for (std::size_t i = 0; pool.size() < 12; ++i) {
            std::size_t before = pool.size();
            for (const auto& [k, ms] : by_kind)
                if (i < ms.size()) pool.push_back(ms[i]);
            if (pool.size() == before) break;
        }
        pools.push_back(pool);
    }
    std::size_t tested = 0, both = 0, equivalent = 0;
    std::set<codes::Mutation::Kind> kinds;
    for (std::size_t round = 0; round < 12 && tested < kMutants; ++round)
        for (std::size_t b = 0; b < bases.size() && tested < kMutants; ++b) {
            if (round >= pools[b].size()) continue;
            const auto& m = pools[b][round];
            auto mu = codes::mutate(bases[b], m);
            if (oracle_verified(mu)) {
                ++equivalent;
                continue;
            }
            ++tested;
            kinds.insert(m.kind);
            auto r = runner::verify_correction(mu, options(runner::default_jobs(), false));
            bool ok = r.run.status == Status::Refuted && r.replay && r.replay->failure;
            both += ok;
            if (!ok) out.detail << " mutant " << bases[b].name << " " << m.describe() << " gave " << name(r.run.status);
        }
    double s = since(t0);
    out.detail << " " << agree << "/" << suite.size() << " scenarios agree; " << both << "/" << tested
               << " mutants refuted by both (" << kinds.size() << " mutation kinds, " << equivalent
               << " equivalent mutants skipped), " << s << " s";
    out.require(tested == kMutants && both == kMutants, "mutants");
    out.require(kinds.size() == 3, "all mutation kinds");
    out.require(s < kOracleSuiteLimit, "runtime");
}

// ---------------------------------------------------------------- 9

PauliTerm random_term(std::mt19937& rng, std::size_t n) {
    PauliTerm t(n);
    for (std::size_t q = 1; q <= n; ++q) t.set_letter(q, "IXYZ"[rng() % 4]);
    return t;
}

std::pair<std::size_t, std::size_t> random_pair(std::mt19937& rng, std::size_t n) {
    std::size_t i = rng() % n + 1, j = rng() % n + 1;
    if (i == j) j = i % n + 1;
    return {i, j};
}

void c9(Outcome& out) {
    std::mt19937 rng(9);
    std::size_t fails = 0, cases = 0;
    // involutions and orders
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng() % 3;
        PauliSum p(random_term(rng, n));
        auto [i, j] = random_pair(rng, n);
        auto rep = [&](Gate g, int k) {
            PauliSum q = p;
            for (int r = 0; r < k; ++r) q = pauli::conjugate(g, i, j, q);
            return q == p;
        };
        for (Gate g : {Gate::H, Gate::X, Gate::Y, Gate::Z, Gate::CNOT, Gate::CZ}) fails += !rep(g, 2), ++cases;
        fails += !rep(Gate::S, 4), ++cases;
        fails += !rep(Gate::T, 8), ++cases;
    }
    // dense matrices
    const Gate all[] = {Gate::X, Gate::Y, Gate::Z, Gate::H, Gate::S, Gate::T, Gate::CNOT, Gate::CZ, Gate::ISWAP};
    for (std::size_t n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            Gate g = all[rng() % 9];
            if (n == 1 && pauli::is_two_qubit(g)) continue;
            auto [i, j] = random_pair(rng, n);
            if (!pauli::is_two_qubit(g)) j = 0;
            if (n == 1) i = 1;
            PauliSum p(random_term(rng, n));
            auto u = oracle::gate_matrix(g, i, j, n);
            auto want = oracle::matmul(oracle::adjoint(u), oracle::matmul(oracle::pauli_matrix(p), u));
            fails += oracle::pauli_matrix(pauli::conjugate(g, i, j, p)) != want, ++cases;
        }
    // commutation
    for (std::size_t n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 60; ++trial) {
            auto a = random_term(rng, n), b = random_term(rng, n);
            auto ma = oracle::pauli_matrix(PauliSum(a)), mb = oracle::pauli_matrix(PauliSum(b));
            fails += pauli::commutes(a, b) != (oracle::matmul(ma, mb) == oracle::matmul(mb, ma)), ++cases;
        }
    // product decompositions
    const Gate cliffords[] = {Gate::H, Gate::S, Gate::CNOT, Gate::CZ, Gate::X, Gate::Z};
    for (std::size_t trial = 0; trial < kDecompositions; ++trial) {
        std::size_t n = 2 + rng() % 5, k = 1 + rng() % n;
        std::vector<PauliTerm> basis;
        for (std::size_t q = 1; q <= k; ++q) basis.push_back(PauliTerm::from_letters(n, {{q, 'Z'}}));
        for (int step = 0; step < 12; ++step) {
            Gate g = cliffords[rng() % 6];
            auto [i, j] = random_pair(rng, n);
            for (auto& b : basis) b = pauli::conjugate(g, i, j, PauliSum(b)).single();
        }
        for (auto& b : basis) b.sign = cexpr::PhasePoly::zero();
        std::vector<std::size_t> chosen;
        PauliTerm target(n);
        for (std::size_t b = 0; b < k; ++b)
            if (rng() % 2) {
                chosen.push_back(b);
                target = pauli::mul(target, basis[b]);
            }
        auto d = vc::decompose_products(basis, target);
        PauliTerm rebuilt(n);
        for (auto f : d.factors) rebuilt = pauli::mul(rebuilt, basis[f]);
        if (d.alpha) rebuilt.sign ^= cexpr::PhasePoly::one();
        // alpha relates the product to the unsigned target
        PauliTerm bare = target;
        bare.sign = cexpr::PhasePoly::zero();
        auto diff = pauli::equal_up_to_phase(rebuilt, bare);
        fails += !(d.factors == chosen && diff && diff->is_zero());
        ++cases;
    }
    out.detail << fails << " failures in " << cases << " cases";
    out.require(fails == 0, "zero failures");
}

// ---------------------------------------------------------------- 10

void c10(Outcome& out) {
    for (bool ghz : {true, false}) {
        auto t0 = Clock::now();
        auto sc = ghz ? codes::ghz_scenario() : codes::cnot_propagated_scenario();
        auto one = runner::verify_correction(sc, options(runner::default_jobs()));
        auto sc2 = sc;
        sc2.budget = 2;
        auto two = runner::verify_correction(sc2, options(runner::default_jobs()));
        double s = since(t0);
        out.detail << sc.name << ": budget 1 " << name(one.run.status) << ", budget 2 " << name(two.run.status)
                   << (two.replay ? " (replay: " + two.replay->message + ")" : "") << ", " << s << " s; ";
        out.require(one.run.status == Status::Verified, sc.name + " budget 1");
        out.require(two.run.status == Status::Refuted && two.replay && two.replay->failure, sc.name + " budget 2 replay");
        out.require(s < kScenarioLimit, sc.name + " runtime");
    }
}

// ---------------------------------------------------------------- 11

void c11(Outcome& out) {
    struct Job {
        std::string name;
        std::function<Status(std::size_t)> run;
    };
    auto corr = [](codes::Scenario sc) {
        return [sc](std::size_t jobs) { return runner::verify_correction(sc, options(jobs)).run.status; };
    };
    auto det = [](std::size_t d, std::size_t dt) {
        return [d, dt](std::size_t jobs) {
            return runner::verify_detection(codes::rotated_surface(d), dt, {}, options(jobs)).run.status;
        };
    };
    auto yh = steane_yh();
    std::vector<Job> corpus{
        {"steane Y H", corr(yh)},
        {"steane Y H budget 2", corr(steane_yh(2))},
        {"steane H H", corr(steane_yh(1, Gate::H))},
        {"steane T H", corr(steane_yh(1, Gate::T))},
        {"steane Y H mutant", corr(codes::mutate(yh, codes::standard_mutations(yh, 1).at(0)))},
        {"repetition-3 X", corr(cycle(codes::repetition(3), Gate::X))},
        {"repetition-3 Y", corr(cycle(codes::repetition(3), Gate::Y))},
        {"repetition-5 X", corr(cycle(codes::repetition(5), Gate::X))},
        {"surface-3 Y", corr(cycle(codes::rotated_surface(3), Gate::Y))},
        {"ghz", corr(codes::ghz_scenario())},
        {"cnot", corr(codes::cnot_propagated_scenario())},
        {"surface-3 detection dt=3", det(3, 3)},
        {"surface-3 detection dt=4", det(3, 4)},
    };
    std::size_t stable = 0;
    for (const auto& j : corpus) {
        Status a = j.run(1), b = j.run(2), c = j.run(8);
        bool same = a == b && b == c && a != Status::Unknown;
        stable += same;
        if (!same) out.detail << " " << j.name << ": " << name(a) << "/" << name(b) << "/" << name(c);
    }
    out.detail << " " << stable << "/" << corpus.size() << " verdicts invariant over jobs 1, 2, 8;";
    out.require(stable == corpus.size(), "jobs invariance");

    std::size_t bad = 0;
    for (std::size_t n = 1; n <= 10; ++n)
        for (std::size_t d = 1; d <= 4; ++d) {
            vc::ClassicalVC v;
            for (std::size_t i = 1; i <= n; ++i) v.error_vars.push_back("e_" + std::to_string(i));
            v.universals = v.error_vars;
            auto ts = runner::split(v, d, n);
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                int hits = 0;
                for (const auto& t : ts) {
                    bool match = true;
                    for (const auto& [var, val] : t.assignment)
                        if (static_cast<std::int64_t>((mask >> (std::stoul(var.substr(2)) - 1)) & 1u) != val) match = false;
                    hits += match;
                }
                bad += hits != 1;
            }
        }
    out.detail << " split partition: " << bad << " uncovered or doubly covered patterns for n <= 10";
    out.require(bad == 0, "split partition");
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {1, {"repetition wlp golden", c1}},
        {2, {"steane Y/H end to end", c2}},
        {3, {"steane T-error elimination", c3}},
        {4, {"steane H-error elimination", c4}},
        {5, {"surface code correction", c5}},
        {6, {"surface code detection", c6}},
        {7, {"constrained verification", c7}},
        {8, {"oracle equivalence and mutants", c8}},
        {9, {"algebra properties", c9}},
        {10, {"GHZ and propagated CNOT", c10}},
        {11, {"parallel correctness", c11}},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& [id, c] : criteria) {
        if (!pick.empty() && !pick.count(id)) continue;
        Outcome out;
        auto t0 = Clock::now();
        try {
            c.second(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        failed += !out.pass;
        std::printf("criterion %2d %s: %s (%.2f s) %s\n", id, out.pass ? "PASS" : "FAIL", c.first.c_str(), since(t0),
                    out.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
