// qecv: command line front end for the verifier.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "qecv/runner.hpp"

using namespace qecv;
using pauli::Gate;

namespace {

enum Exit { kOk = 0, kRefuted = 1, kUnknown = 2, kUsage = 64 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

int exit_for(smt::Status s) {
    switch (s) {
        case smt::Status::Verified: return kOk;
        case smt::Status::Refuted: return kRefuted;
        case smt::Status::Unknown: return kUnknown;
    }
    return kUnknown;
}

// ---------------------------------------------------------------- shared flags

struct ScenarioArgs {
    std::string code = "builtin:steane";
    std::size_t distance = 3;
    std::string error = "Y";
    std::string logical = "none";
    int budget = -1;
    std::string scenario;
    std::vector<std::size_t> sites;

    void add(CLI::App* c) {
        c->add_option("--code", code, "builtin:steane|repetition|surface|ghz|cnot or a code file")->capture_default_str();
        c->add_option("--distance", distance, "distance for repetition and surface codes")->capture_default_str();
        c->add_option("--error", error, "error gate")->check(CLI::IsMember({"X", "Y", "Z", "H", "T"}))->capture_default_str();
        c->add_option("--logical", logical, "logical operation before correction")
            ->check(CLI::IsMember({"none", "H", "S", "CNOT"}))
            ->capture_default_str();
        c->add_option("--budget", budget, "total error weight bound (default floor((d-1)/2))");
        c->add_option("--scenario", scenario, "scenario file; overrides the code flags");
        c->add_option("--sites", sites, "qubits carrying propagated errors");
    }

    codes::Scenario build() const {
        codes::Scenario sc;
        Gate g = pauli::gate_from_name(error);
        if (!scenario.empty()) {
            sc = runner::load_scenario(scenario);
        } else if (code == "builtin:ghz" || code == "ghz") {
            sc = codes::ghz_scenario(g);
        } else if (code == "builtin:cnot" || code == "cnot") {
            sc = codes::cnot_propagated_scenario(g);
        } else {
            codes::CycleOptions o;
            o.error = g;
            o.op = codes::logical_from_name(logical);
            o.ep_sites = sites;
            if (budget >= 0) o.budget = static_cast<std::size_t>(budget);
            return codes::ec_cycle(codes::resolve_code(code, distance), o);
        }
        if (budget >= 0) sc.budget = static_cast<std::size_t>(budget);
        return sc;
    }
};

struct RunArgs {
    std::size_t jobs = runner::default_jobs();
    double timeout = 300;
    double total_timeout = 24 * 3600;
    std::string solver_cmd;
    std::string dump_smt;
    bool dump_vc = false;
    bool seq = false;
    std::string records;
    std::string constraints;

    void add(CLI::App* c) {
        c->add_option("--jobs", jobs, "parallel solver workers")->check(CLI::PositiveNumber)->capture_default_str();
        c->add_option("--timeout", timeout, "seconds per subtask")->check(CLI::PositiveNumber)->capture_default_str();
        c->add_option("--total-timeout", total_timeout, "seconds for the whole run")->check(CLI::PositiveNumber);
        c->add_option("--solver-cmd", solver_cmd, "solver command template; {timeout_ms} and {timeout_s} are substituted");
        c->add_option("--dump-smt", dump_smt, "write each SMT-LIB script into this directory");
        c->add_flag("--dump-vc", dump_vc, "print the classical verification conditions");
        c->add_flag("--seq", seq, "no splitting, one worker");
        c->add_option("--records", records, "write one JSON line per subtask here ('-' for stdout)");
        c->add_option("--constraints", constraints, "constraint file (locality, discreteness, expressions)");
    }

    runner::VerifyOptions options(std::ostream*& rec_out, std::ofstream& rec_file) const {
        runner::VerifyOptions vo;
        vo.run.solver = smt::default_config();
        if (!solver_cmd.empty()) vo.run.solver.command = solver_cmd;
        vo.run.solver.timeout_ms = static_cast<unsigned>(timeout * 1000);
        vo.run.solver.dump_dir = dump_smt;
        vo.run.total_timeout_s = total_timeout;
        vo.run.jobs = seq ? 1 : jobs;
        vo.split = !seq;
        rec_out = nullptr;
        if (records == "-") {
            rec_out = &std::cout;
        } else if (!records.empty()) {
            rec_file.open(records);
            if (!rec_file) throw UsageError("cannot write " + records);
            rec_out = &rec_file;
        }
        if (rec_out) {
            std::ostream* o = rec_out;
            vo.run.on_record = [o](const runner::TaskRecord& r) { *o << runner::record_json(r) << "\n" << std::flush; };
        }
        return vo;
    }
};

std::string model_str(const cexpr::Assignment& m, const std::string& prefix_filter = "") {
    std::ostringstream o;
    bool first = true;
    for (const auto& [k, v] : m) {
        if (!prefix_filter.empty() && k.rfind(prefix_filter, 0) != 0) continue;
        if (!v) continue;
        o << (first ? "" : " ") << k;
        first = false;
    }
    return first ? "(none)" : o.str();
}

void print_summary(const std::string& title, const runner::Report& rep) {
    const auto& r = rep.run;
    std::cout << std::left << std::setw(12) << "task" << title << "\n"
              << std::setw(12) << "verdict" << smt::status_name(r.status) << (r.reason.empty() ? "" : " (" + r.reason + ")")
              << "\n"
              << std::setw(12) << "instances" << rep.instances << "\n"
              << std::setw(12) << "subtasks" << r.completed << " solved of " << r.total << "\n"
              << std::setw(12) << "wall" << std::fixed << std::setprecision(3) << r.wall << " s\n";
    for (const auto& n : rep.notes) std::cout << std::setw(12) << "note" << n << "\n";
    if (r.status == smt::Status::Refuted) {
        std::cout << std::setw(12) << "failing" << r.label << "\n";
        std::cout << std::setw(12) << "errors" << model_str(r.model, "e") << "\n";
        std::cout << std::setw(12) << "witness" << model_str(r.model) << "\n";
        if (rep.replay) std::cout << std::setw(12) << "replay" << rep.replay->message << "\n";
    }
    std::cout << runner::summary_json(title, r) << "\n";
}

void dump_instances(const codes::Scenario& sc, const vc::VcOptions& vo) {
    for (const auto& inst : vc::build_correction_vcs(sc, vo)) {
        std::cout << inst.vc.dump() << "  kind: " << vc::case_name(inst.kind) << "\n";
        if (inst.trace) std::cout << inst.trace->str() << "\n";
        if (!inst.failure.empty()) std::cout << "  failure: " << inst.failure << "\n";
    }
}

// ---------------------------------------------------------------- commands

int cmd_verify_correction(const ScenarioArgs& sa, const RunArgs& ra) {
    auto sc = sa.build();
    std::ofstream rf;
    std::ostream* ro = nullptr;
    auto vo = ra.options(ro, rf);
    if (!ra.constraints.empty()) vo.vc.user = runner::parse_constraints(slurp(ra.constraints), sc);
    if (ra.dump_vc) dump_instances(sc, vo.vc);
    auto rep = runner::verify_correction(sc, vo);
    print_summary(sc.name, rep);
    return exit_for(rep.run.status);
}

int cmd_verify_detection(const ScenarioArgs& sa, const RunArgs& ra, std::size_t dt, const std::string& errors) {
    auto code = codes::resolve_code(sa.code, sa.distance);
    std::ofstream rf;
    std::ostream* ro = nullptr;
    auto vo = ra.options(ro, rf);
    vc::DetectionOptions d;
    d.x_errors = errors.find('X') != std::string::npos;
    d.z_errors = errors.find('Z') != std::string::npos;
    if (ra.dump_vc) std::cout << vc::build_detection_vc(code, dt, d).dump() << "\n";
    auto rep = runner::verify_detection(code, dt, d, vo);
    print_summary(code.name + " detection dt=" + std::to_string(dt), rep);
    return exit_for(rep.run.status);
}

int cmd_wlp(const std::string& prog_path, const std::string& post_text, std::size_t n) {
    auto prog = qprog::parse_program(slurp(prog_path));
    auto post = qprog::parse_assertion(post_text);
    std::size_t nq = std::max({n, qprog::program_qubits(*qprog::desugar(prog)), qprog::assertion_qubits(post)});
    std::cout << wlp::wlp_pre(prog, post, nq).str() << "\n";
    return kOk;
}

int cmd_gen_code(const std::string& kind, std::size_t distance, const std::string& out) {
    spit(out, codes::resolve_code("builtin:" + kind, distance).to_text());
    return kOk;
}

int cmd_gen_scenario(ScenarioArgs sa, const std::string& kind, const std::string& out) {
    if (!kind.empty()) sa.code = "builtin:" + kind;
    spit(out, runner::scenario_file(sa.build()));
    return kOk;
}

int cmd_oracle_check(const ScenarioArgs& sa, int max_weight, std::size_t jobs) {
    auto sc = sa.build();
    oracle::OracleOptions o;
    o.max_weight = max_weight >= 0 ? static_cast<std::size_t>(max_weight) : sc.budget;
    o.jobs = jobs;
    auto t0 = std::chrono::steady_clock::now();
    auto v = oracle::brute_force_verify(sc, o);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << sc.name << ": " << (v.verified ? "Verified" : "Refuted") << " by " << v.path << " simulation over "
              << v.patterns << " patterns in " << std::fixed << std::setprecision(3) << secs << " s\n"
              << v.message << "\n";
    return v.verified ? kOk : kRefuted;
}

struct BenchRow {
    std::string name;
    std::string expect;
    std::function<runner::Report()> run;
};

int cmd_bench(const std::string& suite, const RunArgs& ra) {
    if (suite != "paper-subset") throw UsageError("unknown suite '" + suite + "'");
    std::ofstream rf;
    std::ostream* ro = nullptr;
    auto vo = ra.options(ro, rf);
    auto cycle = [](qprog::StabilizerCode c, Gate g, codes::LogicalOp op) {
        codes::CycleOptions o;
        o.error = g;
        o.op = op;
        return codes::ec_cycle(c, o);
    };
    using codes::LogicalOp;
    std::vector<BenchRow> rows = {
        {"steane(Y,H) correction", "Verified",
         [&] { return runner::verify_correction(cycle(codes::steane(), Gate::Y, LogicalOp::H), vo); }},
        {"steane(T,H) correction", "Verified",
         [&] { return runner::verify_correction(cycle(codes::steane(), Gate::T, LogicalOp::H), vo); }},
        {"steane(H,H) correction", "Verified",
         [&] { return runner::verify_correction(cycle(codes::steane(), Gate::H, LogicalOp::H), vo); }},
        {"repetition-5(X) correction", "Verified",
         [&] { return runner::verify_correction(cycle(codes::repetition(5), Gate::X, LogicalOp::None), vo); }},
        {"surface-3(Y) correction", "Verified",
         [&] { return runner::verify_correction(cycle(codes::rotated_surface(3), Gate::Y, LogicalOp::None), vo); }},
        {"surface-5(Y) correction", "Verified",
         [&] { return runner::verify_correction(cycle(codes::rotated_surface(5), Gate::Y, LogicalOp::None), vo); }},
        {"surface-3 detection dt=3", "Verified",
         [&] { return runner::verify_detection(codes::rotated_surface(3), 3, {}, vo); }},
        {"surface-3 detection dt=4", "Refuted",
         [&] { return runner::verify_detection(codes::rotated_surface(3), 4, {}, vo); }},
        {"ghz(Y)", "Verified", [&] { return runner::verify_correction(codes::ghz_scenario(), vo); }},
        {"cnot-propagated(Y)", "Verified", [&] { return runner::verify_correction(codes::cnot_propagated_scenario(), vo); }},
    };
    std::cout << std::left << std::setw(30) << "benchmark" << std::setw(10) << "verdict" << std::setw(10) << "expected"
              << std::setw(10) << "subtasks" << "wall(s)\n";
    bool all = true;
    for (const auto& r : rows) {
        auto rep = r.run();
        std::string got = smt::status_name(rep.run.status);
        all = all && got == r.expect;
        std::cout << std::setw(30) << r.name << std::setw(10) << got << std::setw(10) << r.expect << std::setw(10)
                  << rep.run.total << std::fixed << std::setprecision(3) << rep.run.wall << "\n";
    }
    return all ? kOk : kUnknown;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qecv: verification of quantum error correction programs"};
    app.require_subcommand(1);

    ScenarioArgs vc_sa, det_sa, gs_sa, oc_sa;
    RunArgs vc_ra, det_ra, bench_ra;

    auto* vcmd = app.add_subcommand("verify-correction", "verify that a correction cycle fixes every error within budget");
    vc_sa.add(vcmd);
    vc_ra.add(vcmd);

    std::size_t dt = 3;
    std::string det_errors = "XZ";
    auto* dcmd = app.add_subcommand("verify-detection", "check that no error of weight below dt is undetectable");
    dcmd->add_option("--code", det_sa.code, "code")->capture_default_str();
    dcmd->add_option("--distance", det_sa.distance, "distance for builtin codes")->capture_default_str();
    dcmd->add_option("--dt", dt, "claimed distance")->required()->check(CLI::PositiveNumber);
    dcmd->add_option("--errors", det_errors, "error components")->check(CLI::IsMember({"XZ", "X", "Z"}))->capture_default_str();
    det_ra.add(dcmd);

    std::string prog_path, post_text;
    std::size_t wlp_n = 0;
    auto* wcmd = app.add_subcommand("wlp", "print the weakest liberal precondition");
    wcmd->add_option("--program", prog_path, "program file")->required();
    wcmd->add_option("--post", post_text, "postcondition")->required();
    wcmd->add_option("--qubits", wlp_n, "number of qubits (default: inferred)");

    std::string gc_kind, gc_out;
    std::size_t gc_d = 3;
    auto* gccmd = app.add_subcommand("gen-code", "write a builtin code file");
    gccmd->add_option("kind", gc_kind, "steane|repetition|surface")->required()->check(CLI::IsMember({"steane", "repetition", "surface"}));
    gccmd->add_option("--distance", gc_d, "distance")->capture_default_str();
    gccmd->add_option("-o,--output", gc_out, "output file (default stdout)");

    std::string gs_kind, gs_out;
    auto* gscmd = app.add_subcommand("gen-scenario", "write a scenario file");
    gscmd->add_option("kind", gs_kind, "steane|repetition|surface|ghz|cnot")
        ->check(CLI::IsMember({"steane", "repetition", "surface", "ghz", "cnot"}));
    gs_sa.add(gscmd);
    gscmd->add_option("-o,--output", gs_out, "output file (default stdout)");

    int oc_w = -1;
    std::size_t oc_jobs = 1;
    auto* occmd = app.add_subcommand("oracle-check", "brute-force simulation over every error pattern");
    oc_sa.add(occmd);
    occmd->add_option("--max-weight", oc_w, "largest error weight (default: budget)");
    occmd->add_option("--jobs", oc_jobs, "threads")->check(CLI::PositiveNumber)->capture_default_str();

    std::string suite = "paper-subset";
    auto* bcmd = app.add_subcommand("bench", "run a benchmark suite and print a table");
    bcmd->add_option("--suite", suite, "suite name")->capture_default_str();
    bench_ra.add(bcmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*vcmd) return cmd_verify_correction(vc_sa, vc_ra);
        if (*dcmd) return cmd_verify_detection(det_sa, det_ra, dt, det_errors);
        if (*wcmd) return cmd_wlp(prog_path, post_text, wlp_n);
        if (*gccmd) return cmd_gen_code(gc_kind, gc_d, gc_out);
        if (*gscmd) return cmd_gen_scenario(gs_sa, gs_kind, gs_out);
        if (*occmd) return cmd_oracle_check(oc_sa, oc_w, oc_jobs);
        if (*bcmd) return cmd_bench(suite, bench_ra);
    } catch (const UsageError& e) {
        std::cerr << "qecv: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qecv: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "qecv: " << e.what() << "\n";
        return kUnknown;
    }
    return kUsage;
}
