#include "qecv/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace qecv::runner {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void dfs(const ClassicalVC& vc, const BExp& feasible, std::size_t d, std::size_t n, Assignment& a, std::size_t ones,
         std::vector<Subtask>& out) {
    if (cexpr::partial_eval(feasible, a).is_false()) return;
    std::size_t bits = a.size();
    if (bits == vc.error_vars.size() || 2 * d * ones + bits > n) {
        Subtask t;
        t.id = out.size();
        t.assignment = a;
        t.vc = vc.specialize(a);
        out.push_back(std::move(t));
        return;
    }
    const std::string& v = vc.error_vars[bits];
    for (int b = 0; b < 2; ++b) {
        a[v] = b;
        dfs(vc, feasible, d, n, a, ones + b, out);
    }
    a.erase(v);
}

char basis_of(const std::string& label) {
    auto p = label.find("basis=");
    return p == std::string::npos || p + 6 >= label.size() ? 'Z' : label[p + 6];
}

}  // namespace

std::vector<Subtask> split(const ClassicalVC& vc, std::size_t d, std::size_t n) {
    std::vector<Subtask> out;
    Assignment a;
    dfs(vc, cexpr::mk_and({vc.budget, vc.user}), d, n, a, 0, out);
    return out;
}

std::vector<Subtask> whole(const std::vector<vc::VcInstance>& instances) {
    std::vector<Subtask> out;
    for (const auto& inst : instances) {
        Subtask t;
        t.id = out.size();
        t.vc = inst.vc;
        t.failure = inst.failure;
        out.push_back(std::move(t));
    }
    return out;
}

std::string record_json(const TaskRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["verdict"] = smt::status_name(r.status);
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["wall"] = r.seconds;
    return j.dump();
}

std::string summary_json(const std::string& task, const RunResult& r) {
    nlohmann::json j;
    j["task"] = task;
    j["verdict"] = smt::status_name(r.status);
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["subtasks"] = r.total;
    j["completed"] = r.completed;
    j["wall"] = r.wall;
    return j.dump();
}

std::size_t default_jobs() {
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

RunResult run_parallel(const std::vector<Subtask>& tasks, const RunOptions& opts) {
    RunResult res;
    res.total = tasks.size();
    auto t0 = Clock::now();
    std::atomic<std::size_t> next{0};
    std::atomic<bool> cancel{false};
    std::atomic<bool> deadline_hit{false};
    std::mutex mu;
    bool refuted = false, unknown = false;

    auto record = [&](TaskRecord r) {
        std::lock_guard<std::mutex> lk(mu);
        if (opts.on_record) opts.on_record(r);
        res.records.push_back(std::move(r));
    };

    auto worker = [&]() {
        while (!cancel.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Subtask& t = tasks[i];
            TaskRecord r;
            r.id = t.id;
            r.label = t.vc.label;
            if (!t.assignment.empty()) {
                r.label += " [";
                bool first = true;
                for (const auto& [k, v] : t.assignment) {
                    if (!v) continue;
                    r.label += (first ? "" : " ") + k;
                    first = false;
                }
                r.label += first ? "no errors]" : "]";
            }
            if (!t.failure.empty()) {
                r.reason = "reduction-failed: " + t.failure;
                {
                    std::lock_guard<std::mutex> lk(mu);
                    unknown = true;
                }
                record(std::move(r));
                continue;
            }
            smt::Verdict v;
            try {
                v = smt::check(t.vc, opts.solver, &cancel);
            } catch (const std::exception& e) {
                v.status = Status::Unknown;
                v.reason = std::string("worker error: ") + e.what();
            }
            r.status = v.status;
            r.reason = v.reason;
            r.seconds = v.seconds;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (v.status == Status::Refuted) {
                    if (!refuted) {
                        refuted = true;
                        res.witness_task = i;
                        res.model = v.model;
                        res.label = t.vc.label;
                    }
                    cancel.store(true);
                } else if (v.status == Status::Unknown && v.reason != "cancelled") {
                    unknown = true;
                    if (res.reason.empty()) res.reason = v.reason;
                }
                if (v.status != Status::Unknown) ++res.completed;
            }
            if (v.reason == "cancelled" && refuted) continue;
            record(std::move(r));
        }
    };

    // the watchdog enforces the total time budget
    std::mutex wmu;
    std::condition_variable wcv;
    bool finished = false;
    std::thread watchdog([&]() {
        std::unique_lock<std::mutex> lk(wmu);
        auto limit = std::chrono::duration<double>(opts.total_timeout_s);
        if (!wcv.wait_for(lk, limit, [&] { return finished; })) {
            deadline_hit.store(true);
            cancel.store(true);
        }
    });

    std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, std::max<std::size_t>(1, tasks.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> ts;
        for (std::size_t k = 0; k < jobs; ++k) ts.emplace_back(worker);
        for (auto& t : ts) t.join();
    }
    {
        std::lock_guard<std::mutex> lk(wmu);
        finished = true;
    }
    wcv.notify_all();
    watchdog.join();

    res.wall = since(t0);
    if (refuted) {
        res.status = Status::Refuted;
        res.reason.clear();
    } else if (unknown || deadline_hit.load()) {
        res.status = Status::Unknown;
        if (deadline_hit.load()) res.reason = "timeout";
    } else {
        res.status = Status::Verified;
    }
    std::sort(res.records.begin(), res.records.end(), [](const TaskRecord& a, const TaskRecord& b) { return a.id < b.id; });
    return res;
}

// ---------------------------------------------------------------- drivers

namespace {

std::vector<Subtask> expand(const std::vector<vc::VcInstance>& instances, const VerifyOptions& opts, std::size_t d,
                            std::size_t n) {
    if (!opts.split) return whole(instances);
    std::vector<Subtask> out;
    for (const auto& inst : instances) {
        if (!inst.failure.empty()) {
            Subtask t;
            t.vc = inst.vc;
            t.failure = inst.failure;
            t.id = out.size();
            out.push_back(std::move(t));
            continue;
        }
        for (auto& t : split(inst.vc, d, n)) {
            t.id = out.size();
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace

Report verify_correction(const codes::Scenario& sc, const VerifyOptions& opts) {
    Report rep;
    auto instances = vc::build_correction_vcs(sc, opts.vc);
    rep.instances = instances.size();
    for (const auto& inst : instances)
        for (const auto& note : inst.vc.notes) rep.notes.push_back(inst.vc.label + ": " + note);
    std::size_t d = opts.distance ? opts.distance : std::max<std::size_t>(sc.code.d, 1);
    auto tasks = expand(instances, opts, d, sc.n);
    rep.subtasks = tasks.size();
    rep.run = run_parallel(tasks, opts.run);
    if (rep.run.status == Status::Refuted) {
        rep.basis = basis_of(rep.run.label);
        try {
            rep.replay = oracle::replay(sc, rep.run.model, rep.basis);
        } catch (const std::exception& e) {
            rep.replay = oracle::ReplayResult{false, std::string("replay unavailable: ") + e.what()};
        }
    }
    return rep;
}

Report verify_detection(const qprog::StabilizerCode& code, std::size_t dt, const vc::DetectionOptions& dopts,
                        const VerifyOptions& opts) {
    Report rep;
    vc::VcInstance inst;
    inst.vc = vc::build_detection_vc(code, dt, dopts);
    rep.instances = 1;
    std::size_t d = opts.distance ? opts.distance : std::max<std::size_t>(code.d, 1);
    auto tasks = expand({inst}, opts, d, code.n);
    rep.subtasks = tasks.size();
    rep.run = run_parallel(tasks, opts.run);
    if (rep.run.status == Status::Refuted) rep.replay = oracle::replay_detection(code, rep.run.model);
    return rep;
}

}  // namespace qecv::runner

namespace qecv::runner {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::size_t to_size(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad " + what + ": '" + s + "'");
    }
}

}  // namespace

std::string scenario_file(const codes::Scenario& sc) {
    std::ostringstream o;
    o << "#! name " << sc.name << "\n";
    o << "#! budget " << sc.budget << "\n";
    std::istringstream code(sc.code.to_text());
    std::string line;
    while (std::getline(code, line)) o << "#! | " << line << "\n";
    o << sc.program_text();
    return o.str();
}

codes::Scenario parse_scenario_file(const std::string& text) {
    std::istringstream in(text);
    std::string line, name = "custom", code_text, code_spec;
    std::size_t budget = 1, distance = 3;
    bool have_budget = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("#!", 0) != 0) continue;
        std::string body = trim(line.substr(2));
        if (body.rfind("|", 0) == 0) {
            code_text += (body.size() > 1 ? trim(body.substr(1)) : "") + "\n";
            continue;
        }
        auto w = words(body);
        if (w.empty()) continue;
        if (w[0] == "name" && w.size() >= 2) {
            name = trim(body.substr(4));
        } else if (w[0] == "budget" && w.size() == 2) {
            budget = to_size(w[1], "budget");
            have_budget = true;
        } else if (w[0] == "code" && (w.size() == 2 || w.size() == 3)) {
            code_spec = w[1];
            if (w.size() == 3) distance = to_size(w[2], "distance");
        } else {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown directive '" + body + "'");
        }
    }
    qprog::StabilizerCode code;
    if (!code_text.empty()) code = qprog::parse_code(code_text, "inline");
    else if (!code_spec.empty()) code = codes::resolve_code(code_spec, distance);
    else throw std::invalid_argument("scenario file names no code");
    if (!have_budget) budget = code.d > 0 ? (code.d - 1) / 2 : 1;
    auto prog = qprog::parse_program(text);
    return codes::custom_scenario(code, prog, budget, name);
}

codes::Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario_file(ss.str());
}

BExp parse_constraints(const std::string& text, const codes::Scenario& sc) {
    std::istringstream in(text);
    std::string line;
    std::vector<BExp> parts;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto w = words(line);
        if (w[0] == "locality") {
            std::vector<std::size_t> qs;
            if (w.size() == 4 && w[1] == "random") {
                qs = codes::random_sites(sc.n, to_size(w[2], "site count"), to_size(w[3], "seed"));
            } else {
                for (std::size_t k = 1; k < w.size(); ++k) qs.push_back(to_size(w[k], "qubit"));
            }
            parts.push_back(codes::locality(sc, qs));
        } else if (w[0] == "discreteness" && w.size() == 2) {
            parts.push_back(codes::discreteness(sc, to_size(w[1], "segment count")));
        } else {
            parts.push_back(qprog::parse_bexp(line));
        }
    }
    return cexpr::mk_and(parts);
}

}  // namespace qecv::runner
