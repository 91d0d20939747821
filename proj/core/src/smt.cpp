#include "qecv/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace qecv::smt {

using Op = BExp::Op;

const char* status_name(Status s) {
    switch (s) {
        case Status::Verified: return "Verified";
        case Status::Refuted: return "Refuted";
        case Status::Unknown: return "Unknown";
    }
    return "?";
}

SolverConfig default_config() {
    SolverConfig c;
    if (const char* env = std::getenv("QECV_SOLVER"); env && *env) c.command = env;
    return c;
}

unsigned sum_width(std::size_t nvars, std::int64_t maxlit) {
    auto m = static_cast<std::uint64_t>(std::max<std::int64_t>(static_cast<std::int64_t>(nvars), std::max<std::int64_t>(maxlit, 1)));
    unsigned bits = 0;
    while (m) {
        ++bits;
        m >>= 1;
    }
    return bits + 1;
}

namespace {

std::string bv(std::int64_t v, unsigned w) {
    if (v < 0) v += std::int64_t{1} << w;
    return "(_ bv" + std::to_string(v) + " " + std::to_string(w) + ")";
}

std::string join_args(const char* op, const std::vector<std::string>& xs) {
    std::string s = "(" + std::string(op);
    for (const auto& x : xs) s += " " + x;
    return s + ")";
}

bool boolish(const BExp& e) { return e.is_bool(); }

void max_literal(const BExp& e, std::int64_t& m) {
    if (e.op() == Op::Int) m = std::max(m, e.value() < 0 ? -e.value() : e.value());
    for (const auto& a : e.args()) max_literal(a, m);
}

std::string quote(const std::string& v) {
    bool plain = std::all_of(v.begin(), v.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    return plain ? v : "|" + v + "|";
}

}  // namespace

std::string to_smt_bool(const BExp& e, unsigned w) {
    switch (e.op()) {
        case Op::True: return "true";
        case Op::False: return "false";
        case Op::Int: return e.value() ? "true" : "false";
        case Op::Var: return "(= " + quote(e.name()) + " #b1)";
        case Op::Not: return "(not " + to_smt_bool(e.args()[0], w) + ")";
        case Op::And:
        case Op::Or:
        case Op::Xor: {
            std::vector<std::string> xs;
            for (const auto& a : e.args()) xs.push_back(to_smt_bool(a, w));
            if (xs.size() == 1) return xs[0];
            return join_args(e.op() == Op::And ? "and" : e.op() == Op::Or ? "or" : "xor", xs);
        }
        case Op::Imp: return "(=> " + to_smt_bool(e.args()[0], w) + " " + to_smt_bool(e.args()[1], w) + ")";
        case Op::Eq: {
            const auto& a = e.args()[0];
            const auto& b = e.args()[1];
            if (boolish(a) && boolish(b)) return "(= " + to_smt_bool(a, w) + " " + to_smt_bool(b, w) + ")";
            return "(= " + to_smt_int(a, w) + " " + to_smt_int(b, w) + ")";
        }
        case Op::Le: return "(bvule " + to_smt_int(e.args()[0], w) + " " + to_smt_int(e.args()[1], w) + ")";
        case Op::Lt: return "(bvult " + to_smt_int(e.args()[0], w) + " " + to_smt_int(e.args()[1], w) + ")";
        case Op::Add:
        case Op::Sub:
        case Op::Mul: return "(not (= " + to_smt_int(e, w) + " " + bv(0, w) + "))";
    }
    return "true";
}

std::string to_smt_int(const BExp& e, unsigned w) {
    switch (e.op()) {
        case Op::Int: return bv(e.value(), w);
        case Op::True: return bv(1, w);
        case Op::False: return bv(0, w);
        case Op::Var:
            return w == 1 ? quote(e.name()) : "((_ zero_extend " + std::to_string(w - 1) + ") " + quote(e.name()) + ")";
        case Op::Add:
        case Op::Mul: {
            std::vector<std::string> xs;
            for (const auto& a : e.args()) xs.push_back(to_smt_int(a, w));
            if (xs.size() == 1) return xs[0];
            return join_args(e.op() == Op::Add ? "bvadd" : "bvmul", xs);
        }
        case Op::Sub: return "(bvsub " + to_smt_int(e.args()[0], w) + " " + to_smt_int(e.args()[1], w) + ")";
        default: return "(ite " + to_smt_bool(e, w) + " " + bv(1, w) + " " + bv(0, w) + ")";
    }
}

Encoding encode(const ClassicalVC& vc) {
    Encoding enc;
    std::set<std::string> seen;
    auto add = [&](const std::string& v) {
        if (seen.insert(v).second) enc.vars.push_back(v);
    };
    for (const auto& v : vc.universals) add(v);
    for (const auto& v : vc.defined) add(v);
    BExp hyp = vc.hypothesis(), goal = vc.goal_bexp();
    std::set<std::string> extra;
    cexpr::free_vars(hyp, extra);
    cexpr::free_vars(goal, extra);
    for (const auto& v : extra) add(v);

    std::int64_t maxlit = 0;
    max_literal(hyp, maxlit);
    max_literal(goal, maxlit);
    enc.width = sum_width(enc.vars.size(), maxlit);
    unsigned w = enc.width;

    std::ostringstream o;
    o << "; " << vc.label << "\n";
    bool quant = vc.mode == ClassicalVC::Mode::Validity && vc.exists_form;
    o << "(set-logic " << (quant ? "BV" : "QF_BV") << ")\n";
    o << "(set-option :produce-models true)\n";
    std::set<std::string> defined(vc.defined.begin(), vc.defined.end());
    std::vector<std::string> declared;
    for (const auto& v : enc.vars) {
        if (quant && defined.count(v)) continue;
        o << "(declare-fun " << quote(v) << " () (_ BitVec 1))\n";
        declared.push_back(v);
    }
    if (vc.mode == ClassicalVC::Mode::Satisfiable) {
        o << "(assert " << to_smt_bool(hyp, w) << ")\n";
        o << "(assert " << to_smt_bool(goal, w) << ")\n";
    } else if (!quant) {
        o << "(assert " << to_smt_bool(hyp, w) << ")\n";
        o << "(assert (not " << to_smt_bool(goal, w) << "))\n";
    } else {
        // forall universals . budget /\ user => exists defined . decoder /\ sd /\ goal
        o << "(assert " << to_smt_bool(cexpr::mk_and(vc.budget, vc.user), w) << ")\n";
        BExp inner = cexpr::mk_and(std::vector<BExp>{vc.decoder, vc.sd_bexp(), goal});
        o << "(assert (not (exists (";
        for (const auto& v : vc.defined) o << "(" << quote(v) << " (_ BitVec 1))";
        o << ") " << to_smt_bool(inner, w) << ")))\n";
    }
    o << "(check-sat)\n";
    if (!declared.empty()) {
        o << "(get-value (";
        for (std::size_t i = 0; i < declared.size(); ++i) o << (i ? " " : "") << quote(declared[i]);
        o << "))\n";
    }
    o << "(exit)\n";
    enc.script = o.str();
    return enc;
}

namespace {

std::vector<std::string> split_command(const std::string& tmpl, unsigned timeout_ms) {
    std::string s = tmpl;
    auto repl = [&](const std::string& key, const std::string& val) {
        for (std::size_t p; (p = s.find(key)) != std::string::npos;) s.replace(p, key.size(), val);
    };
    repl("{timeout_ms}", std::to_string(timeout_ms));
    repl("{timeout_s}", std::to_string((timeout_ms + 999) / 1000));
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

void set_nonblock(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

RawResult run_solver(const std::string& script, const SolverConfig& cfg, const std::atomic<bool>* cancel) {
    RawResult r;
    auto argv_s = split_command(cfg.command, cfg.timeout_ms);
    if (argv_s.empty()) {
        r.spawn_failed = true;
        r.err = "empty solver command";
        return r;
    }
    int in_p[2], out_p[2], err_p[2];
    if (pipe(in_p) || pipe(out_p) || pipe(err_p)) {
        r.spawn_failed = true;
        r.err = std::strerror(errno);
        return r;
    }
    pid_t pid = fork();
    if (pid < 0) {
        r.spawn_failed = true;
        r.err = std::strerror(errno);
        return r;
    }
    if (pid == 0) {
        dup2(in_p[0], 0);
        dup2(out_p[1], 1);
        dup2(err_p[1], 2);
        for (int fd : {in_p[0], in_p[1], out_p[0], out_p[1], err_p[0], err_p[1]}) close(fd);
        std::vector<char*> argv;
        for (auto& a : argv_s) argv.push_back(a.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        std::fprintf(stderr, "cannot execute %s: %s\n", argv[0], std::strerror(errno));
        _exit(127);
    }
    close(in_p[0]);
    close(out_p[1]);
    close(err_p[1]);
    set_nonblock(in_p[1]);
    set_nonblock(out_p[0]);
    set_nonblock(err_p[0]);
    signal(SIGPIPE, SIG_IGN);

    auto start = std::chrono::steady_clock::now();
    // the solver enforces its own limit; the hard kill leaves it some slack
    auto hard = std::chrono::milliseconds(cfg.timeout_ms + cfg.timeout_ms / 2 + 1000);
    std::size_t written = 0;
    int wfd = in_p[1], ofd = out_p[0], efd = err_p[0];
    if (script.empty()) {
        close(wfd);
        wfd = -1;
    }
    char buf[65536];
    while (ofd >= 0 || efd >= 0) {
        if (cancel && cancel->load()) {
            r.cancelled = true;
            break;
        }
        if (std::chrono::steady_clock::now() - start > hard) {
            r.timed_out = true;
            break;
        }
        std::vector<pollfd> fds;
        if (wfd >= 0) fds.push_back({wfd, POLLOUT, 0});
        if (ofd >= 0) fds.push_back({ofd, POLLIN, 0});
        if (efd >= 0) fds.push_back({efd, POLLIN, 0});
        int n = poll(fds.data(), fds.size(), 50);
        if (n < 0 && errno != EINTR) break;
        for (const auto& p : fds) {
            if (!p.revents) continue;
            if (p.fd == wfd) {
                ssize_t k = write(wfd, script.data() + written, script.size() - written);
                if (k > 0) written += static_cast<std::size_t>(k);
                if (k < 0 && errno != EAGAIN) written = script.size();
                if (written >= script.size()) {
                    close(wfd);
                    wfd = -1;
                }
            } else {
                ssize_t k = read(p.fd, buf, sizeof buf);
                if (k > 0) (p.fd == ofd ? r.out : r.err).append(buf, static_cast<std::size_t>(k));
                else if (k == 0 || errno != EAGAIN) {
                    close(p.fd);
                    (p.fd == ofd ? ofd : efd) = -1;
                }
            }
        }
    }
    for (int fd : {wfd, ofd, efd})
        if (fd >= 0) close(fd);
    int status = 0;
    if (r.cancelled || r.timed_out) {
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        return r;
    }
    waitpid(pid, &status, 0);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (r.exit_code == 127) r.spawn_failed = true;
    return r;
}

Assignment parse_model(const std::string& out) {
    static const std::regex re(R"(\(\s*\|?([^\s()|]+)\|?\s+#b([01])\s*\))");
    Assignment m;
    for (std::sregex_iterator it(out.begin(), out.end(), re), end; it != end; ++it)
        m[(*it)[1].str()] = (*it)[2].str() == "1";
    return m;
}

bool model_replays(const ClassicalVC& vc, const Assignment& model) {
    try {
        bool hyp = cexpr::holds(vc.hypothesis(), model);
        bool goal = cexpr::holds(vc.goal_bexp(), model);
        if (vc.mode == ClassicalVC::Mode::Satisfiable) return hyp && goal;
        if (vc.exists_form) return cexpr::holds(cexpr::mk_and(vc.budget, vc.user), model);
        return hyp && !goal;
    } catch (const cexpr::EvalError&) {
        return false;
    }
}

Verdict check(const ClassicalVC& vc, const SolverConfig& cfg, const std::atomic<bool>* cancel) {
    Verdict v;
    v.label = vc.label;
    auto t0 = std::chrono::steady_clock::now();
    auto done = [&]() {
        v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return v;
    };
    Encoding enc = encode(vc);
    if (!cfg.dump_dir.empty()) {
        std::filesystem::create_directories(cfg.dump_dir);
        std::string name;
        for (char c : vc.label) name += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
        std::ofstream(std::filesystem::path(cfg.dump_dir) / (name + ".smt2")) << enc.script;
    }
    RawResult raw = run_solver(enc.script, cfg, cancel);
    if (raw.cancelled) {
        v.reason = "cancelled";
        return done();
    }
    if (raw.timed_out) {
        v.reason = "timeout";
        return done();
    }
    std::istringstream lines(raw.out);
    std::string first;
    while (std::getline(lines, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
    }
    first.erase(first.find_last_not_of(" \t\r") + 1);
    if (raw.spawn_failed || (first != "sat" && first != "unsat" && first != "unknown")) {
        std::string msg = raw.err.empty() ? first : raw.err;
        if (auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
        v.reason = "solver-error: " + msg;
        return done();
    }
    bool sat = first == "sat";
    if (first == "unknown") {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.reason = secs * 1000 >= 0.9 * cfg.timeout_ms ? "timeout" : "solver-unknown";
        return done();
    }
    if (!sat) {
        v.status = Status::Verified;
        return done();
    }
    v.model = parse_model(raw.out);
    for (const auto& x : enc.vars)
        if (!v.model.count(x)) v.model[x] = 0;
    for (const auto& [k, val] : vc.fixed) v.model[k] = val;
    v.status = Status::Refuted;
    if (!model_replays(vc, v.model)) {
        v.status = Status::Unknown;
        v.reason = "solver-error: model does not satisfy the query";
    }
    return done();
}

}  // namespace qecv::smt
