#include <algorithm>
#include <cctype>
#include <regex>

#include "qecv/qprog.hpp"

namespace qecv::qprog {

namespace {

enum class Tk { Ident, Num, Sym, End };

struct Token {
    Tk kind;
    std::string text;
    int line, col;
};

const char* const kSymbols[] = {":=", "*=", "..", "=>", "<=", ">=", "==", "!=", "/\\", "\\/", "|0>",
                                ";",  ",",  "(",  ")",  "[",  "]",  "{",  "}",  "+",  "-",   "*",
                                "^",  "~",  "<",  ">",  ":",  "/"};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto adv = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
            while (i < s.size() && s[i] != '\n') adv(1);
            continue;
        }
        int l0 = line, c0 = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tk::Ident, s.substr(i, j - i), l0, c0});
            adv(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tk::Num, s.substr(i, j - i), l0, c0});
            adv(j - i);
            continue;
        }
        bool found = false;
        for (const char* sym : kSymbols) {
            std::size_t L = std::char_traits<char>::length(sym);
            if (s.compare(i, L, sym) == 0) {
                out.push_back({Tk::Sym, sym, l0, c0});
                adv(L);
                found = true;
                break;
            }
        }
        if (!found) throw ParseError(l0, c0, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tk::End, "", line, col});
    return out;
}

const std::regex kSparse("^[XYZ]_?([0-9]+)$");
const std::regex kDense("^[IXYZ]+$");
const std::regex kAlias("^g([0-9]+)$");
const std::regex kVarFactor("^([XYZ])_([A-Za-z][A-Za-z0-9_]*)$");
const std::regex kQubit("^q_?([0-9]+)$");
const std::regex kQubitVar("^q_([A-Za-z][A-Za-z0-9_]*)$");

class Parser {
public:
    Parser(const std::string& text, const ParseOptions& opts) : toks_(lex(text)), opts_(opts) {
        n_ = opts.n;
        if (opts.code) n_ = std::max(n_, opts.code->n);
        std::smatch m;
        for (const auto& t : toks_) {
            if (t.kind != Tk::Ident) continue;
            if (std::regex_match(t.text, m, kSparse) || std::regex_match(t.text, m, kQubit))
                n_ = std::max<std::size_t>(n_, std::stoul(m[1].str()));
            else if (t.text != "I" && std::regex_match(t.text, kDense) && t.text.size() > 1)
                n_ = std::max(n_, t.text.size());
        }
        if (n_ == 0) n_ = 1;
    }

    std::size_t n() const { return n_; }

    // ------------------------------------------------------------ tokens

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tk::End; }
    bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tk::Sym && peek(k).text == s; }
    bool is_kw(const char* s, std::size_t k = 0) const { return peek(k).kind == Tk::Ident && peek(k).text == s; }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const auto& t = peek();
        std::string got = t.kind == Tk::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.col, msg + ", got " + got);
    }
    void expect_sym(const char* s) {
        if (!is_sym(s)) fail(std::string("expected '") + s + "'");
        next();
    }
    void expect_kw(const char* s) {
        if (!is_kw(s)) fail(std::string("expected '") + s + "'");
        next();
    }
    std::string expect_ident(const char* what) {
        if (peek().kind != Tk::Ident) fail(std::string("expected ") + what);
        return next().text;
    }
    std::int64_t expect_num() {
        if (peek().kind != Tk::Num) fail("expected a number");
        return std::stoll(next().text);
    }
    void expect_end() {
        if (!at_end()) fail("unexpected trailing input");
    }

    // ------------------------------------------------------------ bexp

    static bool keyword(const std::string& s) {
        static const char* kws[] = {"then", "else", "end", "do", "in", "invariant", "xor", "bigvee", "meas", "decode"};
        for (auto k : kws)
            if (s == k) return true;
        return false;
    }

    BExp b_imp() {
        BExp a = b_or();
        if (is_sym("=>")) {
            next();
            return cexpr::mk_imp(a, b_imp());
        }
        return a;
    }
    BExp b_or() {
        std::vector<BExp> xs{b_and()};
        while (is_sym("\\/")) {
            next();
            xs.push_back(b_and());
        }
        return xs.size() == 1 ? xs[0] : cexpr::mk_or(xs);
    }
    BExp b_and() {
        std::vector<BExp> xs{b_not()};
        while (is_sym("/\\")) {
            next();
            xs.push_back(b_not());
        }
        return xs.size() == 1 ? xs[0] : cexpr::mk_and(xs);
    }
    BExp b_not() {
        if (is_sym("~")) {
            next();
            return cexpr::mk_not(b_not());
        }
        return b_cmp();
    }
    bool at_cmp() const {
        return is_sym("==") || is_sym("<=") || is_sym("<") || is_sym(">=") || is_sym(">") || is_sym("!=");
    }
    bool at_arith() const { return at_cmp() || is_sym("+") || is_sym("-") || is_sym("*") || is_sym("^") || is_kw("xor"); }
    BExp b_cmp() {
        BExp a = b_xor();
        if (!at_cmp()) return a;
        std::string op = next().text;
        BExp b = b_xor();
        if (op == "==") return cexpr::mk_eq(a, b);
        if (op == "<=") return cexpr::mk_le(a, b);
        if (op == "<") return cexpr::mk_lt(a, b);
        if (op == ">=") return cexpr::mk_le(b, a);
        if (op == ">") return cexpr::mk_lt(b, a);
        return cexpr::mk_not(cexpr::mk_eq(a, b));
    }
    BExp b_xor() {
        std::vector<BExp> xs{b_add()};
        while (is_sym("^") || is_kw("xor")) {
            next();
            xs.push_back(b_add());
        }
        return xs.size() == 1 ? xs[0] : cexpr::mk_xor(xs);
    }
    BExp b_add() {
        BExp acc = b_mul();
        while (is_sym("+") || is_sym("-")) {
            bool plus = next().text == "+";
            BExp r = b_mul();
            acc = plus ? cexpr::mk_add({acc, r}) : cexpr::mk_sub(acc, r);
        }
        return acc;
    }
    BExp b_mul() {
        BExp acc = b_atom();
        while (is_sym("*")) {
            next();
            acc = cexpr::mk_mul(acc, b_atom());
        }
        return acc;
    }
    BExp b_atom() {
        const Token& t = peek();
        if (t.kind == Tk::Num) return BExp::num(expect_num());
        if (is_sym("~")) {
            next();
            return cexpr::mk_not(b_atom());
        }
        if (t.kind == Tk::Ident) {
            if (t.text == "true") {
                next();
                return BExp::tt();
            }
            if (t.text == "false") {
                next();
                return BExp::ff();
            }
            if (keyword(t.text)) fail("expected an expression");
            return BExp::var(next().text);
        }
        if (is_sym("(")) {
            next();
            BExp e = b_imp();
            expect_sym(")");
            return e;
        }
        fail("expected an expression");
    }

    // ------------------------------------------------------------ Pauli

    bool at_pauli_factor(std::size_t k = 0) const {
        const Token& t = peek(k);
        if (t.kind != Tk::Ident) return false;
        if (std::regex_match(t.text, kSparse) || std::regex_match(t.text, kDense)) return true;
        return opts_.code && std::regex_match(t.text, kAlias);
    }

    PauliTerm resize(const PauliTerm& t) const {
        if (t.n() == n_) return t;
        PauliTerm r(n_);
        r.scalar = t.scalar;
        r.sign = t.sign;
        r.iexp = t.iexp;
        for (std::size_t q = 1; q <= t.n(); ++q) r.set_letter(q, t.letter(q));
        return r;
    }

    PauliTerm alias_term(const Token& t) {
        std::smatch m;
        std::regex_match(t.text, m, kAlias);
        std::size_t g = std::stoul(m[1].str());
        if (g < 1 || g > opts_.code->generators.size())
            throw ParseError(t.line, t.col, "generator alias '" + t.text + "' out of range");
        return resize(opts_.code->generators[g - 1]);
    }

    // word := factor+ ; dense strings stand alone
    PauliTerm p_word() {
        PauliTerm acc(n_);
        bool any = false;
        while (at_pauli_factor()) {
            Token t = next();
            std::smatch m;
            PauliTerm f(n_);
            if (std::regex_match(t.text, m, kSparse)) {
                std::size_t q = std::stoul(m[1].str());
                if (q == 0) throw ParseError(t.line, t.col, "qubit indices start at 1");
                f.set_letter(q, t.text[0]);
            } else if (t.text == "I") {
            } else if (std::regex_match(t.text, kDense)) {
                f = resize(PauliTerm::parse_dense(t.text));
            } else {
                f = alias_term(t);
            }
            acc = pauli::mul(acc, f);
            any = true;
        }
        if (!any) fail("expected a Pauli string");
        acc.canonicalize();
        return acc;
    }

    bool at_phase_prefix() const {
        return is_sym("(") && is_sym("-", 1) && peek(2).kind == Tk::Num && peek(2).text == "1" && is_sym(")", 3) &&
               is_sym("^", 4);
    }

    PhasePoly p_phase_prefix() {
        for (int i = 0; i < 5; ++i) next();
        auto item = [&]() -> PhasePoly {
            const Token& t = peek();
            if (t.kind == Tk::Num) {
                auto v = expect_num();
                return PhasePoly::constant(v & 1);
            }
            return PhasePoly::atom(expect_ident("a phase variable"));
        };
        if (!is_sym("(")) return item();
        next();
        PhasePoly p = item();
        while (is_sym("+")) {
            next();
            p ^= item();
        }
        expect_sym(")");
        return p;
    }

    pauli::SRing p_scalar() {
        pauli::SRing num;
        auto sqrt2_mult = [&](std::int64_t c) {
            expect_kw("sqrt2");
            return pauli::SRing(0, c);
        };
        if (is_kw("sqrt2")) {
            num = sqrt2_mult(1);
        } else if (peek().kind == Tk::Num) {
            auto v = expect_num();
            if (is_sym("*") && is_kw("sqrt2", 1)) {
                next();
                num = sqrt2_mult(v);
            } else {
                num = pauli::SRing(v);
            }
        } else {
            expect_sym("(");
            auto x = expect_num();
            bool minus = is_sym("-");
            if (!minus) expect_sym("+");
            else next();
            std::int64_t y = 1;
            if (peek().kind == Tk::Num) {
                y = expect_num();
                expect_sym("*");
            }
            expect_kw("sqrt2");
            expect_sym(")");
            num = pauli::SRing(x, minus ? -y : y);
        }
        if (is_sym("/")) {
            next();
            Token t = peek();
            auto den = expect_num();
            unsigned k = 0;
            while ((std::int64_t{1} << k) < den) ++k;
            if ((std::int64_t{1} << k) != den) throw ParseError(t.line, t.col, "scalar denominators must be powers of two");
            num = num * pauli::SRing(1, 0, k);
        }
        return num;
    }

    bool at_scalar() const {
        if (peek().kind == Tk::Num || is_kw("sqrt2")) return true;
        return is_sym("(") && peek(1).kind == Tk::Num;
    }

    // [phase] ["i" "*"] [scalar "*"] word
    PauliTerm p_term(bool in_sum) {
        PhasePoly ph;
        if (is_sym("-")) {
            next();
            ph = PhasePoly::one();
        } else if (at_phase_prefix()) {
            ph = p_phase_prefix();
        }
        int iexp = 0;
        pauli::SRing sc = pauli::SRing::one();
        if (in_sum) {
            if (is_kw("i") && is_sym("*", 1)) {
                next();
                next();
                iexp = 1;
            }
            if (at_scalar()) {
                sc = p_scalar();
                expect_sym("*");
            }
        }
        PauliTerm t = p_word();
        t.sign ^= ph;
        t.iexp += iexp;
        t.scalar = t.scalar * sc;
        t.canonicalize();
        return t;
    }

    PauliSum p_sum() {
        expect_sym("[");
        std::vector<PauliTerm> ts;
        if (is_sym("]")) {
            next();
            return PauliSum(n_);
        }
        ts.push_back(p_term(true));
        while (is_sym("+") || is_sym("-")) {
            bool minus = is_sym("-");
            next();
            PauliTerm t = p_term(true);
            if (minus) t.sign = t.sign.flipped();
            ts.push_back(t);
        }
        expect_sym("]");
        return PauliSum::from_terms(n_, ts);
    }

    // ------------------------------------------------------------ assertions

    Assertion a_imp_() {
        Assertion a = a_or_();
        if (is_sym("=>")) {
            next();
            return a_imp(a, a_imp_());
        }
        return a;
    }
    Assertion a_or_() {
        std::vector<Assertion> xs{a_and_()};
        while (is_sym("\\/")) {
            next();
            xs.push_back(a_and_());
        }
        return xs.size() == 1 ? xs[0] : a_or(xs);
    }
    Assertion a_and_() {
        std::vector<Assertion> xs{a_not_()};
        while (is_sym("/\\")) {
            next();
            xs.push_back(a_not_());
        }
        return xs.size() == 1 ? xs[0] : a_and(xs);
    }
    Assertion a_not_() {
        if (is_sym("~")) {
            next();
            return a_not(a_not_());
        }
        return a_primary();
    }
    Assertion a_primary() {
        if (is_kw("bigvee")) {
            next();
            std::vector<std::string> vs{expect_ident("a variable")};
            while (is_sym(",")) {
                next();
                vs.push_back(expect_ident("a variable"));
            }
            expect_kw("in");
            expect_sym("{");
            if (expect_num() != 0) fail("expected {0,1}");
            expect_sym(",");
            if (expect_num() != 1) fail("expected {0,1}");
            expect_sym("}");
            expect_sym("^");
            Token t = peek();
            auto k = expect_num();
            if (static_cast<std::size_t>(k) != vs.size())
                throw ParseError(t.line, t.col, "bigvee arity does not match the number of bound variables");
            expect_sym(":");
            return a_bigvee(vs, a_imp_());
        }
        if (is_sym("[")) return Assertion::atom(p_sum());
        if (at_phase_prefix() || (is_sym("-") && at_pauli_factor(1)) || at_pauli_factor())
            return Assertion::atom(PauliSum(p_term(false)));
        if (is_sym("(")) {
            std::size_t save = pos_;
            try {
                next();
                Assertion a = a_imp_();
                expect_sym(")");
                if (!at_arith()) return a;
            } catch (const ParseError&) {
            }
            pos_ = save;
        }
        return Assertion::classical(b_cmp());
    }

    // ------------------------------------------------------------ programs

    bool at_seq_end() const { return at_end() || is_kw("end") || is_kw("else") || is_sym("}"); }

    StmtP s_seq() {
        std::vector<StmtP> xs{s_stmt()};
        while (is_sym(";")) {
            next();
            if (at_seq_end()) break;
            xs.push_back(s_stmt());
        }
        return mk_seq(xs);
    }

    bool at_qref() const {
        const Token& t = peek();
        if (t.kind != Tk::Ident) return false;
        if (std::regex_match(t.text, kQubit) || std::regex_match(t.text, kQubitVar)) return true;
        return t.text == "q_" && is_sym("(", 1);
    }

    BExp s_qref() {
        Token t = next();
        std::smatch m;
        if (std::regex_match(t.text, m, kQubit)) {
            auto q = std::stoll(m[1].str());
            if (q == 0) throw ParseError(t.line, t.col, "qubit indices start at 1");
            return BExp::num(q);
        }
        if (std::regex_match(t.text, m, kQubitVar)) return BExp::var(m[1].str());
        expect_sym("(");
        BExp e = b_add();
        expect_sym(")");
        return e;
    }

    StmtP s_stmt() {
        if (is_kw("skip")) {
            next();
            return mk_skip();
        }
        if (is_kw("if")) {
            next();
            BExp c = b_imp();
            expect_kw("then");
            StmtP t = s_seq();
            StmtP e = mk_skip();
            if (is_kw("else")) {
                next();
                e = s_seq();
            }
            expect_kw("end");
            return mk_if(c, t, e);
        }
        if (is_kw("while")) {
            next();
            BExp c = b_imp();
            std::optional<Assertion> inv;
            if (is_kw("invariant")) {
                next();
                expect_sym(":");
                inv = a_imp_();
            }
            expect_kw("do");
            StmtP b = s_seq();
            expect_kw("end");
            return mk_while(c, b, inv);
        }
        if (is_kw("for")) {
            next();
            std::string v = expect_ident("a loop variable");
            expect_kw("in");
            BExp lo = b_add();
            expect_sym("..");
            BExp hi = b_add();
            expect_kw("do");
            StmtP b = s_seq();
            expect_kw("end");
            return mk_for(v, lo, hi, b);
        }
        // qubit statements; a qref followed by ':=' and something other
        // than |0> is an ordinary assignment to a variable named like q_1
        if (at_qref() && !(is_sym(":=", 1) && !is_sym("|0>", 2))) {
            const Token start = peek();
            BExp q1 = s_qref();
            if (is_sym(":=")) {
                next();
                expect_sym("|0>");
                auto s = std::make_shared<Stmt>(*mk_init(1));
                s->q1 = q1;
                return s;
            }
            std::optional<BExp> q2;
            if (is_sym(",")) {
                next();
                if (!at_qref()) fail("expected a qubit reference");
                q2 = s_qref();
            }
            expect_sym("*=");
            std::optional<BExp> guard;
            if (is_sym("[")) {
                next();
                guard = b_imp();
                expect_sym("]");
            }
            Token gt = peek();
            std::string gname = expect_ident("a gate name");
            Gate g;
            try {
                g = pauli::gate_from_name(gname);
            } catch (const std::invalid_argument&) {
                throw ParseError(gt.line, gt.col, "unknown gate '" + gname + "'");
            }
            auto s = std::make_shared<Stmt>();
            s->gate = g;
            s->q1 = q1;
            if (pauli::is_two_qubit(g)) {
                if (!q2) throw ParseError(gt.line, gt.col, std::string(pauli::gate_name(g)) + " needs two qubits");
                if (guard) throw ParseError(gt.line, gt.col, "conditional two-qubit gates are not supported");
                s->kind = Stmt::Kind::Unitary2;
                s->q2 = *q2;
                if (q1.op() == BExp::Op::Int && q1 == *q2)
                    throw ParseError(start.line, start.col, "two-qubit gate with equal qubit indices");
            } else {
                if (q2) throw ParseError(gt.line, gt.col, std::string(pauli::gate_name(g)) + " acts on one qubit");
                s->kind = guard ? Stmt::Kind::CondError : Stmt::Kind::Unitary1;
                if (guard) s->expr = *guard;
            }
            return s;
        }
        if (peek().kind != Tk::Ident || keyword(peek().text)) fail("expected a statement");
        if (is_sym("[", 1)) return s_decode();
        std::string x = next().text;
        expect_sym(":=");
        if (is_kw("meas") && is_sym("[", 1)) {
            next();
            next();
            auto s = std::make_shared<Stmt>();
            s->kind = Stmt::Kind::Measure;
            s->var = x;
            s->target = s_meas_target();
            expect_sym("]");
            return s;
        }
        return mk_assign(x, b_imp());
    }

    MeasTarget s_meas_target() {
        MeasTarget t;
        if (is_sym("-")) {
            next();
            t.negative = true;
        }
        bool any = false;
        while (peek().kind == Tk::Ident) {
            Token tok = next();
            std::smatch m;
            any = true;
            if (std::regex_match(tok.text, m, kSparse)) {
                t.factors.push_back({tok.text[0], BExp::num(std::stoll(m[1].str()))});
            } else if (std::regex_match(tok.text, m, kVarFactor)) {
                t.factors.push_back({m[1].str()[0], BExp::var(m[2].str())});
            } else if ((tok.text == "X_" || tok.text == "Y_" || tok.text == "Z_") && is_sym("(")) {
                next();
                BExp e = b_add();
                expect_sym(")");
                t.factors.push_back({tok.text[0], e});
            } else if (tok.text == "I") {
            } else if (std::regex_match(tok.text, kDense)) {
                for (std::size_t i = 0; i < tok.text.size(); ++i)
                    if (tok.text[i] != 'I')
                        t.factors.push_back({tok.text[i], BExp::num(static_cast<std::int64_t>(i + 1))});
            } else if (opts_.code && std::regex_match(tok.text, kAlias)) {
                PauliTerm g = alias_term(tok);
                if (g.sign.constant_bit()) t.negative = !t.negative;
                for (std::size_t q = 1; q <= g.n(); ++q)
                    if (g.letter(q) != 'I') t.factors.push_back({g.letter(q), BExp::num(static_cast<std::int64_t>(q))});
            } else {
                throw ParseError(tok.line, tok.col, "bad Pauli factor '" + tok.text + "'");
            }
        }
        if (!any) fail("expected a Pauli operator");
        return t;
    }

    StmtP s_decode() {
        std::vector<DecodeFamily> fams;
        do {
            if (!fams.empty()) next();
            DecodeFamily f;
            f.name = expect_ident("a correction family");
            expect_sym("[");
            f.lo = b_add();
            expect_sym("..");
            f.hi = b_add();
            expect_sym("]");
            fams.push_back(f);
        } while (is_sym(","));
        expect_sym(":=");
        expect_kw("decode");
        expect_sym("(");
        std::vector<std::string> args;
        if (!is_sym(")")) {
            args.push_back(expect_ident("a syndrome variable"));
            while (is_sym(",")) {
                next();
                args.push_back(expect_ident("a syndrome variable"));
            }
        }
        expect_sym(")");
        return mk_decode(fams, args);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ParseOptions opts_;
    std::size_t n_ = 0;
};

}  // namespace

StmtP parse_program(const std::string& text, const ParseOptions& opts) {
    Parser p(text, opts);
    StmtP s = p.s_seq();
    p.expect_end();
    return s;
}

Assertion parse_assertion(const std::string& text, const ParseOptions& opts) {
    Parser p(text, opts);
    Assertion a = p.a_imp_();
    p.expect_end();
    return a;
}

BExp parse_bexp(const std::string& text) {
    Parser p(text, {});
    BExp e = p.b_imp();
    p.expect_end();
    return e;
}

HoareTriple parse_triple(const std::string& text, const ParseOptions& opts) {
    Parser p(text, opts);
    HoareTriple t;
    p.expect_kw("pre");
    p.expect_sym("{");
    t.pre = p.a_imp_();
    p.expect_sym("}");
    p.expect_kw("prog");
    p.expect_sym("{");
    t.prog = p.s_seq();
    p.expect_sym("}");
    p.expect_kw("post");
    p.expect_sym("{");
    t.post = p.a_imp_();
    p.expect_sym("}");
    p.expect_end();
    return t;
}

}  // namespace qecv::qprog
