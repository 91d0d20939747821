#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecv/cexpr.hpp"
#include "qecv/pauli.hpp"

namespace qecv::qprog {

using cexpr::BExp;
using cexpr::PhasePoly;
using pauli::Gate;
using pauli::PauliSum;
using pauli::PauliTerm;

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int col, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line, col;
};

class CodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- assertions

class Assertion {
public:
    enum class Kind { Classical, Pauli, Not, And, Or, Imp, BigVee };

    Assertion();  // classical true

    static Assertion classical(const BExp& b);
    static Assertion atom(const PauliSum& p);
    static Assertion top() { return classical(BExp::tt()); }
    static Assertion bottom() { return classical(BExp::ff()); }

    Kind kind() const { return node_->kind; }
    const BExp& bexp() const { return node_->bexp; }
    const PauliSum& pauli() const { return node_->pauli; }
    const std::vector<Assertion>& args() const { return node_->args; }
    const std::vector<std::string>& bound() const { return node_->bound; }

    bool is_classical() const { return kind() == Kind::Classical; }
    // integer literals count as booleans (0 false, otherwise true)
    bool is_true() const {
        return is_classical() && (bexp().is_true() || (bexp().op() == BExp::Op::Int && bexp().value() != 0));
    }
    bool is_false() const {
        return is_classical() && (bexp().is_false() || (bexp().op() == BExp::Op::Int && bexp().value() == 0));
    }

    bool operator==(const Assertion& o) const;
    bool operator!=(const Assertion& o) const { return !(*this == o); }

    std::string str() const;

private:
    struct Node {
        Kind kind;
        BExp bexp;
        PauliSum pauli;
        std::vector<Assertion> args;
        std::vector<std::string> bound;
    };
    explicit Assertion(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Assertion make(Kind k, std::vector<Assertion> args);
    std::shared_ptr<const Node> node_;

    friend Assertion a_not(const Assertion&);
    friend Assertion a_and(std::vector<Assertion>);
    friend Assertion a_or(std::vector<Assertion>);
    friend Assertion a_imp(const Assertion&, const Assertion&);
    friend Assertion a_bigvee(std::vector<std::string>, const Assertion&);
};

// Smart constructors: flatten nested and/or, fold classical constants and
// collapse purely classical subtrees into a single BExp atom.
Assertion a_not(const Assertion& a);
Assertion a_and(std::vector<Assertion> xs);
Assertion a_or(std::vector<Assertion> xs);
Assertion a_imp(const Assertion& a, const Assertion& b);
Assertion a_bigvee(std::vector<std::string> bound, const Assertion& body);
inline Assertion a_and(const Assertion& a, const Assertion& b) { return a_and(std::vector<Assertion>{a, b}); }
inline Assertion a_or(const Assertion& a, const Assertion& b) { return a_or(std::vector<Assertion>{a, b}); }

// Maximum qubit index referenced by Pauli atoms.
std::size_t assertion_qubits(const Assertion& a);
// Resize every Pauli atom to n qubits (n must be >= current sizes).
Assertion resize_assertion(const Assertion& a, std::size_t n);

// ---------------------------------------------------------------- codes

struct StabilizerCode {
    std::string name;
    std::size_t n = 0, k = 0, d = 0;
    std::vector<PauliTerm> generators;
    std::vector<PauliTerm> logical_x;
    std::vector<PauliTerm> logical_z;

    // (n-k) rows over 2n columns: x part then z part
    std::vector<BitVec> check_matrix() const;
    // Throws CodeError naming the offending pair.
    void validate() const;
    bool is_x_type(std::size_t g) const;  // generator g (0-based) has only X/I
    bool is_z_type(std::size_t g) const;
    bool is_css() const;
    std::string to_text() const;
};

StabilizerCode parse_code(const std::string& text, const std::string& name = "");
StabilizerCode load_code(const std::string& path);

// ---------------------------------------------------------------- programs

struct MeasFactor {
    char letter;
    BExp index;
    bool operator==(const MeasFactor& o) const { return letter == o.letter && index == o.index; }
};

struct MeasTarget {
    bool negative = false;
    std::vector<MeasFactor> factors;
    bool operator==(const MeasTarget& o) const { return negative == o.negative && factors == o.factors; }
    PauliTerm to_term(std::size_t n) const;  // indices must be constant
};

struct DecodeFamily {
    std::string name;  // correction family, e.g. "x" or "z_b2"
    BExp lo, hi;
    bool operator==(const DecodeFamily& o) const { return name == o.name && lo == o.lo && hi == o.hi; }
};

struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class Kind { Skip, Init, Unitary1, Unitary2, Assign, Measure, Decode, Seq, If, While, For, CondError };
    Kind kind = Kind::Skip;
    Gate gate = Gate::X;
    BExp q1, q2;                        // qubit index expressions (1-based)
    std::string var;                    // assign/measure target; for-loop variable
    BExp expr;                          // assign rhs; if/while condition; cond_error guard; for lower bound
    BExp expr2;                         // for upper bound
    MeasTarget target;                  // measure
    std::vector<DecodeFamily> families; // decode
    std::vector<std::string> dec_args;  // decode
    std::vector<StmtP> body;            // seq children; if {then, else}; while/for {body}
    std::optional<Assertion> invariant; // while

    int qubit1() const;  // requires constant index
    int qubit2() const;
};

StmtP mk_skip();
StmtP mk_init(int q);
StmtP mk_unitary(Gate g, int q);
StmtP mk_unitary2(Gate g, int q1, int q2);
StmtP mk_cond_error(const BExp& guard, Gate g, int q);
StmtP mk_assign(const std::string& x, const BExp& e);
StmtP mk_measure(const std::string& x, const PauliTerm& p);
StmtP mk_decode(std::vector<DecodeFamily> fams, std::vector<std::string> args);
StmtP mk_seq(std::vector<StmtP> xs);  // flattens; single element returned as-is
StmtP mk_if(const BExp& c, StmtP then_s, StmtP else_s);
StmtP mk_while(const BExp& c, StmtP body, std::optional<Assertion> inv);
StmtP mk_for(const std::string& v, const BExp& lo, const BExp& hi, StmtP body);

bool stmt_equal(const Stmt& a, const Stmt& b);
std::string print_program(const Stmt& s);

struct ParseOptions {
    std::size_t n = 0;                         // minimum qubit count for Pauli atoms
    const StabilizerCode* code = nullptr;      // binds g<i> aliases
    std::string base_dir;                      // for file references in triples
};

StmtP parse_program(const std::string& text, const ParseOptions& opts = {});
Assertion parse_assertion(const std::string& text, const ParseOptions& opts = {});
BExp parse_bexp(const std::string& text);

// Unroll for-loops and resolve every index to a literal.
StmtP desugar(const StmtP& s);
// Highest qubit index of a desugared program.
std::size_t program_qubits(const Stmt& s);
// Number of primitive statements (seq children counted recursively).
std::size_t count_primitive(const Stmt& s);
// Flattened list of top-level statements of a desugared program.
std::vector<StmtP> flatten(const StmtP& s);

struct HoareTriple {
    Assertion pre;
    StmtP prog;
    Assertion post;
};
HoareTriple parse_triple(const std::string& text, const ParseOptions& opts = {});

// Decoder contract derived from a program's decode statements: one entry per
// decode call, with the check rows of the measured Paulis.
struct CorrectionVar {
    std::string var;   // x_3
    std::string atom;  // f_x_3
    std::size_t qubit;
    char letter;       // 'X' or 'Z'
    std::string family;
};

struct DecoderCall {
    std::vector<std::string> syndromes;
    std::vector<CorrectionVar> corrections;
    // rows[j] has one bit per correction: whether it flips syndrome j
    std::vector<std::vector<bool>> rows;
};

struct DecoderSpec {
    std::vector<DecoderCall> calls;
    bool weight_bound = true;
};

std::string decoder_atom(const std::string& family, std::size_t i);
std::string family_var(const std::string& family, std::size_t i);
// Build the contract from the measured Paulis of a desugared program.
DecoderSpec derive_decoder_spec(const Stmt& prog, std::size_t n);

}  // namespace qecv::qprog
