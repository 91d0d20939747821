#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qecv::cexpr {

// Variable kinds are inferred from the name prefix so that the same name
// always lands in the same quantifier block.
enum class VarKind { Error, Propagated, Syndrome, XCorr, ZCorr, Decoder, Param, User };

VarKind kind_of(std::string_view name);
const char* kind_name(VarKind k);

struct Var {
    std::string name;
    VarKind kind;
    explicit Var(std::string n) : name(std::move(n)), kind(kind_of(name)) {}
    bool operator<(const Var& o) const { return name < o.name; }
    bool operator==(const Var& o) const { return name == o.name; }
};

using Assignment = std::map<std::string, std::int64_t>;

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BExp {
public:
    enum class Op { True, False, Int, Var, Not, And, Or, Imp, Xor, Eq, Le, Lt, Add, Sub, Mul };

    BExp();  // true

    static BExp tt();
    static BExp ff();
    static BExp lit(bool b) { return b ? tt() : ff(); }
    static BExp num(std::int64_t v);
    static BExp var(const std::string& name);

    Op op() const { return node_->op; }
    std::int64_t value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    const std::vector<BExp>& args() const { return node_->args; }

    bool is_true() const { return op() == Op::True; }
    bool is_false() const { return op() == Op::False; }
    bool is_const() const { return op() == Op::True || op() == Op::False || op() == Op::Int; }
    // Boolean-valued at the top (connective, comparison, literal).
    bool is_bool() const;

    bool operator==(const BExp& o) const;
    bool operator!=(const BExp& o) const { return !(*this == o); }

    std::string str() const;

private:
    struct Node {
        Op op;
        std::int64_t value = 0;
        std::string name;
        std::vector<BExp> args;
    };
    explicit BExp(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static BExp make(Op op, std::vector<BExp> args);
    std::shared_ptr<const Node> node_;

    friend BExp mk_not(const BExp&);
    friend BExp mk_and(std::vector<BExp>);
    friend BExp mk_or(std::vector<BExp>);
    friend BExp mk_imp(const BExp&, const BExp&);
    friend BExp mk_xor(std::vector<BExp>);
    friend BExp mk_eq(const BExp&, const BExp&);
    friend BExp mk_le(const BExp&, const BExp&);
    friend BExp mk_lt(const BExp&, const BExp&);
    friend BExp mk_add(std::vector<BExp>);
    friend BExp mk_sub(const BExp&, const BExp&);
    friend BExp mk_mul(const BExp&, const BExp&);
};

// Smart constructors. They flatten nested n-ary nodes of the same operator
// and fold boolean constants; they never reorder operands.
BExp mk_not(const BExp& a);
BExp mk_and(std::vector<BExp> xs);
BExp mk_or(std::vector<BExp> xs);
BExp mk_imp(const BExp& a, const BExp& b);
BExp mk_xor(std::vector<BExp> xs);
BExp mk_eq(const BExp& a, const BExp& b);
BExp mk_le(const BExp& a, const BExp& b);
BExp mk_lt(const BExp& a, const BExp& b);
BExp mk_add(std::vector<BExp> xs);
BExp mk_sub(const BExp& a, const BExp& b);
BExp mk_mul(const BExp& a, const BExp& b);
inline BExp mk_and(const BExp& a, const BExp& b) { return mk_and(std::vector<BExp>{a, b}); }
inline BExp mk_or(const BExp& a, const BExp& b) { return mk_or(std::vector<BExp>{a, b}); }

// sum of the given variable names; 0 when empty
BExp sum_of(const std::vector<std::string>& names);

// Binding strength used by the printer (1 = '=>' ... 9 = atom).
int bexp_prec(const BExp& e);

std::int64_t eval_bexp(const BExp& e, const Assignment& m);
inline bool holds(const BExp& e, const Assignment& m) { return eval_bexp(e, m) != 0; }

BExp substitute(const BExp& e, const std::string& x, const BExp& r);
BExp substitute(const BExp& e, const std::map<std::string, BExp>& sub);
// Replace variables bound in m by constants and fold.
BExp partial_eval(const BExp& e, const Assignment& m);
void free_vars(const BExp& e, std::set<std::string>& out);
std::set<std::string> free_vars(const BExp& e);

// GF(2)-affine phase exponent: constant XOR a duplicate-free set of atoms.
class PhasePoly {
public:
    PhasePoly() = default;
    static PhasePoly zero() { return {}; }
    static PhasePoly one() { return constant(true); }
    static PhasePoly constant(bool c) {
        PhasePoly p;
        p.c_ = c;
        return p;
    }
    static PhasePoly atom(const std::string& name) {
        PhasePoly p;
        p.atoms_.push_back(name);
        return p;
    }
    static PhasePoly from(bool c, std::vector<std::string> atoms);

    bool constant_bit() const { return c_; }
    const std::vector<std::string>& atoms() const { return atoms_; }
    bool is_constant() const { return atoms_.empty(); }
    bool is_zero() const { return !c_ && atoms_.empty(); }
    bool contains(const std::string& a) const;

    PhasePoly operator^(const PhasePoly& o) const;
    PhasePoly& operator^=(const PhasePoly& o) { return *this = *this ^ o; }
    PhasePoly flipped() const {
        PhasePoly p = *this;
        p.c_ = !p.c_;
        return p;
    }

    bool eval(const Assignment& m) const;
    PhasePoly substitute(const std::string& x, const PhasePoly& r) const;
    PhasePoly substitute(const std::map<std::string, PhasePoly>& sub) const;
    PhasePoly partial_eval(const Assignment& m) const;
    BExp to_bexp() const;
    // "0", "1", "b+x_1", "1+b+x_1"
    std::string str() const;

    bool operator==(const PhasePoly& o) const { return c_ == o.c_ && atoms_ == o.atoms_; }
    bool operator!=(const PhasePoly& o) const { return !(*this == o); }
    bool operator<(const PhasePoly& o) const {
        if (atoms_ != o.atoms_) return atoms_ < o.atoms_;
        return c_ < o.c_;
    }

private:
    bool c_ = false;
    std::vector<std::string> atoms_;  // sorted, unique
};

inline PhasePoly phase_xor(const PhasePoly& p, const PhasePoly& q) { return p ^ q; }

// Affine reading of a boolean expression (true/false, 0/1, variables, xor,
// negation). Returns nullopt for anything nonlinear.
std::optional<PhasePoly> as_phase(const BExp& e);

// Substitute into a phase; throws std::invalid_argument if the replacement
// is not affine.
PhasePoly substitute_phase(const PhasePoly& p, const std::string& x, const BExp& r);

}  // namespace qecv::cexpr
