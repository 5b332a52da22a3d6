#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcprob/common.h"

namespace rcprob {

/// `A::B::C` reference, unresolved until scoping.
struct QualifiedName {
    std::vector<std::string> segments;
    SourcePos pos;

    std::string str() const;
    bool empty() const { return segments.empty(); }
    friend bool operator==(const QualifiedName& a, const QualifiedName& b) { return a.segments == b.segments; }
};

enum class EventDir { In, Out };
const char* to_string(EventDir d);

/// `FQN.in` / `FQN.out`, optionally followed by `.val`.
struct EventRef {
    QualifiedName name;
    EventDir dir = EventDir::Out;
    bool valued = false;

    std::string str() const;
    friend bool operator==(const EventRef& a, const EventRef& b) {
        return a.name == b.name && a.dir == b.dir && a.valued == b.valued;
    }
};

enum class ExprKind {
    BoolLit,
    NumLit,
    Name,        // qualified name (variable, constant, state, enum literal ...)
    Unary,       // op: Not, Neg
    Binary,      // arithmetic, relational, logical
    Ite,         // if c then a else b end
    Call,        // F(args) in models, &F(args) in specs
    SetExt,      // {a, b, c}
    SetRange,    // {a to b by step c}
    IsIn,        // M is in M::S
    ModVar,      // @v or @Mods::Mod::v
    LabelRef,    // #l, deadlock, init
    FormulaRef,  // `f
    ParamRef,    // ``p or $$p
    EventVal,    // FQN.dir.val
    Index,       // a[i, j] (parsed, rejected by validation)
    Prob,        // Prob (bound|query) of [path] (using ...)?
    Reward,      // Reward {N}? (bound|query) of [rpath] (using ...)?
    Forall,      // Forall [path]
    Exists,      // Exists [path]
    Temporal,    // Next / Until / Finally / Globally / WeakUntil / Release
    RewardPath,  // Reachable e / LTL e / Cumul e / Total
};

enum class Op {
    None,
    Not, Neg,
    Add, Sub, Mul, Div, Mod,
    Eq, Neq, Lt, Le, Gt, Ge,
    And, Or, Implies, Iff,
    // temporal
    Next, Until, Finally, Globally, WeakUntil, Release,
    // reward paths
    Reachable, Ltl, Cumul, Total,
};

const char* op_symbol(Op op);

enum class QueryKind { Plain, Min, Max };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Comparison bound attached to P/R operators and bounded temporal operators.
struct Bound {
    Op cmp = Op::None;  // Lt, Le, Gt, Ge
    ExprPtr value;
};

enum class SimMethod { CI, ACI, APMC, SPRT };
const char* to_string(SimMethod m);

struct SimMethodSpec {
    SimMethod method = SimMethod::CI;
    ExprPtr w, alpha, n, epsilon, delta, pathlen;
    SourcePos pos;
};

struct Expr {
    ExprKind kind = ExprKind::BoolLit;
    Op op = Op::None;
    SourcePos pos;

    bool bool_value = false;       // BoolLit value; on Call, set for model-syntax calls (no `&`)
    Rational number;
    bool number_is_int = true;

    QualifiedName name;            // Name, Call, IsIn (left), ModVar, LabelRef, FormulaRef, ParamRef, Reward (rewards name)
    QualifiedName name2;           // IsIn right
    EventRef event;                // EventVal
    std::vector<ExprPtr> children;

    std::optional<Bound> bound;    // Prob/Reward bound; bounded temporal op
    std::optional<QueryKind> query;
    std::optional<SimMethodSpec> sim;
    bool step_given = false;       // SetRange: explicit `by step`
};

// Construction helpers used by the parsers and tests.
ExprPtr make_bool(bool v, SourcePos pos = {});
ExprPtr make_number(const Rational& v, bool is_int, SourcePos pos = {});
ExprPtr make_name(QualifiedName qn);
ExprPtr make_unary(Op op, ExprPtr a, SourcePos pos = {});
ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b, SourcePos pos = {});
ExprPtr make_node(ExprKind kind, Op op, std::vector<ExprPtr> children, SourcePos pos = {});

/// Renders an expression in the concrete syntax accepted by the parsers (fully parenthesised
/// where precedence requires it).
std::string to_text(const Expr& e);
inline std::string to_text(const ExprPtr& e) { return e ? to_text(*e) : std::string(); }

/// Structural equality ignoring source positions.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

bool is_temporal_kind(const Expr& e);
bool contains_temporal(const Expr& e);

/// Precedence rank used by the printer; higher binds tighter.
int precedence(const Expr& e);

}  // namespace rcprob
