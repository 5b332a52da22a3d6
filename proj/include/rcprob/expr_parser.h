#pragma once

#include "rcprob/expr.h"
#include "rcprob/lexer.h"

namespace rcprob {

/// Model expressions use bare calls `F(x)` and short names; spec expressions
/// use `&F(x)`, qualified names, and the formula forms.
enum class Dialect { Model, Spec };

class ExprParser {
   public:
    ExprParser(TokenStream& ts, Dialect d) : ts_(ts), dialect_(d) {}

    /// A full expression; temporal operators are rejected at this level.
    ExprPtr parse();
    /// The operand of a bound or a simulation parameter (unary precedence).
    ExprPtr parse_operand();
    /// `FQN.in` / `FQN.out` with optional `.val`.
    EventRef parse_event_ref();
    QualifiedName parse_qualified_name();
    /// After the `using` keyword has been seen (not consumed).
    SimMethodSpec parse_use_method();

   private:
    ExprPtr parse_temporal();
    ExprPtr parse_iff();
    ExprPtr parse_implies();
    ExprPtr parse_or();
    ExprPtr parse_and();
    ExprPtr parse_not();
    ExprPtr parse_rel();
    ExprPtr parse_add();
    ExprPtr parse_mul();
    ExprPtr parse_unary();
    ExprPtr parse_postfix();
    ExprPtr parse_primary();
    ExprPtr parse_spec_primary();
    ExprPtr parse_model_primary();
    ExprPtr parse_state_formula();
    ExprPtr parse_reward_path();
    ExprPtr parse_bracket_path();
    std::optional<Bound> parse_opt_bound();
    std::vector<ExprPtr> parse_args(const char* close);

    bool at_temporal_keyword() const;

    TokenStream& ts_;
    Dialect dialect_;
    int path_depth_ = 0;
};

/// Parses a complete spec-dialect expression string.
ExprPtr parse_expression(const std::string& text);

/// Parses `using sim with ...` text.
SimMethodSpec parse_sim_method(const std::string& text);

}  // namespace rcprob
