#pragma once

#include <string>
#include <vector>

#include "rcprob/numeric.h"

namespace rcprob {

struct CheckOptions {
    ViOptions vi;
};

struct CheckResult {
    std::string property;
    std::string config;
    enum class Kind { Boolean, Value } kind = Kind::Boolean;
    bool verdict = false;
    double value = 0;          // may be +inf for rewards
    std::string mode = "exact";  // exact | min | max | estimate
    std::string engine = "graph";  // graph | numeric
    std::size_t iterations = 0;
    double check_ms = 0;
};

/// Evaluates spec-side state and path formulas on a built model.
class PropertyChecker {
   public:
    explicit PropertyChecker(const MarkovModel& mm, CheckOptions opts = {});

    /// Satisfaction set of a state formula.
    StateSet sat(const Expr& e);

    /// Per-state probability of a path formula (the operand of Prob).
    std::vector<double> path_prob(const Expr& path, Opt opt);

    /// Per-state value of a Prob or Reward node for the given adversary objective.
    std::vector<double> quantity(const Expr& op_node, Opt opt);

    /// Graph semantics of Forall/Exists over a path formula.
    StateSet forall(const Expr& path);
    StateSet exists(const Expr& path);

    /// Upper step bound of a bounded temporal operator (`<` normalised to `<=`); -1 when unbounded.
    long step_bound(const Expr& temporal);
    /// Satisfaction set of an operand that must not itself be a path formula.
    StateSet state_operand(const Expr& e);

    std::size_t iterations() const { return iterations_; }
    bool used_numeric() const { return numeric_; }

   private:
    StateSet atom(const Expr& e);
    std::vector<double> reward(const Expr& node, Opt opt);
    StateSet egf(const StateSet& phi);  // E[G F phi]
    StateSet efg(const StateSet& phi);  // E[F G phi]

    const MarkovModel& mm_;
    CheckOptions opts_;
    std::size_t iterations_ = 0;
    bool numeric_ = false;
};

/// True when the expression (through labels and formulas) contains Prob, Reward, Forall or Exists.
bool has_operator(const Expr& e, const SpecAst* spec);

/// Attaches every reward structure a property refers to (from the closed model's spec).
void attach_property_rewards(MarkovModel& mm, const Expr& body);

/// Judges a property at the initial state. Throws Error("UNSUPPORTED") outside the supported fragment.
CheckResult check_property(MarkovModel& mm, const ProbProperty& p, const CheckOptions& opts = {});

/// True iff the model offers a real choice in some state.
bool has_nondeterminism(const MarkovModel& mm);

}  // namespace rcprob
