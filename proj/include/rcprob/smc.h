#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rcprob/check.h"

namespace rcprob {

/// What a simulated path is judged against: a probabilistic path formula or a reward path.
struct PathSpec {
    enum class Kind { Next, Until, Globally, WeakUntil, Release, Cumul, Reach } kind = Kind::Until;
    StateSet lhs, rhs;  // Until/WeakUntil: lhs U rhs; Release: lhs R rhs; Globally/Next: rhs
    long bound = -1;    // step bound, -1 when unbounded; Cumul: number of steps
    const RewardStructure* rewards = nullptr;

    bool is_reward() const { return kind == Kind::Cumul || kind == Kind::Reach; }
};

/// Builds the monitor for the operand of a Prob or Reward node.
PathSpec make_path_spec(const MarkovModel& mm, PropertyChecker& pc, const Expr& op_node);

struct SimStep {
    std::uint32_t state = 0;
    std::int32_t tags = -1;  // tag set of the edge taken out of `state`; -1 on the last entry
};

struct SimPath {
    enum class End { Decided, Absorbing, Cap } end = End::Decided;
    std::vector<SimStep> steps;
    double sample = 0;  // 0/1 for probabilities, accumulated reward otherwise
};

const char* to_string(SimPath::End e);

/// Forward simulation of a dtmc. Sample i of seed s always draws from the same stream, so
/// any partition of the sample indices yields identical results.
class Simulator {
   public:
    /// Throws Error("UNSUPPORTED") for an mdp.
    Simulator(const MarkovModel& mm, PathSpec spec, std::uint64_t seed, long pathlen);

    /// Draws sample `index`; records the path when `trace` is given.
    double sample(std::uint64_t index, SimPath* trace = nullptr);
    /// Draws the next sample in sequence.
    double next() { return sample(drawn_++); }

    std::size_t drawn() const { return drawn_; }
    std::size_t capped() const { return capped_; }
    bool is_reward() const { return spec_.is_reward(); }

   private:
    const MarkovModel& mm_;
    PathSpec spec_;
    std::uint64_t seed_;
    long pathlen_;
    std::vector<std::uint8_t> absorbing_;
    std::size_t drawn_ = 0;
    std::size_t capped_ = 0;
};

struct Estimate {
    SimMethod method = SimMethod::CI;
    double estimate = 0;
    double w = 0;  // CI/ACI half-width
    double alpha = 0;
    double epsilon = 0, delta = 0;
    std::size_t n = 0;
    enum class Decision { None, AcceptH0, AcceptH1 } decision = Decision::None;
    std::uint64_t seed = 0;
    std::size_t capped = 0;  // paths stopped by the length cap
};

/// Inverse of the standard normal CDF (rational approximation, relative error below 1.2e-9).
double normal_quantile(double p);
/// Quantile of Student's t distribution with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

/// Chernoff-Hoeffding sample count ceil(ln(2/delta) / (2 epsilon^2)), at least 1.
std::size_t apmc_samples(double epsilon, double delta);
double apmc_epsilon(std::size_t n, double delta);
double apmc_delta(std::size_t n, double epsilon);

/// Exactly two of w, alpha, n must be given. `asymptotic` selects ACI (sample variance, t quantile below 50).
Estimate run_ci(Simulator& sim, std::optional<double> w, std::optional<double> alpha, std::optional<std::size_t> n,
                bool asymptotic = false);
/// Exactly two of epsilon, delta, n must be given.
Estimate run_apmc(Simulator& sim, std::optional<double> epsilon, std::optional<double> delta,
                  std::optional<std::size_t> n);
/// Wald test of H0: p >= theta + delta against H1: p <= theta - delta, both error bounds alpha.
Estimate run_sprt(Simulator& sim, double theta, double alpha, double delta);

struct SmcOptions {
    std::uint64_t seed = 0;
    long pathlen = 10'000;
    CheckOptions exact;  // for state formulas nested in the path operands
};

/// Judges a top-level Prob or Reward property by simulation. The method comes from the property's
/// `using` clause; CI with alpha 0.05 and 1000 samples otherwise.
CheckResult check_property_smc(MarkovModel& mm, const ProbProperty& p, const SmcOptions& opts, Estimate* est = nullptr);

}  // namespace rcprob
