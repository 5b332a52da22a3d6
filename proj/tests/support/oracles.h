#pragma once

// Independent reference computations used by the unit and acceptance tests. Nothing here calls
// into the numeric or checking code of the library; models are only read.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rcprob/check.h"

namespace oracle {

using rcprob::MarkovModel;
using rcprob::StateSet;

std::string slurp(const std::string& path);
std::string fixture(const std::string& rel);  // path under tests/

// ---- random explicit models --------------------------------------------------------------

struct ChainShape {
    std::size_t states = 10;
    std::size_t max_succ = 3;       // successors per choice
    std::size_t max_choices = 1;    // > 1 gives an mdp
    std::size_t nondet_states = 0;  // states allowed more than one choice (0: all)
    double self_loop = 0.1;         // chance of an extra self-loop edge
};

/// Random model with small-denominator rational probabilities and no closed model attached.
MarkovModel random_model(std::mt19937_64& rng, const ChainShape& shape);
StateSet random_set(std::mt19937_64& rng, std::size_t n, double density);

// ---- reachability by dense linear algebra ------------------------------------------------

/// P[phi1 U phi2] on a dtmc: graph pre-pass for probability 0, then one dense solve.
std::vector<double> dense_until(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2);
/// Expected reward until `target`, +inf where the target is missed with positive probability.
std::vector<double> dense_reward(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, const StateSet& target);

/// Induced dtmc of a memoryless deterministic adversary (choice index per state, local to the state).
MarkovModel induce(const MarkovModel& mm, const std::vector<std::size_t>& pick);

/// Min and max of P[phi1 U phi2] over every memoryless deterministic adversary.
void enumerate_adversaries(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, std::vector<double>& lo,
                           std::vector<double>& hi);

/// P[phi1 U<=k phi2] by unfolding every path of length k (min/max over choices at each node).
double unfold_bounded_until(const MarkovModel& mm, std::size_t s, const StateSet& phi1, const StateSet& phi2, long k,
                            bool maximise);

// ---- exported explicit models ------------------------------------------------------------

/// A dtmc read back from the plain explicit-state export; probabilities come from their exact text.
struct ExplicitChain {
    struct Arc {
        std::uint32_t src = 0, dst = 0;
        double p = 0;
    };
    std::uint32_t initial = 0;
    std::vector<std::string> valuation;  // per state, as printed
    std::vector<Arc> arcs;               // in export order, which is edge order
    std::vector<std::pair<std::string, std::vector<std::pair<std::size_t, double>>>> edge_rewards;
};
ExplicitChain parse_explicit(const std::string& text);

/// Expected reward accumulated on arcs before the first state whose valuation satisfies `target`,
/// from the initial state; +inf when the target may be missed.
double explicit_reward(const ExplicitChain& c, const std::string& reward, const std::vector<std::uint8_t>& target);

// ---- linear-time properties on lassos ----------------------------------------------------

/// Minimal LTL over per-state atoms; mirrors the A/E fragment the checker accepts.
struct Ltl {
    enum class K { Atom, Not, And, Or, Implies, Next, Finally, Globally, Until, WeakUntil, Release } k = K::Atom;
    int atom = 0;
    long bound = -1;
    std::shared_ptr<Ltl> a, b;
};
using LtlPtr = std::shared_ptr<Ltl>;

/// Truth of `f` at position 0 of the infinite word prefix . loop^omega (atoms[i][state]).
bool holds_on_lasso(const Ltl& f, const std::vector<std::uint32_t>& prefix, const std::vector<std::uint32_t>& loop,
                    const std::vector<StateSet>& atoms);

/// Exists a path from `s` satisfying `f`; enumerates lassos whose states occur at most `visits` times.
bool exists_lasso(const MarkovModel& mm, std::size_t s, const Ltl& f, const std::vector<StateSet>& atoms,
                  int visits = 2);

/// Random formula of the supported A/E shapes over `natoms` atoms; `text` receives the property syntax,
/// with atom i written as atom_text[i].
LtlPtr random_path_formula(std::mt19937_64& rng, int natoms, const std::vector<std::string>& atom_text,
                           std::string& text);

// ---- environment-module product -----------------------------------------------------------

/// The random walk with recharging steps, composed by hand with the Mon (net displacement) and
/// Cnt (left count, saturating at 3) modules of fixtures/srw_env.rcp, one macro step per move.
struct EnvProduct {
    std::size_t states = 0;
    bool net_bounded = true;  // every reachable state has -D <= net <= D
    bool few_lefts = true;    // every reachable state has lefts < 3
    double p_three_lefts = 0;
    bool net_tracks_x = true;
    int max_abs_net = 0;
    std::size_t mon_states = 0;  // distinct states once the Cnt component is projected away
};
EnvProduct srw_env_product(int max_dist, int max_steps, double pl);

// ---- random RoboChart models -------------------------------------------------------------

/// A one-machine model with states, probabilistic junctions, guards and integer/boolean updates.
std::string random_rcm(std::mt19937_64& rng, int index);

}  // namespace oracle
