#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "rcprob/markov.h"

namespace rcprob {

/// Per-state membership flags.
using StateSet = std::vector<std::uint8_t>;

/// Which adversary a quantitative query optimises for. On a dtmc both coincide.
enum class Opt { Min, Max };
inline Opt flip(Opt o) { return o == Opt::Min ? Opt::Max : Opt::Min; }

struct ViOptions {
    double tol = 1e-6;                  // max relative change between sweeps
    std::size_t max_iter = 1'000'000;
};

struct ViStats {
    std::size_t iterations = 0;
    double residual = 0;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

StateSet set_not(const StateSet& a);
StateSet set_and(const StateSet& a, const StateSet& b);
StateSet set_or(const StateSet& a, const StateSet& b);
StateSet set_all(std::size_t n, bool v = true);

// Graph algorithms over positive-probability edges (all choices).

/// States satisfying E[phi1 U phi2]; with `bound` >= 0, E[phi1 U<=bound phi2].
StateSet exists_until(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, long bound = -1);
/// States satisfying E[G phi]; with `bound` >= 0, E[G<=bound phi].
StateSet exists_globally(const MarkovModel& mm, const StateSet& phi, long bound = -1);
/// States with some successor in `target`.
StateSet exists_next(const MarkovModel& mm, const StateSet& target);

/// Strongly connected components of the graph restricted to `within`; states outside get -1.
/// `nontrivial[c]` is true iff component c has an internal edge.
std::vector<int> scc_decompose(const MarkovModel& mm, const StateSet& within, std::vector<char>& nontrivial);

/// States of `within` lying on a cycle that stays inside `within`.
StateSet on_cycle(const MarkovModel& mm, const StateSet& within);

/// Maximal end components. `allowed` filters choices (empty: all). Returns the component id per state (-1: none).
std::vector<int> mec_decompose(const MarkovModel& mm, const std::vector<char>& allowed, int& count);

// Qualitative precomputation for phi1 U phi2.

StateSet prob0(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, Opt opt);
StateSet prob1(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, Opt opt);

// Quantitative.

std::vector<double> prob_next(const MarkovModel& mm, const StateSet& phi, Opt opt);
std::vector<double> prob_until(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, Opt opt,
                               const ViOptions& vo = {}, ViStats* stats = nullptr);
std::vector<double> prob_until_bounded(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, long k,
                                       Opt opt);

/// Expected reward accumulated until `target` is first reached; +inf where it is not reached almost surely.
std::vector<double> reward_reach(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, const StateSet& target, Opt opt,
                                 const ViOptions& vo = {}, ViStats* stats = nullptr);
/// Expected reward over the first k steps.
std::vector<double> reward_cumul(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, long k, Opt opt);
/// Expected total reward; +inf where positive reward can recur forever.
std::vector<double> reward_total(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, Opt opt, const ViOptions& vo = {},
                                 ViStats* stats = nullptr);

}  // namespace rcprob
