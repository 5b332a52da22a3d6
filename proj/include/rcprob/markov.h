#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcprob/program.h"

namespace rcprob {

/// Ordered (qualified constant name, value) pairs; also serves as a configuration id.
using Valuation = std::vector<std::pair<std::string, Value>>;

std::string valuation_str(const Valuation& v);

/// Cartesian product of a constants configuration, first entry varying slowest.
std::vector<Valuation> expand_sweep(const ConstantsConfig& cfg, const Resolver& r);

/// A model with every loose symbol bound, ready to be explored.
struct ClosedModel {
    std::shared_ptr<const ModelAst> model;
    std::shared_ptr<const SpecAst> spec;  // may be null
    Valuation config;
    std::optional<DefinitionsDecl> defs;
    std::optional<PModulesDecl> modules;
    ModelKind kind = ModelKind::Mdp;
    std::unique_ptr<Resolver> resolver;
    std::vector<std::optional<Value>> const_values;  // by ModelIndex constant index
    std::shared_ptr<Program> program;

    const Program& prog() const { return *program; }
};

/// Binds constants, definitions and environment modules; checks coverage and junction sums.
/// Throws Error("SCOPE") for uncovered loose symbols and Error("PROBABILITY") for bad junctions.
std::shared_ptr<const ClosedModel> instantiate(std::shared_ptr<const ModelAst> model,
                                               std::shared_ptr<const SpecAst> spec, const Valuation& config,
                                               const DefinitionsDecl* defs, const PModulesDecl* env, ModelKind kind);

struct Edge {
    std::uint32_t dst = 0;
    Rational prob;
    double p = 0;
    std::int32_t tags = 0;  // index into MarkovModel::tag_sets
};

struct Choice {
    std::int32_t action = 0;  // index into MarkovModel::actions
    std::uint32_t edge_begin = 0, edge_end = 0;
};

struct RewardStructure {
    std::string name;
    std::vector<double> state;  // per state
    std::vector<double> edge;   // per edge
};

struct MarkovModel {
    ModelKind kind = ModelKind::Mdp;
    std::shared_ptr<const ClosedModel> closed;
    std::size_t width = 0;
    std::vector<std::int64_t> values;  // num_states() x width
    std::uint32_t initial = 0;
    std::vector<std::uint32_t> row;  // choice offsets per state, size num_states()+1
    std::vector<Choice> choices;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> tag_sets;
    std::vector<std::string> actions;
    std::vector<std::uint8_t> deadlock;
    std::vector<RewardStructure> rewards;

    std::size_t num_states() const { return row.empty() ? 0 : row.size() - 1; }
    std::size_t num_choices() const { return choices.size(); }
    std::size_t num_edges() const { return edges.size(); }
    const std::int64_t* state(std::size_t s) const { return values.data() + s * width; }
    std::string valuation(std::size_t s) const;

    EvalEnv env(std::size_t s) const {
        return EvalEnv{&closed->prog(), state(s), deadlock[s] != 0, s == initial, nullptr};
    }
    const RewardStructure* find_rewards(const std::string& name) const;
};

struct BuildOptions {
    std::size_t max_states = 10'000'000;
};

/// Breadth-first exploration from the initial Markov state. Throws Error("STATE_CAP"),
/// Error("RANGE"), Error("PROBABILITY"), Error("UNSUPPORTED").
MarkovModel build_markov(std::shared_ptr<const ClosedModel> closed, const BuildOptions& opts = {});

/// Exact row-sum check of every distribution; returns a description of the first violation.
std::optional<std::string> check_stochastic(const MarkovModel& mm);

/// Adds (or replaces) a reward structure evaluated on the model. Throws Error("REWARD") on negative values.
void attach_rewards(MarkovModel& mm, const RewardsDecl& decl);

/// Plain explicit-state text: header, one line per state, one per edge, then reward sections.
std::string export_explicit(const MarkovModel& mm);

}  // namespace rcprob
