#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcprob/smc.h"

namespace rcprob {

enum class Engine { Internal, Smc, Emit };

struct RunPlan {
    std::string model_path, spec_path;
    Engine engine = Engine::Internal;
    std::optional<ModelKind> kind;  // default: mdp, or dtmc for smc
    std::string prop_glob = "*";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::size_t max_states = 10'000'000;
    std::optional<double> tol;
    bool timings = true;  // false: write zero times so reports are byte-identical across runs
    unsigned threads = 0;  // 0: hardware concurrency
};

/// One (property, configuration) job.
struct Job {
    const ProbProperty* property = nullptr;
    Valuation config;
    std::string group;  // definitions + modules key; jobs of one group and configuration share a build
};

/// Per property, in source order: its configurations expanded into jobs.
std::vector<Job> sweep_experiments(const SpecAst& spec, const Resolver& r, const std::vector<const ProbProperty*>& props);

struct JobRecord {
    std::string property, config;
    std::optional<CheckResult> result;
    std::optional<Estimate> estimate;
    std::size_t states = 0, transitions = 0;
    double build_ms = 0;
    std::string error_code, error;  // set when the job failed
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<Diagnostic> diagnostics;
    std::vector<JobRecord> records;
    std::vector<std::string> files;  // written outputs
};

/// Exit codes: 0 all good, 1 a bounded boolean property fails, 2 validation or job error, 3 I/O error.
RunOutcome run(const RunPlan& plan);

std::string record_json(const JobRecord& r, bool timings = true);
std::string report_table(const RunOutcome& o, bool timings = true);

}  // namespace rcprob
