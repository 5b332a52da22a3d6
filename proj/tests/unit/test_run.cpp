#include <doctest.h>

#include <filesystem>

#include "oracles.h"
#include "rcprob/run.h"

using namespace rcprob;
namespace fs = std::filesystem;

namespace {

RunPlan plan_for(const std::string& spec, const std::string& out) {
    RunPlan p;
    p.model_path = oracle::fixture("fixtures/srw.rcm");
    p.spec_path = oracle::fixture(spec);
    p.out_dir = (fs::temp_directory_path() / out).string();
    fs::remove_all(p.out_dir);
    return p;
}

}  // namespace

TEST_SUITE("run") {
    TEST_CASE("one record per property and configuration, in source order") {
        RunPlan p = plan_for("fixtures/srw.rcp", "rcprob_run_records");
        p.prop_glob = "P_*";
        p.kind = ModelKind::Dtmc;
        RunOutcome o = run(p);
        CHECK(o.exit_code == 0);
        SpecAst spec = parse_spec(oracle::slurp(p.spec_path));
        auto model = parse_model(oracle::slurp(p.model_path));
        Resolver r(model, &spec);
        std::vector<const ProbProperty*> props;
        for (const auto* q : spec.all<ProbProperty>())
            if (q->name.rfind("P_", 0) == 0) props.push_back(q);
        auto jobs = sweep_experiments(spec, r, props);
        REQUIRE(o.records.size() == jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            CHECK(o.records[i].property == jobs[i].property->name);
            CHECK(o.records[i].config == valuation_str(jobs[i].config));
            CHECK(o.records[i].error.empty());
        }
        auto lines = oracle::slurp(p.out_dir + "/report.jsonl");
        CHECK(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')) == jobs.size());
        fs::remove_all(p.out_dir);
    }

    TEST_CASE("reports are byte-identical across runs and thread counts without timings") {
        std::string first;
        for (unsigned threads : {1u, 4u}) {
            RunPlan p = plan_for("fixtures/srw_qualitative.rcp", "rcprob_run_bytes");
            p.timings = false;
            p.threads = threads;
            run(p);
            std::string now = oracle::slurp(p.out_dir + "/report.jsonl") + oracle::slurp(p.out_dir + "/report.txt");
            if (first.empty()) first = now;
            CHECK(now == first);
            fs::remove_all(p.out_dir);
        }
        RunPlan s = plan_for("fixtures/srw.rcp", "rcprob_run_smc");
        s.engine = Engine::Smc;
        s.prop_glob = "P_stuck";
        s.timings = false;
        s.seed = 11;
        run(s);
        std::string a = oracle::slurp(s.out_dir + "/report.jsonl");
        s.threads = 1;
        run(s);
        CHECK(oracle::slurp(s.out_dir + "/report.jsonl") == a);
        fs::remove_all(s.out_dir);
    }

    TEST_CASE("exit codes") {
        RunPlan ok = plan_for("fixtures/srw_env.rcp", "rcprob_run_exit");
        ok.prop_glob = "E_net_bounded";
        CHECK(run(ok).exit_code == 0);

        RunPlan falsy = ok;
        falsy.prop_glob = "E_few_lefts";
        CHECK(run(falsy).exit_code == 1);

        RunPlan bad = plan_for("corpus/invalid/wfexp1.rcp", "rcprob_run_exit");
        RunOutcome o = run(bad);
        CHECK(o.exit_code == 2);
        CHECK_FALSE(o.diagnostics.empty());
        CHECK(o.records.empty());

        RunPlan capped = ok;
        capped.max_states = 10;
        RunOutcome c = run(capped);
        CHECK(c.exit_code == 2);
        REQUIRE(c.records.size() == 1);
        CHECK(c.records[0].error_code == "STATE_CAP");

        RunPlan missing = ok;
        missing.spec_path = "/nonexistent/spec.rcp";
        CHECK(run(missing).exit_code == 3);

        RunPlan smc_mdp = ok;
        smc_mdp.engine = Engine::Smc;
        smc_mdp.kind = ModelKind::Mdp;
        CHECK(run(smc_mdp).exit_code == 2);
        fs::remove_all(ok.out_dir);
    }

    TEST_CASE("json records keep a fixed key order") {
        RunPlan p = plan_for("fixtures/srw.rcp", "rcprob_run_json");
        p.prop_glob = "P_stuck";
        p.kind = ModelKind::Dtmc;
        RunOutcome o = run(p);
        REQUIRE_FALSE(o.records.empty());
        std::string j = record_json(o.records[0], false);
        auto at = [&](const char* k) { return j.find(std::string("\"") + k + "\""); };
        CHECK(at("property") < at("config"));
        CHECK(at("config") < at("value"));
        CHECK(at("value") < at("states"));
        CHECK(j.find("\"buildMs\":0") != std::string::npos);
        fs::remove_all(p.out_dir);
    }
}
