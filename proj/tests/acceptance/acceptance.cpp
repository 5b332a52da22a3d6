// Acceptance run: one line per criterion, exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "oracles.h"
#include "rcprob/prism.h"
#include "rcprob/run.h"

using namespace rcprob;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTableTol1 = 0.05;    // table entries given to one decimal
constexpr double kTableTol2 = 0.01;    // table entries given to two decimals
constexpr double kOracleTol = 1e-9;    // numeric engine against independent solves
constexpr double kViTol = 1e-13;       // convergence threshold used when comparing against oracles
constexpr double kProbOneTol = 1e-6;
constexpr double kCiCoverage = 0.90;
constexpr int kSprtRight = 99;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

CheckOptions tight() {
    CheckOptions co;
    co.vi.tol = kViTol;
    return co;
}

struct Srw {
    std::shared_ptr<const ModelAst> model;
    std::shared_ptr<const SpecAst> spec;

    explicit Srw(const std::string& spec_file, const std::string& extra = "") {
        model = std::make_shared<const ModelAst>(parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm"))));
        spec = std::make_shared<const SpecAst>(parse_spec(oracle::slurp(oracle::fixture(spec_file)) + extra));
        if (has_errors(validate(*model, *spec))) throw std::runtime_error(spec_file + " does not validate");
    }

    const ProbProperty& prop(const std::string& name) const {
        const ProbProperty* p = spec->find<ProbProperty>(name);
        if (!p) throw std::runtime_error("no property " + name);
        return *p;
    }

    std::vector<Valuation> configs(const ProbProperty& p) const {
        Resolver r(*model, spec.get());
        const ConstantsConfig* c = property_constants(*spec, p);
        return c ? expand_sweep(*c, r) : std::vector<Valuation>{{}};
    }

    MarkovModel build(const ProbProperty& p, const Valuation& v, ModelKind k) const {
        return build_markov(
            instantiate(model, spec, v, property_definitions(*spec, p), property_modules(*spec, p), k));
    }
};

std::int64_t field(const Valuation& v, const std::string& name) {
    for (const auto& [k, x] : v)
        if (k == name) return static_cast<std::int64_t>(x.to_double());
    throw std::runtime_error("missing " + name);
}

double field_d(const Valuation& v, const std::string& name) {
    for (const auto& [k, x] : v)
        if (k == name) return x.to_double();
    throw std::runtime_error("missing " + name);
}

// Value of `key=` in an exported valuation line, up to the next comma or space.
std::string read_field(const std::string& line, const std::string& key) {
    auto at = line.find(key + "=");
    if (at == std::string::npos) return {};
    at += key.size() + 1;
    auto end = line.find_first_of(", ", at);
    return line.substr(at, end == std::string::npos ? std::string::npos : end - at);
}

// ---- 1 ------------------------------------------------------------------------------------

Verdict table_two() {
    Srw srw("fixtures/srw.rcp");
    struct Row {
        const char* prop;
        double pl;
        std::vector<double> want;
        std::vector<int> decimals;
    };
    const std::vector<Row> rows = {
        {"R_stuck_not_origin_norecharge", 0.5, {2.5, 4.0, 5.1, 6.2, 7.3}, {1, 1, 1, 1, 1}},
        {"R_stuck_not_origin", 0.5, {4.7, 7.0, 9.5, 12.5, 16.2}, {1, 1, 1, 1, 1}},
        {"R_stuck_not_origin_biased", 0.3, {1.33, 1.47, 1.5, 1.51, 1.7}, {2, 2, 1, 2, 1}},
        {"R_stuck_not_origin_biased", 0.8, {0.66, 0.67, 0.67, 0.67, 0.67}, {2, 2, 2, 2, 2}},
    };
    int match = 0, agree = 0, total = 0;
    double worst_oracle = 0;
    std::string misses;
    for (const Row& row : rows) {
        const ProbProperty& p = srw.prop(row.prop);
        std::size_t col = 0;
        for (const Valuation& v : srw.configs(p)) {
            if (std::abs(field_d(v, "SRWMod::SRWRP::Pl") - row.pl) > 1e-12) continue;
            MarkovModel mm = srw.build(p, v, ModelKind::Dtmc);
            const double got = check_property(mm, p, tight()).value;
            attach_rewards(mm, *srw.spec->find<RewardsDecl>("R_origins"));
            oracle::ExplicitChain ch = oracle::parse_explicit(export_explicit(mm));
            std::vector<std::uint8_t> target(ch.valuation.size());
            for (std::size_t s = 0; s < target.size(); ++s)
                target[s] = read_field(ch.valuation[s], "stm_ref.pc") == "Stuck" && read_field(ch.valuation[s], "x") != "0";
            const double want_o = oracle::explicit_reward(ch, "R_origins", target);
            const double diff_o = std::abs(got - want_o);
            worst_oracle = std::max(worst_oracle, diff_o / std::max(1.0, std::abs(want_o)));
            agree += diff_o <= kOracleTol * std::max(1.0, std::abs(want_o));
            const double tol = row.decimals[col] == 1 ? kTableTol1 : kTableTol2;
            if (std::abs(got - row.want[col]) <= tol) {
                ++match;
            } else {
                misses += std::string(misses.empty() ? "" : ", ") + p.name + " Pl=" + fmt("%.1f", row.pl) + " MaxSteps=" +
                          std::to_string(field(v, "SRWMod::SRWRP::MaxSteps")) + " got " + fmt("%.4f", got) +
                          " want " + fmt("%g", row.want[col]);
            }
            ++col;
            ++total;
        }
    }
    Verdict out;
    const bool exact = match == total && total == 20;
    const bool fallback = agree == total && total == 20;
    out.pass = exact || fallback;
    out.detail = std::to_string(match) + "/" + std::to_string(total) + " table entries within tolerance; " +
                 std::to_string(agree) + "/" + std::to_string(total) + " agree with the explicit-model solve (worst " +
                 fmt("%.1e", worst_oracle) + ")";
    if (!exact && fallback) out.detail += "; fallback applied, off-table: " + misses;
    return out;
}

// ---- 2 ------------------------------------------------------------------------------------

Verdict stuck_with_probability_one() {
    Srw srw("fixtures/srw.rcp", R"(
prob property A_fair_recharge: Prob=? of [Finally #l_stuck] with constants C_fair_table with definitions D_recharge
prob property A_fair_norecharge: Prob=? of [Finally #l_stuck] with constants C_fair_table with definitions D_norecharge
prob property A_biased_recharge: Prob=? of [Finally #l_stuck] with constants C_biased_table with definitions D_recharge
prob property A_biased_norecharge: Prob=? of [Finally #l_stuck] with constants C_biased_table with definitions D_norecharge
)");
    int n = 0, ok = 0;
    double worst = 0;
    for (const char* name : {"A_fair_recharge", "A_fair_norecharge", "A_biased_recharge", "A_biased_norecharge"}) {
        const ProbProperty& p = srw.prop(name);
        for (const Valuation& v : srw.configs(p)) {
            MarkovModel mm = srw.build(p, v, ModelKind::Dtmc);
            const double got = check_property(mm, p).value;
            worst = std::max(worst, std::abs(got - 1.0));
            ok += std::abs(got - 1.0) <= kProbOneTol;
            ++n;
        }
    }
    return {ok == n && n == 30, std::to_string(ok) + "/" + std::to_string(n) + " configurations at 1 (worst |p-1| " +
                                    fmt("%.1e", worst) + ")"};
}

// ---- 3 ------------------------------------------------------------------------------------

Verdict deadlock_free() {
    Srw srw("fixtures/srw.rcp");
    const ProbProperty& p = srw.prop("P_deadlock_free");
    int n = 0, ok = 0;
    for (const Valuation& v : srw.configs(p)) {
        MarkovModel mm = srw.build(p, v, ModelKind::Mdp);
        ok += check_property(mm, p).verdict;
        ++n;
    }
    return {ok == n && n == 9, std::to_string(ok) + "/" + std::to_string(n) + " configurations deadlock-free"};
}

// ---- 4 ------------------------------------------------------------------------------------

Verdict qualitative() {
    Srw srw("fixtures/srw_qualitative.rcp");
    const std::map<std::string, bool> want = {
        {"q_init", true},         {"q_next_move", false},     {"q_f_stuck", false},  {"q_g_not_stuck", true},
        {"q_fg_stuck_all", false}, {"q_fg_stuck_some", true},  {"q_gf_move", false},  {"q_fair_move_p0", true},
        {"q_stuck_maxed", true},  {"q_maxed_then_stuck", true}, {"q_bounded_x", true}};
    int ok = 0;
    std::string wrong;
    for (const auto& [name, expect] : want) {
        const ProbProperty& p = srw.prop(name);
        MarkovModel mm = srw.build(p, srw.configs(p).at(0), ModelKind::Mdp);
        const bool got = check_property(mm, p).verdict;
        if (got == expect) ++ok;
        else wrong += " " + name;
    }
    return {ok == 11, std::to_string(ok) + "/11 verdicts reproduced" + (wrong.empty() ? "" : "; wrong:" + wrong)};
}

// ---- 5 ------------------------------------------------------------------------------------

const char* kHost = R"(module H {
  platform P { var x : int = 0; }
  controller C {
    requires P;
    machine M { initial i0; state A; transition t0 { from i0 to A } }
  }
})";

Verdict oracle_equivalence() {
    std::mt19937_64 rng(2024);
    ViOptions vo;
    vo.tol = kViTol;
    double worst_vi = 0, worst_mdp = 0;
    int dtmcs = 0, mdps = 0, lasso_checks = 0, lasso_bad = 0;
    std::size_t max_states = 0;
    for (int i = 0; i < 500; ++i) {
        oracle::ChainShape shape;
        shape.states = 2 + static_cast<std::size_t>(i * 37 % 199);
        MarkovModel mm = oracle::random_model(rng, shape);
        max_states = std::max(max_states, mm.num_states());
        StateSet phi1 = oracle::random_set(rng, mm.num_states(), 0.85);
        StateSet phi2 = oracle::random_set(rng, mm.num_states(), 0.08);
        auto want = oracle::dense_until(mm, phi1, phi2);
        auto got = prob_until(mm, phi1, phi2, Opt::Max, vo);
        for (std::size_t s = 0; s < mm.num_states(); ++s) worst_vi = std::max(worst_vi, std::abs(got[s] - want[s]));
        ++dtmcs;
    }
    for (int i = 0; i < 150; ++i) {
        oracle::ChainShape shape;
        shape.states = 8 + i % 8;
        shape.max_choices = 3;
        shape.nondet_states = 8;
        MarkovModel mm = oracle::random_model(rng, shape);
        StateSet phi1 = oracle::random_set(rng, mm.num_states(), 0.85);
        StateSet phi2 = oracle::random_set(rng, mm.num_states(), 0.15);
        std::vector<double> lo, hi;
        oracle::enumerate_adversaries(mm, phi1, phi2, lo, hi);
        auto mn = prob_until(mm, phi1, phi2, Opt::Min, vo);
        auto mx = prob_until(mm, phi1, phi2, Opt::Max, vo);
        for (std::size_t s = 0; s < mm.num_states(); ++s)
            worst_mdp = std::max({worst_mdp, std::abs(mn[s] - lo[s]), std::abs(mx[s] - hi[s])});
        ++mdps;
    }
    // A/E fragment against lasso enumeration on random graphs of up to 12 states.
    auto host = std::make_shared<const ModelAst>(parse_model(kHost));
    auto cm = instantiate(host, nullptr, {}, nullptr, nullptr, ModelKind::Mdp);
    MarkovModel base = build_markov(cm);
    std::size_t xslot = 0;
    for (std::size_t i = 0; i < cm->prog().slots.size(); ++i)
        if (cm->prog().slots[i].path == "H::P::x") xslot = i;
    const std::vector<std::string> names = {"(H::P::x == 0)", "(H::P::x == 1)", "(H::P::x >= 1)"};
    for (int round = 0; round < 200; ++round) {
        const std::size_t n = 2 + round % 11;
        oracle::ChainShape shape;
        shape.states = n;
        shape.max_succ = 2;
        shape.max_choices = 2;
        MarkovModel mm = oracle::random_model(rng, shape);
        mm.closed = base.closed;
        mm.width = base.width;
        mm.values.assign(n * mm.width, 0);
        std::uniform_int_distribution<int> val(0, 2);
        std::vector<StateSet> atoms(3, StateSet(n));
        for (std::size_t s = 0; s < n; ++s) {
            const int x = val(rng);
            mm.values[s * mm.width + xslot] = x;
            atoms[0][s] = x == 0;
            atoms[1][s] = x == 1;
            atoms[2][s] = x >= 1;
        }
        std::string text;
        oracle::LtlPtr f = oracle::random_path_formula(rng, 3, names, text);
        auto neg = std::make_shared<oracle::Ltl>();
        neg->k = oracle::Ltl::K::Not;
        neg->a = f;
        SpecAst spec = parse_spec("prob property e: Exists [" + text + "]\nprob property a: Forall [" + text + "]\n");
        PropertyChecker pc(mm);
        StateSet e = pc.sat(*spec.find<ProbProperty>("e")->body);
        StateSet a = pc.sat(*spec.find<ProbProperty>("a")->body);
        for (std::size_t s = 0; s < n; ++s) {
            lasso_bad += static_cast<bool>(e[s]) != oracle::exists_lasso(mm, s, *f, atoms);
            lasso_bad += static_cast<bool>(a[s]) == oracle::exists_lasso(mm, s, *neg, atoms);
            lasso_checks += 2;
        }
    }
    Verdict out;
    out.pass = worst_vi <= kOracleTol && worst_mdp <= kOracleTol && lasso_bad == 0 && dtmcs >= 500 && max_states <= 200;
    out.detail = std::to_string(dtmcs) + " dtmcs (worst " + fmt("%.1e", worst_vi) + "), " + std::to_string(mdps) +
                 " mdps vs adversary enumeration (worst " + fmt("%.1e", worst_mdp) + "), " +
                 std::to_string(lasso_checks - lasso_bad) + "/" + std::to_string(lasso_checks) + " A/E verdicts match lassos";
    return out;
}

// ---- 6 ------------------------------------------------------------------------------------

Verdict stochasticity() {
    int fixture_builds = 0, fuzz_builds = 0, bad = 0;
    std::string first_bad;
    auto judge = [&](const MarkovModel& mm, const std::string& what) {
        if (auto err = check_stochastic(mm)) {
            if (first_bad.empty()) first_bad = what + ": " + *err;
            ++bad;
        }
    };
    std::vector<std::string> files = {"fixtures/srw.rcp", "fixtures/srw_env.rcp", "fixtures/srw_qualitative.rcp"};
    for (const auto& f : fs::directory_iterator(oracle::fixture("corpus/valid")))
        files.push_back("corpus/valid/" + f.path().filename().string());
    for (const auto& file : files) {
        Srw srw(file);
        Resolver r(*srw.model, srw.spec.get());
        std::set<std::string> seen;
        for (const Job& j : sweep_experiments(*srw.spec, r, srw.spec->all<ProbProperty>())) {
            if (!seen.insert(j.group + "|" + valuation_str(j.config)).second) continue;
            for (ModelKind k : {ModelKind::Dtmc, ModelKind::Mdp}) {
                judge(srw.build(*j.property, j.config, k), file);
                ++fixture_builds;
            }
        }
    }
    std::mt19937_64 rng(606);
    for (int i = 0; i < 1000; ++i) {
        auto model = std::make_shared<const ModelAst>(parse_model(oracle::random_rcm(rng, i)));
        judge(build_markov(instantiate(model, nullptr, {}, nullptr, nullptr, i % 2 ? ModelKind::Mdp : ModelKind::Dtmc)),
              "fuzz " + std::to_string(i));
        ++fuzz_builds;
    }
    return {bad == 0 && fuzz_builds == 1000,
            std::to_string(fixture_builds) + " fixture builds and " + std::to_string(fuzz_builds) +
                " fuzzed builds, " + std::to_string(bad) + " failing exact row sums" +
                (first_bad.empty() ? "" : " (" + first_bad + ")")};
}

// ---- 7 ------------------------------------------------------------------------------------

Verdict smc_calibration() {
    const char* small = R"(
constants C_small:
  SRWMod::SRWRP::MaxDist set to 2,
  SRWMod::SRWRP::MaxSteps set to 4, and
  SRWMod::SRWRP::Pl set to 0.5
prob property exact: Prob=? of [Finally (#l_stuck /\ SRWMod::SRWRP::x > 0)]
  with constants C_small with definitions D_recharge
prob property ci: Prob=? of [Finally (#l_stuck /\ SRWMod::SRWRP::x > 0)] using sim with CI at alpha=0.05, n=1000
  with constants C_small with definitions D_recharge
prob property apmc: Prob=? of [Finally (#l_stuck /\ SRWMod::SRWRP::x > 0)] using sim with APMC at epsilon=0.05, and delta=0.01
  with constants C_small with definitions D_recharge
)";
    Srw probe("fixtures/srw.rcp", small);
    const ProbProperty& ex = probe.prop("exact");
    const Valuation cfg = probe.configs(ex).at(0);
    MarkovModel mm = probe.build(ex, cfg, ModelKind::Dtmc);
    const double p = check_property(mm, ex, tight()).value;

    // The thresholds sit two deltas either side of the exact value.
    const double delta = 0.05;
    std::ostringstream sprt;
    sprt << "prob property sprt_hi: Prob>=" << fmt("%.6f", p - 2 * delta)
         << " of [Finally (#l_stuck /\\ SRWMod::SRWRP::x > 0)] using sim with SPRT at alpha=0.01, delta=" << delta
         << " with constants C_small with definitions D_recharge\n"
         << "prob property sprt_lo: Prob>=" << fmt("%.6f", p + 2 * delta)
         << " of [Finally (#l_stuck /\\ SRWMod::SRWRP::x > 0)] using sim with SPRT at alpha=0.01, delta=" << delta
         << " with constants C_small with definitions D_recharge\n";
    Srw srw("fixtures/srw.rcp", small + sprt.str());

    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Estimate e;
        check_property_smc(mm, srw.prop("ci"), SmcOptions{seed}, &e);
        covered += std::abs(e.estimate - p) <= e.w;
    }
    Estimate ap;
    check_property_smc(mm, srw.prop("apmc"), SmcOptions{7}, &ap);
    int hi = 0, lo = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        hi += check_property_smc(mm, srw.prop("sprt_hi"), SmcOptions{seed}).verdict;
        lo += !check_property_smc(mm, srw.prop("sprt_lo"), SmcOptions{seed}).verdict;
    }
    const bool sprt_ok = hi >= kSprtRight && lo >= kSprtRight && p - 2 * delta > 0 && p + 2 * delta < 1;
    Verdict out;
    out.pass = covered >= kCiCoverage * 200 && ap.n == 1060 && apmc_samples(0.05, 0.01) == 1060 && sprt_ok;
    out.detail = "exact p=" + fmt("%.6f", p) + "; CI covered " + std::to_string(covered) + "/200; APMC n=" +
                 std::to_string(ap.n) + "; SPRT right " + std::to_string(hi) + "/100 above and " + std::to_string(lo) +
                 "/100 below";
    return out;
}

// ---- 8 ------------------------------------------------------------------------------------

Verdict emission() {
    fs::path out = fs::temp_directory_path() / "rcprob_acceptance_emit";
    fs::remove_all(out);
    RunPlan plan;
    plan.model_path = oracle::fixture("fixtures/srw.rcm");
    plan.spec_path = oracle::fixture("fixtures/srw.rcp");
    plan.engine = Engine::Emit;
    plan.out_dir = out.string();
    RunOutcome o = run(plan);
    int pairs = 0, problems = 0;
    std::string first;
    for (const auto& f : o.files) {
        if (f.size() < 6 || f.substr(f.size() - 6) != ".prism") continue;
        const std::string model = oracle::slurp(f);
        const std::string props = oracle::slurp(f.substr(0, f.size() - 6) + ".props");
        for (const auto& m : validate_prism_model(model)) problems++, first = first.empty() ? m : first;
        for (const auto& m : validate_prism_props(props, model)) problems++, first = first.empty() ? m : first;
        ++pairs;
    }
    fs::remove_all(out);

    Srw srw("fixtures/srw.rcp", R"(
label l3 = SRWMod::SRWRP::x <= 3
prob property ex_deadlock: not Exists [Finally deadlock] with constants C_fair_table with definitions D_recharge
prob property ex_stuck: Prob=? of [Finally #l_stuck /\ not #l_origin] with constants C_fair_table with definitions D_recharge
prob property ex_global: Forall [Globally #l3] with constants C_fair_table with definitions D_recharge
)");
    const ProbProperty& p0 = srw.prop("ex_deadlock");
    auto cm = instantiate(srw.model, srw.spec, srw.configs(p0).at(0), property_definitions(*srw.spec, p0), nullptr,
                          ModelKind::Mdp);
    const std::vector<std::pair<std::string, std::string>> expect = {
        {"ex_deadlock", "!E [ F \"deadlock\" ]"},
        {"ex_stuck", "P=? [ F \"l_stuck\" & !\"l_origin\" ]"},
        {"ex_global", "A [ G \"l3\" ]"}};
    int exact = 0;
    for (const auto& [name, want] : expect) {
        NameMap names;
        if (translate_property(*srw.prop(name).body, *cm, names) == want) ++exact;
        else problems++, first = first.empty() ? "translation of " + name : first;
    }
    return {o.exit_code == 0 && pairs >= 1 && problems == 0 && exact == 3,
            std::to_string(pairs) + " model/property pairs validated, " + std::to_string(exact) +
                "/3 translations byte-exact" + (first.empty() ? "" : "; first problem: " + first)};
}

// ---- 9 ------------------------------------------------------------------------------------

Verdict corpus() {
    const std::vector<std::string> rules = {"WFREF-1", "WFREF-2", "WFProp-1", "WFProp-2", "WFProp-3",
                                            "WFProp-4", "WFExp-1", "WFExp-2",  "WFExp-3",  "WFExp-4",
                                            "WFExp-5",  "WFExp-6", "WFExp-7"};
    ModelAst model = parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm")));
    std::map<std::string, int> invalid_hits, valid_hits;
    auto scan = [&](const std::string& dir, std::map<std::string, int>& hits) {
        for (const auto& f : fs::directory_iterator(oracle::fixture(dir))) {
            std::set<std::string> codes;
            for (const auto& d : validate(model, parse_spec(oracle::slurp(f.path().string())))) codes.insert(d.code);
            for (const auto& c : codes) hits[c]++;
        }
    };
    scan("corpus/invalid", invalid_hits);
    scan("corpus/valid", valid_hits);
    for (const char* f : {"fixtures/srw.rcp", "fixtures/srw_env.rcp", "fixtures/srw_qualitative.rcp"})
        for (const auto& d : validate(model, parse_spec(oracle::slurp(oracle::fixture(f))))) valid_hits[d.code]++;
    int exact = 0;
    std::string off;
    for (const auto& r : rules) {
        if (invalid_hits[r] == 1 && valid_hits[r] == 0) ++exact;
        else off += " " + r;
    }
    return {exact == 13, std::to_string(exact) + "/13 rules triggered by exactly one invalid file and no valid file" +
                             (off.empty() ? "" : "; off:" + off)};
}

// ---- 10 -----------------------------------------------------------------------------------

Verdict environment() {
    Srw srw("fixtures/srw_env.rcp");
    const oracle::EnvProduct want = oracle::srw_env_product(2, 4, 0.5);
    std::map<std::string, CheckResult> got;
    std::size_t built = 0;
    for (const char* name : {"S_net_bounded", "S_net_within_one", "E_net_bounded"}) {
        const ProbProperty& p = srw.prop(name);
        MarkovModel mm = srw.build(p, srw.configs(p).at(0), ModelKind::Dtmc);
        built = std::max(built, mm.num_states());
        got[name] = check_property(mm, p);
    }
    const bool ok = want.mon_states <= 50 && got["S_net_bounded"].verdict == want.net_bounded &&
                    got["S_net_within_one"].verdict == (want.max_abs_net <= 1) &&
                    got["E_net_bounded"].verdict == want.net_bounded;
    return {ok, "hand product " + std::to_string(want.mon_states) + " states (" + std::to_string(want.states) +
                    " with the counter); Forall [Globally] on the module variable: " +
                    (got["S_net_bounded"].verdict ? "true" : "false") + "/" +
                    (got["S_net_within_one"].verdict ? "true" : "false") + ", expected " +
                    (want.net_bounded ? "true" : "false") + "/" + (want.max_abs_net <= 1 ? "true" : "false")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"random-walk return-count table", table_two},
        {"random walk gets stuck with probability 1", stuck_with_probability_one},
        {"random walk is deadlock-free in all 9 configurations", deadlock_free},
        {"qualitative verdicts on the random-walk mdp", qualitative},
        {"numeric and A/E engines agree with independent oracles", oracle_equivalence},
        {"every built model is stochastic", stochasticity},
        {"simulation calibration", smc_calibration},
        {"PRISM emission", emission},
        {"validation corpus", corpus},
        {"environment module integration", environment},
    };
    int failed = 0, i = 0;
    for (const auto& [name, fn] : criteria) {
        ++i;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i, name, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
