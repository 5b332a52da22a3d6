#include <doctest.h>

#include "oracles.h"
#include "rcprob/check.h"

using namespace rcprob;

namespace {

std::shared_ptr<const ModelAst> srw_model() {
    return std::make_shared<const ModelAst>(parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm"))));
}

std::shared_ptr<const SpecAst> spec_of(const std::string& text) { return std::make_shared<const SpecAst>(parse_spec(text)); }

}  // namespace

TEST_SUITE("build") {
    TEST_CASE("fuzzed machines build into stochastic models under both readings") {
        std::mt19937_64 rng(31);
        int built = 0;
        for (int i = 0; i < 200; ++i) {
            const std::string text = oracle::random_rcm(rng, i);
            auto model = std::make_shared<const ModelAst>(parse_model(text));
            REQUIRE_FALSE(has_errors(validate(*model, SpecAst{})));
            CHECK(structurally_equal(parse_model(print_model(*model)), *model));
            for (ModelKind k : {ModelKind::Dtmc, ModelKind::Mdp}) {
                MarkovModel mm = build_markov(instantiate(model, nullptr, {}, nullptr, nullptr, k));
                INFO(text);
                CHECK_FALSE(check_stochastic(mm).has_value());
                CHECK(mm.num_states() >= 2);
                if (k == ModelKind::Dtmc) CHECK_FALSE(has_nondeterminism(mm));
                ++built;
            }
        }
        CHECK(built == 400);
    }

    TEST_CASE("the random walk is stochastic in every configuration of its sweep") {
        auto model = srw_model();
        auto spec = std::make_shared<const SpecAst>(parse_spec(oracle::slurp(oracle::fixture("fixtures/srw.rcp"))));
        Resolver r(*model, spec.get());
        const ProbProperty* p = spec->find<ProbProperty>("P_deadlock_free");
        auto sweep = expand_sweep(*property_constants(*spec, *p), r);
        REQUIRE(sweep.size() == 9);
        for (const auto& v : sweep) {
            auto cm = instantiate(model, spec, v, property_definitions(*spec, *p), nullptr, ModelKind::Dtmc);
            MarkovModel mm = build_markov(cm);
            CHECK_FALSE(check_stochastic(mm).has_value());
            CHECK(mm.deadlock[mm.initial] == 0);
        }
    }

    TEST_CASE("an exact-arithmetic row sum catches a distribution off by one part in a million") {
        std::mt19937_64 rng(32);
        MarkovModel mm = oracle::random_model(rng, {});
        REQUIRE_FALSE(check_stochastic(mm).has_value());
        Edge& e = mm.edges[0];
        e.prob = e.prob + Rational(1, 1000000);
        CHECK(check_stochastic(mm).has_value());
    }

    TEST_CASE("sweep expansion multiplies the set sizes, first entry slowest") {
        auto model = srw_model();
        auto spec = spec_of(R"(
constants A:
  SRWMod::SRWRP::MaxDist from set {1, 2}, and
  SRWMod::SRWRP::MaxSteps from set {3 to 7 by step 2}
constants B:
  SRWMod::SRWRP::MaxDist set to 1,
  SRWMod::SRWRP::MaxSteps set to 2, and
  SRWMod::SRWRP::Pl set to 0.5
)");
        Resolver r(*model, spec.get());
        auto a = expand_sweep(*spec->find<ConstantsConfig>("A"), r);
        REQUIRE(a.size() == 6);
        CHECK(valuation_str(a[0]) == "SRWMod::SRWRP::MaxDist=1, SRWMod::SRWRP::MaxSteps=3");
        CHECK(valuation_str(a[1]) == "SRWMod::SRWRP::MaxDist=1, SRWMod::SRWRP::MaxSteps=5");
        CHECK(valuation_str(a[5]) == "SRWMod::SRWRP::MaxDist=2, SRWMod::SRWRP::MaxSteps=7");
        CHECK(expand_sweep(*spec->find<ConstantsConfig>("B"), r).size() == 1);
    }

    TEST_CASE("the state cap stops exploration") {
        auto model = srw_model();
        auto spec = std::make_shared<const SpecAst>(parse_spec(oracle::slurp(oracle::fixture("fixtures/srw.rcp"))));
        Resolver r(*model, spec.get());
        const ProbProperty* p = spec->find<ProbProperty>("P_stuck");
        auto v = expand_sweep(*property_constants(*spec, *p), r)[0];
        auto cm = instantiate(model, spec, v, property_definitions(*spec, *p), nullptr, ModelKind::Dtmc);
        try {
            build_markov(cm, BuildOptions{100});
            FAIL("expected the cap to trigger");
        } catch (const Error& e) {
            CHECK(e.code() == "STATE_CAP");
        }
    }

    TEST_CASE("a configuration leaving a loose constant unset is rejected") {
        auto model = srw_model();
        auto spec = std::make_shared<const SpecAst>(parse_spec(oracle::slurp(oracle::fixture("fixtures/srw.rcp"))));
        Valuation partial = {{"SRWMod::SRWRP::MaxDist", Value::integer(3)}};
        try {
            instantiate(model, spec, partial, spec->find<DefinitionsDecl>("D_recharge"), nullptr, ModelKind::Dtmc);
            FAIL("expected a scope error");
        } catch (const Error& e) {
            CHECK(e.code() == "SCOPE");
        }
    }

    TEST_CASE("the initial distribution sums to one in floating point too") {
        auto model = srw_model();
        auto spec = std::make_shared<const SpecAst>(parse_spec(oracle::slurp(oracle::fixture("fixtures/srw.rcp"))));
        Resolver r(*model, spec.get());
        const ProbProperty* p = spec->find<ProbProperty>("P_stuck");
        auto v = expand_sweep(*property_constants(*spec, *p), r)[0];
        MarkovModel mm =
            build_markov(instantiate(model, spec, v, property_definitions(*spec, *p), nullptr, ModelKind::Dtmc));
        double total = 0;
        for (std::uint32_t e = mm.choices[mm.row[mm.initial]].edge_begin; e < mm.choices[mm.row[mm.initial]].edge_end; ++e)
            total += mm.edges[e].p;
        CHECK(total == doctest::Approx(1.0));
    }
}
