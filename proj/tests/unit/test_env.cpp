#include <doctest.h>

#include "oracles.h"
#include "rcprob/check.h"

using namespace rcprob;

TEST_SUITE("environment") {
    TEST_CASE("modules synchronising on left.out and right.out agree with the hand-built product") {
        auto model = std::make_shared<const ModelAst>(parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm"))));
        auto spec = std::make_shared<const SpecAst>(parse_spec(oracle::slurp(oracle::fixture("fixtures/srw_env.rcp"))));
        REQUIRE_FALSE(has_errors(validate(*model, *spec)));
        const oracle::EnvProduct want = oracle::srw_env_product(2, 4, 0.5);
        CHECK(want.states <= 50);
        CHECK(want.net_tracks_x);

        Resolver r(*model, spec.get());
        std::map<std::string, CheckResult> got;
        std::map<std::string, std::size_t> states;
        for (const ProbProperty* p : spec->all<ProbProperty>()) {
            auto v = expand_sweep(*property_constants(*spec, *p), r);
            auto cm = instantiate(model, spec, v.at(0), property_definitions(*spec, *p), property_modules(*spec, *p),
                                  ModelKind::Dtmc);
            MarkovModel mm = build_markov(cm);
            CHECK_FALSE(check_stochastic(mm).has_value());
            CheckOptions co;
            co.vi.tol = 1e-13;
            got[p->name] = check_property(mm, *p, co);
            states[p->name] = mm.num_states();
        }
        CHECK(got.at("E_net_bounded").verdict == want.net_bounded);
        CHECK(got.at("E_few_lefts").verdict == want.few_lefts);
        CHECK(got.at("E_three_lefts").value == doctest::Approx(want.p_three_lefts).epsilon(1e-9));
        CHECK(got.at("E_deadlock_free").verdict);
        CHECK(want.mon_states <= 50);
        CHECK(got.at("S_net_bounded").verdict == want.net_bounded);
        CHECK(got.at("S_net_within_one").verdict == (want.max_abs_net <= 1));
        CHECK(want.max_abs_net == 2);
        CHECK(states.at("S_net_bounded") > want.mon_states);
    }

    TEST_CASE("a module whose guards refuse an output blocks the machine") {
        auto model = std::make_shared<const ModelAst>(parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm"))));
        auto spec = std::make_shared<const SpecAst>(parse_spec(R"(
constants C:
  SRWMod::SRWRP::MaxDist set to 2,
  SRWMod::SRWRP::MaxSteps set to 4, and
  SRWMod::SRWRP::Pl set to 0.5
defs D:
  pfunction Plus(v, maxv) = { return (if ($$v) < ($$maxv) then ($$v + 1) else ($$v) end) }
  pfunction Minus(v, minv) = { return (if ($$v) > ($$minv) then ($$v - 1) else ($$v) end) }
  pfunction Update(v, maxv, origin) = { return (if ($$v) < ($$maxv) then ($$v + 1) else ($$v) end) }
pmodules Once:
  pmodule Gate {
    used : bool init false;
    [SRWMod::ctrl_ref::stm_ref::left.out] not @used -> (@used = true);
    [SRWMod::ctrl_ref::stm_ref::right.out] not @used -> (@used = true);
  }
prob property blocked: Exists [Finally deadlock] with constants C with definitions D with modules Once
)"));
        REQUIRE_FALSE(has_errors(validate(*model, *spec)));
        const ProbProperty* p = spec->find<ProbProperty>("blocked");
        Resolver r(*model, spec.get());
        auto cm = instantiate(model, spec, expand_sweep(*property_constants(*spec, *p), r)[0],
                              property_definitions(*spec, *p), property_modules(*spec, *p), ModelKind::Dtmc);
        MarkovModel mm = build_markov(cm);
        CHECK(check_property(mm, *p).verdict);
    }
}
