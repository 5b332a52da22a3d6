#include <doctest.h>

#include "oracles.h"
#include "rcprob/check.h"

using namespace rcprob;

namespace {

const char* kHost = R"(module H {
  platform P { var x : int = 0; }
  controller C {
    requires P;
    machine M { initial i0; state A; transition t0 { from i0 to A } }
  }
})";

/// A built model whose graph and valuations are replaced by a random graph; only slot x carries meaning.
struct Host {
    MarkovModel mm;
    std::size_t x = 0;

    explicit Host(std::mt19937_64& rng, std::size_t n) {
        auto model = std::make_shared<const ModelAst>(parse_model(kHost));
        auto cm = instantiate(model, nullptr, {}, nullptr, nullptr, ModelKind::Mdp);
        MarkovModel base = build_markov(cm);
        oracle::ChainShape shape;
        shape.states = n;
        shape.max_succ = 2;
        shape.max_choices = 2;
        mm = oracle::random_model(rng, shape);
        mm.closed = base.closed;
        mm.width = base.width;
        const auto& slots = cm->prog().slots;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].path == "H::P::x") x = i;
        mm.values.assign(n * mm.width, 0);
        std::uniform_int_distribution<int> v(0, 2);
        for (std::size_t s = 0; s < n; ++s) mm.values[s * mm.width + x] = v(rng);
    }

    std::int64_t x_of(std::size_t s) const { return mm.state(s)[x]; }
};

StateSet eval_body(MarkovModel& mm, const std::string& body) {
    SpecAst spec = parse_spec("prob property q: " + body);
    PropertyChecker pc(mm);
    return pc.sat(*spec.all<ProbProperty>()[0]->body);
}

}  // namespace

TEST_SUITE("check") {
    TEST_CASE("Forall and Exists agree with lasso enumeration on random graphs") {
        std::mt19937_64 rng(21);
        const std::vector<std::string> names = {"(H::P::x == 0)", "(H::P::x == 1)", "(H::P::x >= 1)"};
        int checked = 0, e_true = 0, a_true = 0;
        for (int round = 0; round < 150; ++round) {
            Host h(rng, 2 + round % 9);
            const std::size_t n = h.mm.num_states();
            std::vector<StateSet> atoms(3, StateSet(n));
            for (std::size_t s = 0; s < n; ++s) {
                atoms[0][s] = h.x_of(s) == 0;
                atoms[1][s] = h.x_of(s) == 1;
                atoms[2][s] = h.x_of(s) >= 1;
            }
            std::string text;
            oracle::LtlPtr f = oracle::random_path_formula(rng, 3, names, text);
            auto neg = std::make_shared<oracle::Ltl>();
            neg->k = oracle::Ltl::K::Not;
            neg->a = f;
            StateSet e = eval_body(h.mm, "Exists [" + text + "]");
            StateSet a = eval_body(h.mm, "Forall [" + text + "]");
            for (std::size_t s = 0; s < n; ++s) {
                INFO("formula ", text, " state ", s);
                CHECK(static_cast<bool>(e[s]) == oracle::exists_lasso(h.mm, s, *f, atoms));
                CHECK(static_cast<bool>(a[s]) == !oracle::exists_lasso(h.mm, s, *neg, atoms));
                ++checked;
                e_true += e[s] != 0;
                a_true += a[s] != 0;
            }
        }
        CHECK(checked > 500);
        // Both verdicts occur often enough for the comparison to mean something.
        CHECK(e_true > checked / 10);
        CHECK(e_true < checked * 9 / 10);
        CHECK(a_true > checked / 10);
        CHECK(a_true < checked * 9 / 10);
    }

    TEST_CASE("lasso evaluation of a few hand-checked words") {
        using K = oracle::Ltl::K;
        std::vector<StateSet> atoms = {{1, 0, 0}, {0, 1, 0}};
        auto atom = [](int i) {
            auto f = std::make_shared<oracle::Ltl>();
            f->atom = i;
            return f;
        };
        auto un = [](K k, oracle::LtlPtr a, long b = -1) {
            auto f = std::make_shared<oracle::Ltl>();
            f->k = k;
            f->a = a;
            f->bound = b;
            return f;
        };
        // 0 1 (2)^w
        CHECK(oracle::holds_on_lasso(*un(K::Finally, atom(1)), {0, 1}, {2}, atoms));
        CHECK_FALSE(oracle::holds_on_lasso(*un(K::Finally, atom(1), 0), {0, 1}, {2}, atoms));
        CHECK(oracle::holds_on_lasso(*un(K::Finally, atom(1), 1), {0, 1}, {2}, atoms));
        CHECK_FALSE(oracle::holds_on_lasso(*un(K::Globally, un(K::Finally, atom(0))), {0, 1}, {2}, atoms));
        // (0 1)^w
        CHECK(oracle::holds_on_lasso(*un(K::Globally, un(K::Finally, atom(0))), {}, {0, 1}, atoms));
        CHECK(oracle::holds_on_lasso(*un(K::Next, atom(1)), {}, {0, 1}, atoms));
    }

    TEST_CASE("deadlock and init are recognised at the right states") {
        auto model = std::make_shared<const ModelAst>(parse_model(kHost));
        auto cm = instantiate(model, nullptr, {}, nullptr, nullptr, ModelKind::Dtmc);
        MarkovModel mm = build_markov(cm);
        // i0 -> A, then A has no transitions: quiescent, not a deadlock.
        CHECK(eval_body(mm, "init")[mm.initial]);
        CHECK(eval_body(mm, "Forall [Finally Globally not deadlock]")[mm.initial]);
    }

    TEST_CASE("Example 1 verdicts on the random walk mdp") {
        auto model = std::make_shared<const ModelAst>(parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm"))));
        auto spec = std::make_shared<const SpecAst>(
            parse_spec(oracle::slurp(oracle::fixture("fixtures/srw_qualitative.rcp"))));
        REQUIRE_FALSE(has_errors(validate(*model, *spec)));
        Resolver r(*model, spec.get());
        const std::map<std::string, bool> want = {{"q_init", true},         {"q_next_move", false},
                                                  {"q_f_stuck", false},     {"q_g_not_stuck", true},
                                                  {"q_fg_stuck_all", false}, {"q_fg_stuck_some", true},
                                                  {"q_gf_move", false},     {"q_fair_move_p0", true},
                                                  {"q_stuck_maxed", true},  {"q_maxed_then_stuck", true},
                                                  {"q_bounded_x", true}};
        std::size_t seen = 0;
        for (const ProbProperty* p : spec->all<ProbProperty>()) {
            auto it = want.find(p->name);
            if (it == want.end()) continue;
            auto v = expand_sweep(*property_constants(*spec, *p), r);
            REQUIRE(v.size() == 1);
            auto cm = instantiate(model, spec, v[0], property_definitions(*spec, *p), property_modules(*spec, *p),
                                  ModelKind::Mdp);
            MarkovModel mm = build_markov(cm);
            INFO(p->name);
            CHECK(check_property(mm, *p).verdict == it->second);
            ++seen;
        }
        CHECK(seen == want.size());
    }

    TEST_CASE("a quantitative query on a nondeterministic model needs min or max") {
        auto model = std::make_shared<const ModelAst>(parse_model(oracle::slurp(oracle::fixture("fixtures/srw.rcm"))));
        auto spec = std::make_shared<const SpecAst>(
            parse_spec(oracle::slurp(oracle::fixture("fixtures/srw_qualitative.rcp"))));
        Resolver r(*model, spec.get());
        const ProbProperty* p = spec->find<ProbProperty>("q_prob_plain");
        REQUIRE(p);
        auto cm = instantiate(model, spec, expand_sweep(*property_constants(*spec, *p), r)[0],
                              property_definitions(*spec, *p), nullptr, ModelKind::Mdp);
        MarkovModel mm = build_markov(cm);
        if (has_nondeterminism(mm)) CHECK_THROWS_AS(check_property(mm, *p), Error);
        const ProbProperty* lo = spec->find<ProbProperty>("q_prob_min");
        const ProbProperty* hi = spec->find<ProbProperty>("q_prob_max");
        REQUIRE(lo);
        REQUIRE(hi);
        CHECK(check_property(mm, *lo).value <= check_property(mm, *hi).value + 1e-12);
    }
}
