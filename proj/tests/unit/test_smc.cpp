#include <doctest.h>

#include <cmath>

#include "oracles.h"
#include "rcprob/smc.h"

using namespace rcprob;

namespace {

// Gambler's ruin on 0..n started at k, winning each round with probability up/20.
MarkovModel ruin(int n, int k, int up) {
    MarkovModel mm;
    mm.kind = ModelKind::Dtmc;
    mm.actions = {""};
    mm.tag_sets = {{}};
    mm.deadlock.assign(n + 1, 0);
    mm.initial = static_cast<std::uint32_t>(k);
    mm.row.push_back(0);
    auto edge = [&](int dst, Rational p) {
        Edge e;
        e.dst = static_cast<std::uint32_t>(dst);
        e.prob = p;
        e.p = p.to_double();
        mm.edges.push_back(e);
    };
    for (int s = 0; s <= n; ++s) {
        Choice c;
        c.edge_begin = static_cast<std::uint32_t>(mm.edges.size());
        if (s == 0 || s == n) {
            edge(s, Rational(1));
        } else {
            edge(s + 1, Rational(up, 20));
            edge(s - 1, Rational(20 - up, 20));
        }
        c.edge_end = static_cast<std::uint32_t>(mm.edges.size());
        mm.choices.push_back(c);
        mm.row.push_back(static_cast<std::uint32_t>(mm.choices.size()));
    }
    return mm;
}

double ruin_win(int n, int k, int up) {
    const double r = (20.0 - up) / up;
    return (1 - std::pow(r, k)) / (1 - std::pow(r, n));
}

PathSpec reach_top(const MarkovModel& mm) {
    PathSpec ps;
    ps.kind = PathSpec::Kind::Until;
    ps.lhs.assign(mm.num_states(), 1);
    ps.rhs.assign(mm.num_states(), 0);
    ps.rhs.back() = 1;
    return ps;
}

}  // namespace

TEST_SUITE("smc") {
    TEST_CASE("quantiles match tabulated values") {
        CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
        CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
        CHECK(normal_quantile(0.005) == doctest::Approx(-2.575829304).epsilon(1e-8));
        CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.70620474).epsilon(1e-9));
        CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.228138852).epsilon(1e-9));
        CHECK(student_t_quantile(0.995, 29) == doctest::Approx(2.756385904).epsilon(1e-9));
    }

    TEST_CASE("Chernoff-Hoeffding sample counts and their inverses") {
        CHECK(apmc_samples(0.05, 0.01) == 1060);
        CHECK(apmc_samples(0.01, 0.05) == 18445);
        CHECK(apmc_epsilon(1060, 0.01) <= 0.05);
        CHECK(apmc_epsilon(1059, 0.01) > 0.05);
        CHECK(apmc_delta(1060, 0.05) <= 0.01);
        CHECK(apmc_samples(apmc_epsilon(5000, 0.02), 0.02) <= 5000);
    }

    TEST_CASE("samples depend only on seed and index") {
        MarkovModel mm = ruin(6, 3, 9);
        Simulator a(mm, reach_top(mm), 7, 1000), b(mm, reach_top(mm), 7, 1000), c(mm, reach_top(mm), 8, 1000);
        std::vector<double> fwd, rev(200);
        for (std::uint64_t i = 0; i < 200; ++i) fwd.push_back(a.sample(i));
        for (std::uint64_t i = 200; i-- > 0;) rev[i] = b.sample(i);
        CHECK(fwd == rev);
        int differ = 0;
        for (std::uint64_t i = 0; i < 200; ++i) differ += c.sample(i) != fwd[i];
        CHECK(differ > 0);
    }

    TEST_CASE("traces end where the monitor decides") {
        MarkovModel mm = ruin(6, 3, 9);
        Simulator sim(mm, reach_top(mm), 1, 1000);
        for (std::uint64_t i = 0; i < 50; ++i) {
            SimPath p;
            double v = sim.sample(i, &p);
            REQUIRE_FALSE(p.steps.empty());
            CHECK(p.steps.front().state == 3);
            const auto last = p.steps.back().state;
            CHECK(((last == 6 && v == 1.0) || (last == 0 && v == 0.0)));
            for (std::size_t j = 1; j < p.steps.size(); ++j)
                CHECK(std::abs(int(p.steps[j].state) - int(p.steps[j - 1].state)) == 1);
        }
    }

    TEST_CASE("confidence intervals cover the true value at roughly their nominal rate") {
        MarkovModel mm = ruin(6, 3, 9);
        const double truth = ruin_win(6, 3, 9);
        int covered = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            Simulator sim(mm, reach_top(mm), seed, 1000);
            Estimate e = run_ci(sim, std::nullopt, 0.05, 1000);
            CHECK(e.n == 1000);
            covered += std::abs(e.estimate - truth) <= e.w;
        }
        CHECK(covered >= 180);
    }

    TEST_CASE("the sequential test picks the right side of a threshold") {
        MarkovModel mm = ruin(6, 3, 12);
        const double truth = ruin_win(6, 3, 12);
        REQUIRE(truth > 0.7);
        int right = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Simulator sim(mm, reach_top(mm), seed, 1000);
            right += run_sprt(sim, 0.6, 0.01, 0.05).decision == Estimate::Decision::AcceptH0;
            Simulator sim2(mm, reach_top(mm), seed, 1000);
            right += run_sprt(sim2, 0.85, 0.01, 0.05).decision == Estimate::Decision::AcceptH1;
        }
        CHECK(right >= 198);
    }

    TEST_CASE("simulation refuses nondeterministic models") {
        std::mt19937_64 rng(3);
        MarkovModel mm = oracle::random_model(rng, {6, 2, 2, 0, 0.1});
        CHECK_THROWS_AS(Simulator(mm, reach_top(mm), 0, 10), Error);
    }
}
