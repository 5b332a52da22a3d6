#include <doctest.h>

#include "oracles.h"
#include "rcprob/numeric.h"

using namespace rcprob;

namespace {

constexpr double kTight = 1e-9;

ViOptions tight() {
    ViOptions vo;
    vo.tol = 1e-13;
    return vo;
}

}  // namespace

TEST_SUITE("numeric") {
    TEST_CASE("unbounded until on a dtmc agrees with a dense solve") {
        std::mt19937_64 rng(11);
        for (int round = 0; round < 60; ++round) {
            oracle::ChainShape shape;
            shape.states = 5 + round * 3 % 120;
            MarkovModel mm = oracle::random_model(rng, shape);
            StateSet phi1 = oracle::random_set(rng, mm.num_states(), 0.8);
            StateSet phi2 = oracle::random_set(rng, mm.num_states(), 0.1);
            auto want = oracle::dense_until(mm, phi1, phi2);
            auto got = prob_until(mm, phi1, phi2, Opt::Max, tight());
            for (std::size_t s = 0; s < mm.num_states(); ++s) REQUIRE(got[s] == doctest::Approx(want[s]).epsilon(kTight));
        }
    }

    TEST_CASE("min and max reachability match memoryless adversary enumeration") {
        std::mt19937_64 rng(12);
        for (int round = 0; round < 40; ++round) {
            oracle::ChainShape shape;
            shape.states = 6 + round % 10;
            shape.max_choices = 3;
            shape.nondet_states = 6;
            MarkovModel mm = oracle::random_model(rng, shape);
            StateSet phi1 = oracle::random_set(rng, mm.num_states(), 0.85);
            StateSet phi2 = oracle::random_set(rng, mm.num_states(), 0.15);
            std::vector<double> lo, hi;
            oracle::enumerate_adversaries(mm, phi1, phi2, lo, hi);
            auto mn = prob_until(mm, phi1, phi2, Opt::Min, tight());
            auto mx = prob_until(mm, phi1, phi2, Opt::Max, tight());
            for (std::size_t s = 0; s < mm.num_states(); ++s) {
                CHECK(std::abs(mn[s] - lo[s]) <= kTight);
                CHECK(std::abs(mx[s] - hi[s]) <= kTight);
            }
        }
    }

    TEST_CASE("bounded until matches path unfolding") {
        std::mt19937_64 rng(13);
        for (int round = 0; round < 40; ++round) {
            oracle::ChainShape shape;
            shape.states = 4 + round % 6;
            shape.max_choices = 1 + round % 3;
            shape.max_succ = 2;
            MarkovModel mm = oracle::random_model(rng, shape);
            StateSet phi1 = oracle::random_set(rng, mm.num_states(), 0.8);
            StateSet phi2 = oracle::random_set(rng, mm.num_states(), 0.2);
            const long k = round % 6;
            for (Opt o : {Opt::Min, Opt::Max}) {
                auto got = prob_until_bounded(mm, phi1, phi2, k, o);
                for (std::size_t s = 0; s < mm.num_states(); ++s)
                    CHECK(got[s] == doctest::Approx(oracle::unfold_bounded_until(mm, s, phi1, phi2, k, o == Opt::Max)));
            }
        }
    }

    TEST_CASE("reachability reward agrees with a dense solve, infinite where the target may be missed") {
        std::mt19937_64 rng(14);
        for (int round = 0; round < 40; ++round) {
            oracle::ChainShape shape;
            shape.states = 5 + round * 2;
            MarkovModel mm = oracle::random_model(rng, shape);
            StateSet target = oracle::random_set(rng, mm.num_states(), 0.2);
            std::vector<double> sr(mm.num_states()), er(mm.num_edges());
            std::uniform_real_distribution<double> r(0, 2);
            for (auto& v : sr) v = r(rng);
            for (auto& v : er) v = r(rng) < 1 ? 0 : r(rng);
            auto want = oracle::dense_reward(mm, sr, er, target);
            auto got = reward_reach(mm, sr, er, target, Opt::Max, tight());
            for (std::size_t s = 0; s < mm.num_states(); ++s) {
                if (std::isinf(want[s])) CHECK(std::isinf(got[s]));
                else CHECK(got[s] == doctest::Approx(want[s]).epsilon(kTight));
            }
        }
    }

    TEST_CASE("cumulative reward over k steps sums the step-wise expectations") {
        std::mt19937_64 rng(15);
        oracle::ChainShape shape;
        shape.states = 7;
        MarkovModel mm = oracle::random_model(rng, shape);
        std::vector<double> sr(mm.num_states(), 0.0), er(mm.num_edges(), 0.0);
        sr[0] = 1.0;
        // With reward 1 in state 0 only, C<=k counts expected visits to 0 among the first k states.
        std::vector<double> dist(mm.num_states(), 0.0);
        dist[0] = 1.0;
        double visits = 0;
        for (long k = 1; k <= 6; ++k) {
            visits += dist[0];
            std::vector<double> nd(mm.num_states(), 0.0);
            for (std::size_t s = 0; s < mm.num_states(); ++s)
                for (auto e = mm.choices[mm.row[s]].edge_begin; e < mm.choices[mm.row[s]].edge_end; ++e)
                    nd[mm.edges[e].dst] += dist[s] * mm.edges[e].p;
            dist = nd;
            CHECK(reward_cumul(mm, sr, er, k, Opt::Max)[0] == doctest::Approx(visits));
        }
    }

    TEST_CASE("qualitative pre-passes agree with the quantitative values") {
        std::mt19937_64 rng(16);
        for (int round = 0; round < 30; ++round) {
            oracle::ChainShape shape;
            shape.states = 8;
            shape.max_choices = 2;
            MarkovModel mm = oracle::random_model(rng, shape);
            StateSet phi1 = oracle::random_set(rng, 8, 0.8), phi2 = oracle::random_set(rng, 8, 0.2);
            std::vector<double> lo, hi;
            oracle::enumerate_adversaries(mm, phi1, phi2, lo, hi);
            for (Opt o : {Opt::Min, Opt::Max}) {
                const auto& ref = o == Opt::Min ? lo : hi;
                auto z = prob0(mm, phi1, phi2, o), one = prob1(mm, phi1, phi2, o);
                for (std::size_t s = 0; s < 8; ++s) {
                    CHECK(static_cast<bool>(z[s]) == (ref[s] < 1e-12));
                    CHECK(static_cast<bool>(one[s]) == (ref[s] > 1 - 1e-12));
                }
            }
        }
    }

    TEST_CASE("bottom components of a two-cycle chain") {
        // 0 -> {1, 2}; 1 <-> 3; 2 self-loop.
        MarkovModel mm;
        mm.kind = ModelKind::Dtmc;
        mm.actions = {""};
        mm.tag_sets = {{}};
        mm.deadlock.assign(4, 0);
        auto add = [&](std::vector<std::pair<std::uint32_t, Rational>> out) {
            Choice c;
            c.edge_begin = static_cast<std::uint32_t>(mm.edges.size());
            for (auto& [d, p] : out) mm.edges.push_back(Edge{d, p, p.to_double(), 0});
            c.edge_end = static_cast<std::uint32_t>(mm.edges.size());
            mm.choices.push_back(c);
            mm.row.push_back(static_cast<std::uint32_t>(mm.choices.size()));
        };
        mm.row.push_back(0);
        add({{1, Rational(1, 2)}, {2, Rational(1, 2)}});
        add({{3, Rational(1)}});
        add({{2, Rational(1)}});
        add({{1, Rational(1)}});
        std::vector<char> nontrivial;
        auto comp = scc_decompose(mm, set_all(4), nontrivial);
        CHECK(comp[1] == comp[3]);
        CHECK(comp[0] != comp[1]);
        CHECK(nontrivial[comp[2]]);
        CHECK_FALSE(nontrivial[comp[0]]);
        StateSet cyc = on_cycle(mm, set_all(4));
        CHECK(cyc == StateSet{0, 1, 1, 1});
    }
}
