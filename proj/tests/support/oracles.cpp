#include "oracles.h"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#ifndef RCPROB_TEST_DIR
#define RCPROB_TEST_DIR "tests"
#endif

namespace oracle {

using namespace rcprob;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string& rel) { return std::string(RCPROB_TEST_DIR) + "/" + rel; }

MarkovModel random_model(std::mt19937_64& rng, const ChainShape& shape) {
    const std::size_t n = shape.states;
    MarkovModel mm;
    mm.kind = shape.max_choices > 1 ? ModelKind::Mdp : ModelKind::Dtmc;
    mm.actions = {""};
    mm.tag_sets = {{}};
    mm.deadlock.assign(n, 0);
    mm.row.push_back(0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<int> weight(1, 4);
    std::uniform_real_distribution<double> coin(0, 1);
    for (std::size_t s = 0; s < n; ++s) {
        const bool nondet = shape.nondet_states == 0 || s < shape.nondet_states;
        const std::size_t nc = nondet ? std::uniform_int_distribution<std::size_t>(1, shape.max_choices)(rng) : 1;
        for (std::size_t c = 0; c < nc; ++c) {
            std::vector<std::uint32_t> dst;
            const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(shape.max_succ, n))(rng);
            while (dst.size() < k) {
                auto t = static_cast<std::uint32_t>(pick(rng));
                if (std::find(dst.begin(), dst.end(), t) == dst.end()) dst.push_back(t);
            }
            if (coin(rng) < shape.self_loop && std::find(dst.begin(), dst.end(), s) == dst.end())
                dst.push_back(static_cast<std::uint32_t>(s));
            std::vector<int> w(dst.size());
            for (auto& x : w) x = weight(rng);
            const int total = std::accumulate(w.begin(), w.end(), 0);
            Choice ch;
            ch.edge_begin = static_cast<std::uint32_t>(mm.edges.size());
            for (std::size_t i = 0; i < dst.size(); ++i) {
                Edge e;
                e.dst = dst[i];
                e.prob = Rational(w[i], total);
                e.p = e.prob.to_double();
                mm.edges.push_back(e);
            }
            ch.edge_end = static_cast<std::uint32_t>(mm.edges.size());
            mm.choices.push_back(ch);
        }
        mm.row.push_back(static_cast<std::uint32_t>(mm.choices.size()));
    }
    return mm;
}

StateSet random_set(std::mt19937_64& rng, std::size_t n, double density) {
    std::bernoulli_distribution b(density);
    StateSet s(n);
    for (auto& x : s) x = b(rng);
    return s;
}

namespace {

template <typename F>
void for_edges(const MarkovModel& mm, std::size_t s, F f) {
    for (std::uint32_t c = mm.row[s]; c < mm.row[s + 1]; ++c)
        for (std::uint32_t e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
            if (mm.edges[e].p > 0) f(mm.edges[e]);
}

/// States that can reach `to` through `via` states (graph, all choices).
StateSet backward_reach(const MarkovModel& mm, const StateSet& via, const StateSet& to) {
    const std::size_t n = mm.num_states();
    StateSet r = to;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (r[s] || !via[s]) continue;
            bool hit = false;
            for_edges(mm, s, [&](const Edge& e) { hit = hit || r[e.dst]; });
            if (hit) r[s] = 1, changed = true;
        }
    }
    return r;
}

}  // namespace

std::vector<double> dense_until(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2) {
    const std::size_t n = mm.num_states();
    StateSet can = backward_reach(mm, phi1, phi2);
    std::vector<int> idx(n, -1);
    int m = 0;
    for (std::size_t s = 0; s < n; ++s)
        if (can[s] && !phi2[s]) idx[s] = m++;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (std::size_t s = 0; s < n; ++s) {
        if (idx[s] < 0) continue;
        for_edges(mm, s, [&](const Edge& e) {
            if (phi2[e.dst]) b(idx[s]) += e.p;
            else if (idx[e.dst] >= 0) A(idx[s], idx[e.dst]) -= e.p;
        });
    }
    Eigen::VectorXd x = A.fullPivLu().solve(b);
    std::vector<double> out(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) out[s] = phi2[s] ? 1.0 : idx[s] >= 0 ? x(idx[s]) : 0.0;
    return out;
}

std::vector<double> dense_reward(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, const StateSet& target) {
    const std::size_t n = mm.num_states();
    StateSet all(n, 1);
    StateSet reach = backward_reach(mm, all, target);
    // Positive chance of reaching a state that can never see the target.
    StateSet lost(n, 0);
    for (std::size_t s = 0; s < n; ++s) lost[s] = !reach[s];
    StateSet not_target(n, 0);
    for (std::size_t s = 0; s < n; ++s) not_target[s] = !target[s];
    StateSet inf = backward_reach(mm, not_target, lost);
    std::vector<int> idx(n, -1);
    int m = 0;
    for (std::size_t s = 0; s < n; ++s)
        if (!target[s] && !inf[s]) idx[s] = m++;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (std::size_t s = 0; s < n; ++s) {
        if (idx[s] < 0) continue;
        b(idx[s]) += state_r.empty() ? 0.0 : state_r[s];
        const auto* base = mm.edges.data();
        for_edges(mm, s, [&](const Edge& e) {
            b(idx[s]) += e.p * (edge_r.empty() ? 0.0 : edge_r[&e - base]);
            if (idx[e.dst] >= 0) A(idx[s], idx[e.dst]) -= e.p;
        });
    }
    Eigen::VectorXd x = A.fullPivLu().solve(b);
    std::vector<double> out(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        out[s] = target[s] ? 0.0 : inf[s] ? std::numeric_limits<double>::infinity() : x(idx[s]);
    return out;
}

ExplicitChain parse_explicit(const std::string& text) {
    ExplicitChain c;
    std::istringstream in(text);
    std::vector<std::pair<std::size_t, double>>* rewards = nullptr;
    auto prob = [](const std::string& t) {
        auto slash = t.find('/');
        if (slash == std::string::npos) return std::stod(t);
        return std::stod(t.substr(0, slash)) / std::stod(t.substr(slash + 1));
    };
    for (std::string line; std::getline(in, line);) {
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "STATES") {
            std::size_t n = 0;
            ls >> n;
            c.valuation.resize(n);
        } else if (head == "INIT") {
            ls >> c.initial;
        } else if (head == "KIND") {
            std::string k;
            ls >> k;
            if (k != "dtmc") throw std::runtime_error("explicit oracle reads dtmcs only");
        } else if (head == "REWARD") {
            std::string name;
            ls >> name;
            c.edge_rewards.push_back({name, {}});
            rewards = &c.edge_rewards.back().second;
        } else if (rewards) {
            std::size_t i = 0;
            double v = 0;
            ls >> i >> v;
            if (head == "state" && v != 0) throw std::runtime_error("explicit oracle handles edge rewards only");
            if (head == "edge") rewards->push_back({i, v});
        } else if (head == "state") {
            std::size_t i = 0;
            ls >> i;
            std::string rest;
            std::getline(ls, rest);
            c.valuation.at(i) = rest;
        } else if (!head.empty()) {
            std::vector<std::string> tok;
            for (std::string t; ls >> t;) tok.push_back(t);
            if (tok.size() < 3) throw std::runtime_error("bad edge line: " + line);
            ExplicitChain::Arc a;
            a.src = static_cast<std::uint32_t>(std::stoul(head));
            a.dst = static_cast<std::uint32_t>(std::stoul(tok[tok.size() - 2]));
            a.p = prob(tok[tok.size() - 3]);
            c.arcs.push_back(a);
        }
    }
    return c;
}

double explicit_reward(const ExplicitChain& c, const std::string& reward, const std::vector<std::uint8_t>& target) {
    const std::size_t n = c.valuation.size();
    std::vector<double> er(c.arcs.size(), 0.0);
    bool found = false;
    for (const auto& [name, list] : c.edge_rewards)
        if (name == reward) {
            found = true;
            for (auto [i, v] : list) er.at(i) = v;
        }
    if (!found) throw std::runtime_error("no reward structure " + reward);
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t i = 0; i < c.arcs.size(); ++i)
        if (c.arcs[i].p > 0) pred[c.arcs[i].dst].push_back(i);
    // States that can reach the target, then states that can reach a state that cannot.
    auto back = [&](std::vector<std::uint8_t> seed, const std::vector<std::uint8_t>& through) {
        std::vector<std::size_t> stack;
        for (std::size_t s = 0; s < n; ++s)
            if (seed[s]) stack.push_back(s);
        while (!stack.empty()) {
            std::size_t t = stack.back();
            stack.pop_back();
            for (std::size_t i : pred[t]) {
                std::size_t s = c.arcs[i].src;
                if (!seed[s] && through[s]) seed[s] = 1, stack.push_back(s);
            }
        }
        return seed;
    };
    std::vector<std::uint8_t> all(n, 1), not_target(n), lost(n);
    for (std::size_t s = 0; s < n; ++s) not_target[s] = !target[s];
    auto reach = back(target, all);
    for (std::size_t s = 0; s < n; ++s) lost[s] = !reach[s];
    auto inf = back(lost, not_target);
    if (target[c.initial]) return 0.0;
    if (inf[c.initial]) return std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, -1);
    int m = 0;
    for (std::size_t s = 0; s < n; ++s)
        if (!target[s] && !inf[s]) idx[s] = m++;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) trip.emplace_back(i, i, 1.0);
    for (std::size_t i = 0; i < c.arcs.size(); ++i) {
        const auto& a = c.arcs[i];
        if (idx[a.src] < 0) continue;
        b(idx[a.src]) += a.p * er[i];
        if (idx[a.dst] >= 0) trip.emplace_back(idx[a.src], idx[a.dst], -a.p);
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse factorisation failed");
    Eigen::VectorXd x = lu.solve(b);
    return x(idx[c.initial]);
}

MarkovModel induce(const MarkovModel& mm, const std::vector<std::size_t>& pick) {
    MarkovModel d;
    d.kind = ModelKind::Dtmc;
    d.actions = mm.actions;
    d.tag_sets = mm.tag_sets;
    d.deadlock = mm.deadlock;
    d.initial = mm.initial;
    d.row.push_back(0);
    for (std::size_t s = 0; s < mm.num_states(); ++s) {
        const Choice& c = mm.choices[mm.row[s] + pick[s]];
        Choice nc = c;
        nc.edge_begin = static_cast<std::uint32_t>(d.edges.size());
        d.edges.insert(d.edges.end(), mm.edges.begin() + c.edge_begin, mm.edges.begin() + c.edge_end);
        nc.edge_end = static_cast<std::uint32_t>(d.edges.size());
        d.choices.push_back(nc);
        d.row.push_back(static_cast<std::uint32_t>(d.choices.size()));
    }
    return d;
}

void enumerate_adversaries(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, std::vector<double>& lo,
                           std::vector<double>& hi) {
    const std::size_t n = mm.num_states();
    lo.assign(n, 2.0);
    hi.assign(n, -1.0);
    std::vector<std::size_t> pick(n, 0);
    for (;;) {
        auto v = dense_until(induce(mm, pick), phi1, phi2);
        for (std::size_t s = 0; s < n; ++s) lo[s] = std::min(lo[s], v[s]), hi[s] = std::max(hi[s], v[s]);
        std::size_t s = 0;
        for (; s < n; ++s) {
            if (++pick[s] < mm.row[s + 1] - mm.row[s]) break;
            pick[s] = 0;
        }
        if (s == n) break;
    }
}

double unfold_bounded_until(const MarkovModel& mm, std::size_t s, const StateSet& phi1, const StateSet& phi2, long k,
                            bool maximise) {
    if (phi2[s]) return 1.0;
    if (!phi1[s] || k == 0) return 0.0;
    double best = maximise ? -1.0 : 2.0;
    for (std::uint32_t c = mm.row[s]; c < mm.row[s + 1]; ++c) {
        double v = 0;
        for (std::uint32_t e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
            v += mm.edges[e].p * unfold_bounded_until(mm, mm.edges[e].dst, phi1, phi2, k - 1, maximise);
        best = maximise ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

// ---- lassos ------------------------------------------------------------------------------

namespace {

using Bits = std::vector<char>;

Bits eval_lasso(const Ltl& f, const std::vector<std::uint32_t>& word, std::size_t loop_start,
                const std::vector<StateSet>& atoms) {
    const std::size_t L = word.size();
    auto succ = [&](std::size_t i) { return i + 1 < L ? i + 1 : loop_start; };
    Bits out(L, 0);
    using K = Ltl::K;
    if (f.k == K::Atom) {
        for (std::size_t i = 0; i < L; ++i) out[i] = atoms[f.atom][word[i]] != 0;
        return out;
    }
    Bits a = eval_lasso(*f.a, word, loop_start, atoms);
    Bits b = f.b ? eval_lasso(*f.b, word, loop_start, atoms) : Bits{};
    // a U<=k b at i, with k < 0 meaning unbounded.
    auto until = [&](const Bits& x, const Bits& y, long k) {
        Bits r(L, 0);
        for (std::size_t i = 0; i < L; ++i) {
            std::size_t j = i;
            const long limit = k < 0 ? static_cast<long>(2 * L) : k;
            for (long step = 0; step <= limit; ++step, j = succ(j)) {
                if (y[j]) {
                    r[i] = 1;
                    break;
                }
                if (!x[j]) break;
            }
        }
        return r;
    };
    auto negate = [](Bits x) {
        for (auto& v : x) v = !v;
        return x;
    };
    Bits all(L, 1);
    switch (f.k) {
        case K::Not: return negate(a);
        case K::And:
            for (std::size_t i = 0; i < L; ++i) out[i] = a[i] && b[i];
            return out;
        case K::Or:
            for (std::size_t i = 0; i < L; ++i) out[i] = a[i] || b[i];
            return out;
        case K::Implies:
            for (std::size_t i = 0; i < L; ++i) out[i] = !a[i] || b[i];
            return out;
        case K::Next:
            for (std::size_t i = 0; i < L; ++i) out[i] = a[succ(i)];
            return out;
        case K::Finally: return until(all, a, f.bound);
        case K::Globally: return negate(until(all, negate(a), f.bound));
        case K::Until: return until(a, b, f.bound);
        case K::WeakUntil: {
            Bits u = until(a, b, f.bound), g = negate(until(all, negate(a), f.bound));
            for (std::size_t i = 0; i < L; ++i) out[i] = u[i] || g[i];
            return out;
        }
        case K::Release: return negate(until(negate(a), negate(b), f.bound));
        default: return out;
    }
}

}  // namespace

bool holds_on_lasso(const Ltl& f, const std::vector<std::uint32_t>& prefix, const std::vector<std::uint32_t>& loop,
                    const std::vector<StateSet>& atoms) {
    std::vector<std::uint32_t> word = prefix;
    word.insert(word.end(), loop.begin(), loop.end());
    return eval_lasso(f, word, prefix.size(), atoms)[0];
}

bool exists_lasso(const MarkovModel& mm, std::size_t s, const Ltl& f, const std::vector<StateSet>& atoms, int visits) {
    std::vector<std::uint32_t> path{static_cast<std::uint32_t>(s)};
    std::vector<int> count(mm.num_states(), 0);
    count[s] = 1;
    std::function<bool()> dfs = [&]() -> bool {
        bool found = false;
        std::vector<std::uint32_t> next;
        for_edges(mm, path.back(), [&](const Edge& e) {
            if (std::find(next.begin(), next.end(), e.dst) == next.end()) next.push_back(e.dst);
        });
        for (std::uint32_t t : next) {
            for (std::size_t j = 0; j < path.size() && !found; ++j) {
                if (path[j] != t) continue;
                std::vector<std::uint32_t> prefix(path.begin(), path.begin() + j), loop(path.begin() + j, path.end());
                found = holds_on_lasso(f, prefix, loop, atoms);
            }
            if (found) return true;
            if (count[t] < visits) {
                path.push_back(t);
                ++count[t];
                found = dfs();
                --count[t];
                path.pop_back();
                if (found) return true;
            }
        }
        return false;
    };
    return dfs();
}

namespace {

LtlPtr node(Ltl::K k, LtlPtr a = nullptr, LtlPtr b = nullptr, long bound = -1) {
    auto f = std::make_shared<Ltl>();
    f->k = k;
    f->a = std::move(a);
    f->b = std::move(b);
    f->bound = bound;
    return f;
}

struct Gen {
    std::mt19937_64& rng;
    int natoms;
    const std::vector<std::string>& names;

    int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    // Propositional operand.
    LtlPtr prop(std::string& t) {
        auto leaf = [&](std::string& s) {
            auto f = std::make_shared<Ltl>();
            f->atom = roll(natoms);
            s = names[f->atom];
            return f;
        };
        switch (roll(4)) {
            case 0: {
                std::string x;
                auto a = leaf(x);
                t = "(not " + x + ")";
                return node(Ltl::K::Not, a);
            }
            case 1: {
                std::string x, y;
                auto a = leaf(x), b = leaf(y);
                t = "(" + x + " /\\ " + y + ")";
                return node(Ltl::K::And, a, b);
            }
            default: return leaf(t);
        }
    }

    // Temporal operator over propositional operands, or GF / FG.
    LtlPtr core(std::string& t, bool allow_bound = true) {
        std::string x, y;
        auto p = prop(x);
        const long k = allow_bound && roll(3) == 0 ? roll(4) : -1;
        const std::string bs = k >= 0 ? "<=" + std::to_string(k) : "";
        switch (roll(8)) {
            case 0: t = "(Next " + x + ")"; return node(Ltl::K::Next, p);
            case 1: t = "(Finally" + bs + " " + x + ")"; return node(Ltl::K::Finally, p, nullptr, k);
            case 2: t = "(Globally" + bs + " " + x + ")"; return node(Ltl::K::Globally, p, nullptr, k);
            case 3: {
                auto q = prop(y);
                t = "(" + x + " Until" + bs + " " + y + ")";
                return node(Ltl::K::Until, p, q, k);
            }
            case 4: {
                auto q = prop(y);
                t = "(" + x + " Weak Until" + bs + " " + y + ")";
                return node(Ltl::K::WeakUntil, p, q, k);
            }
            case 5: {
                auto q = prop(y);
                t = "(" + x + " Release" + bs + " " + y + ")";
                return node(Ltl::K::Release, p, q, k);
            }
            case 6: t = "(Globally Finally " + x + ")"; return node(Ltl::K::Globally, node(Ltl::K::Finally, p));
            default: t = "(Finally Globally " + x + ")"; return node(Ltl::K::Finally, node(Ltl::K::Globally, p));
        }
    }

    LtlPtr gf_or_fg(std::string& t, bool gf) {
        std::string x;
        auto p = prop(x);
        t = gf ? "(Globally Finally " + x + ")" : "(Finally Globally " + x + ")";
        return gf ? node(Ltl::K::Globally, node(Ltl::K::Finally, p)) : node(Ltl::K::Finally, node(Ltl::K::Globally, p));
    }
};

}  // namespace

LtlPtr random_path_formula(std::mt19937_64& rng, int natoms, const std::vector<std::string>& atom_text,
                           std::string& text) {
    // Shapes accepted under both quantifiers.
    Gen g{rng, natoms, atom_text};
    std::string x, y;
    switch (g.roll(6)) {
        case 0:
        case 1: return g.core(text);
        case 2: {
            auto c = g.core(x);
            text = "(not " + x + ")";
            return node(Ltl::K::Not, c);
        }
        case 3: {
            auto p = g.prop(x);
            auto c = g.core(y);
            text = "(" + x + " => " + y + ")";
            return node(Ltl::K::Implies, p, c);
        }
        default: {
            auto a = g.gf_or_fg(x, g.roll(2) == 0);
            auto b = g.gf_or_fg(y, true);
            text = "(" + x + " => " + y + ")";
            return node(Ltl::K::Implies, a, b);
        }
    }
}

// ---- environment-module product -----------------------------------------------------------

EnvProduct srw_env_product(int D, int S, double pl) {
    struct St {
        bool stuck;
        int x, steps, net, lefts;
        auto key() const { return std::make_tuple(stuck, x, steps, net, lefts); }
    };
    std::map<std::tuple<bool, int, int, int, int>, std::size_t> index;
    std::vector<St> states;
    std::vector<std::vector<std::pair<std::size_t, double>>> succ;
    auto intern = [&](const St& s) {
        auto [it, fresh] = index.emplace(s.key(), states.size());
        if (fresh) states.push_back(s), succ.emplace_back();
        return it->second;
    };
    // Entering Move recharges at the origin, otherwise counts a step.
    auto enter = [&](St s) {
        s.steps = s.x == 0 ? 0 : std::min(s.steps + 1, S);
        return s;
    };
    auto go_left = [&](St s) {
        s.x = s.x > -D ? s.x - 1 : s.x;
        s.net -= 1;
        s.lefts = std::min(s.lefts + 1, 3);
        return enter(s);
    };
    auto go_right = [&](St s) {
        s.x = s.x < D ? s.x + 1 : s.x;
        s.net += 1;
        return enter(s);
    };
    intern(enter(St{false, 0, 0, 0, 0}));
    for (std::size_t i = 0; i < states.size(); ++i) {
        const St s = states[i];
        std::vector<std::pair<St, double>> out;
        if (s.stuck) out = {{s, 1.0}};
        else if (s.steps == S) out = {{St{true, s.x, s.steps, s.net, s.lefts}, 1.0}};
        else if (s.x > -D && s.x < D) out = {{go_right(s), 1 - pl}, {go_left(s), pl}};
        else if (s.x >= D) out = {{go_left(s), 1.0}};
        else out = {{go_right(s), 1.0}};
        for (auto& [t, p] : out) {
            std::size_t j = intern(t);
            succ[i].push_back({j, p});
        }
    }
    EnvProduct r;
    r.states = states.size();
    const std::size_t n = states.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    // Which states can still reach lefts == 3; the rest are fixed at 0.
    std::vector<char> can(n, 0);
    for (std::size_t i = 0; i < n; ++i) can[i] = states[i].lefts == 3;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (auto [j, p] : succ[i])
                if (!can[i] && can[j] && p > 0) can[i] = 1, changed = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const St& s = states[i];
        r.net_bounded = r.net_bounded && s.net >= -D && s.net <= D;
        r.few_lefts = r.few_lefts && s.lefts < 3;
        r.net_tracks_x = r.net_tracks_x && s.net == s.x;
        r.max_abs_net = std::max(r.max_abs_net, std::abs(s.net));
        if (s.lefts == 3) b(i) = 1;
        else if (can[i])
            for (auto [j, p] : succ[i]) A(i, j) -= p;
    }
    r.p_three_lefts = A.fullPivLu().solve(b)(0);
    std::set<std::tuple<bool, int, int, int>> mon;
    for (const St& s : states) mon.emplace(s.stuck, s.x, s.steps, s.net);
    r.mon_states = mon.size();
    return r;
}

// ---- random RoboChart models -------------------------------------------------------------

std::string random_rcm(std::mt19937_64& rng, int index) {
    auto roll = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const int ns = 2 + roll(3), nj = roll(3);
    std::ostringstream os;
    os << "module F" << index << " {\n  platform P {\n    var x : int = 0;\n    var y : bool = false;\n  }\n"
       << "  controller C {\n    requires P;\n    machine M {\n      initial i0;\n";
    static const char* entries[] = {"y = not y", "x = (if x < 2 then x + 1 else 0 end)", "x = 0; y = true"};
    for (int s = 0; s < ns; ++s) {
        os << "      state S" << s;
        if (roll(3) == 0) os << " { entry " << entries[roll(3)] << " }";
        os << ";\n";
    }
    for (int j = 0; j < nj; ++j) os << "      pjunction J" << j << ";\n";
    static const char* guards[] = {"x < 2", "x >= 1", "y", "not y", "x == 0 /\\ y"};
    static const char* actions[] = {"x = (if x < 2 then x + 1 else 0 end)", "y = not y", "x = 0",
                                    "x = (if x > 0 then x - 1 else 2 end); y = false"};
    static const std::vector<std::vector<const char*>> splits = {{"0.5", "0.5"}, {"0.25", "0.75"}, {"0.2", "0.3", "0.5"},
                                                                 {"1"}};
    int t = 0;
    os << "      transition t" << t++ << " { from i0 to S0 }\n";
    auto target = [&]() {
        const int k = roll(ns + nj);
        return k < ns ? "S" + std::to_string(k) : "J" + std::to_string(k - ns);
    };
    for (int s = 0; s < ns; ++s) {
        const int out = roll(4);  // 0 leaves a potential quiescent state
        for (int i = 0; i < out; ++i) {
            os << "      transition t" << t++ << " { from S" << s << " to " << target();
            if (roll(2)) os << " guard " << guards[roll(5)];
            if (roll(2)) os << " action " << actions[roll(4)];
            os << " }\n";
        }
    }
    for (int j = 0; j < nj; ++j) {
        const auto& split = splits[roll(static_cast<int>(splits.size()))];
        for (const char* p : split) {
            os << "      transition t" << t++ << " { from J" << j << " to S" << roll(ns) << " prob " << p;
            if (roll(3) == 0) os << " action " << actions[roll(4)];
            os << " }\n";
        }
    }
    os << "    }\n  }\n}\n";
    return os.str();
}

}  // namespace oracle
