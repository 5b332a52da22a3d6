#include "rcprob/numeric.h"

#include <algorithm>
#include <cmath>

namespace rcprob {

StateSet set_not(const StateSet& a) {
    StateSet r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = !a[i];
    return r;
}

StateSet set_and(const StateSet& a, const StateSet& b) {
    StateSet r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] && b[i];
    return r;
}

StateSet set_or(const StateSet& a, const StateSet& b) {
    StateSet r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] || b[i];
    return r;
}

StateSet set_all(std::size_t n, bool v) { return StateSet(n, v ? 1 : 0); }

namespace {

/// Compressed adjacency (successors or predecessors) over positive edges.
struct Csr {
    std::vector<std::uint32_t> off, to;
};

Csr predecessors(const MarkovModel& mm) {
    const std::size_t n = mm.num_states();
    Csr g;
    g.off.assign(n + 1, 0);
    for (std::size_t s = 0; s < n; ++s)
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                if (mm.edges[e].p > 0) g.off[mm.edges[e].dst + 1]++;
    for (std::size_t i = 0; i < n; ++i) g.off[i + 1] += g.off[i];
    g.to.resize(g.off[n]);
    std::vector<std::uint32_t> fill(g.off.begin(), g.off.end() - 1);
    for (std::size_t s = 0; s < n; ++s)
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                if (mm.edges[e].p > 0) g.to[fill[mm.edges[e].dst]++] = static_cast<std::uint32_t>(s);
    return g;
}

/// Successor lists restricted to the given choices (empty `allowed`: all).
Csr successors(const MarkovModel& mm, const std::vector<char>& allowed) {
    const std::size_t n = mm.num_states();
    Csr g;
    g.off.assign(n + 1, 0);
    for (std::size_t s = 0; s < n; ++s) {
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c) {
            if (!allowed.empty() && !allowed[c]) continue;
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                if (mm.edges[e].p > 0) g.to.push_back(mm.edges[e].dst);
        }
        g.off[s + 1] = static_cast<std::uint32_t>(g.to.size());
    }
    return g;
}

/// Iterative Tarjan over `g` restricted to `within`.
std::vector<int> tarjan(const Csr& g, const StateSet& within, std::vector<char>& nontrivial) {
    const std::size_t n = g.off.size() - 1;
    std::vector<int> comp(n, -1), index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> call;  // (state, next edge offset)
    int counter = 0, ncomp = 0;
    nontrivial.clear();
    for (std::size_t root = 0; root < n; ++root) {
        if (!within[root] || index[root] >= 0) continue;
        call.emplace_back(static_cast<std::uint32_t>(root), g.off[root]);
        index[root] = low[root] = counter++;
        stack.push_back(static_cast<std::uint32_t>(root));
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next < g.off[v + 1]) {
                std::uint32_t w = g.to[next++];
                if (!within[w]) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.emplace_back(w, g.off[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] != index[done]) continue;
            std::uint32_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp[w] = ncomp;
            } while (w != done);
            nontrivial.push_back(0);
            ++ncomp;
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (comp[v] < 0) continue;
        for (auto e = g.off[v]; e < g.off[v + 1]; ++e)
            if (comp[g.to[e]] == comp[v]) nontrivial[comp[v]] = 1;
    }
    return comp;
}

/// Backward closure: states of `through` that reach `from` via `through` states, plus `from`.
StateSet backward(const Csr& pred, const StateSet& from, const StateSet& through) {
    StateSet r = from;
    std::vector<std::uint32_t> work;
    for (std::size_t s = 0; s < r.size(); ++s)
        if (r[s]) work.push_back(static_cast<std::uint32_t>(s));
    while (!work.empty()) {
        std::uint32_t v = work.back();
        work.pop_back();
        for (auto e = pred.off[v]; e < pred.off[v + 1]; ++e) {
            std::uint32_t u = pred.to[e];
            if (!r[u] && through[u]) {
                r[u] = 1;
                work.push_back(u);
            }
        }
    }
    return r;
}

template <typename F>
double choice_sum(const MarkovModel& mm, std::uint32_t c, F&& value) {
    double acc = 0;
    for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e) acc += mm.edges[e].p * value(e);
    return acc;
}

double better(Opt opt, double a, double b) { return opt == Opt::Max ? std::max(a, b) : std::min(a, b); }
double worst(Opt opt) { return opt == Opt::Max ? -kInf : kInf; }

double rel_change(double old_v, double new_v) {
    if (old_v == new_v) return 0;
    if (std::isinf(old_v) || std::isinf(new_v)) return kInf;
    double d = std::fabs(new_v - old_v);
    return new_v != 0 ? d / std::fabs(new_v) : d;
}

[[noreturn]] void cap_reached(const ViStats& st) {
    throw Error("ITERATION_CAP", "value iteration did not converge after " + std::to_string(st.iterations) +
                                     " iterations (last residual " + std::to_string(st.residual) + ")");
}

}  // namespace

StateSet exists_next(const MarkovModel& mm, const StateSet& target) {
    StateSet r(mm.num_states(), 0);
    for (std::size_t s = 0; s < mm.num_states(); ++s)
        for (auto c = mm.row[s]; c < mm.row[s + 1] && !r[s]; ++c)
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                if (mm.edges[e].p > 0 && target[mm.edges[e].dst]) {
                    r[s] = 1;
                    break;
                }
    return r;
}

StateSet exists_until(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, long bound) {
    if (bound < 0) return backward(predecessors(mm), phi2, phi1);
    StateSet r = phi2;
    for (long i = 0; i < bound; ++i) {
        StateSet next = set_or(phi2, set_and(phi1, exists_next(mm, r)));
        if (next == r) break;
        r = std::move(next);
    }
    return r;
}

StateSet exists_globally(const MarkovModel& mm, const StateSet& phi, long bound) {
    const std::size_t n = mm.num_states();
    if (bound >= 0) {
        StateSet r = phi;
        for (long i = 0; i < bound; ++i) {
            StateSet next = set_and(phi, exists_next(mm, r));
            if (next == r) break;
            r = std::move(next);
        }
        return r;
    }
    // Greatest fixpoint by successor counting.
    StateSet z = phi;
    std::vector<std::uint32_t> cnt(n, 0), work;
    for (std::size_t s = 0; s < n; ++s) {
        if (!z[s]) continue;
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                if (mm.edges[e].p > 0 && z[mm.edges[e].dst]) cnt[s]++;
        if (cnt[s] == 0) work.push_back(static_cast<std::uint32_t>(s));
    }
    Csr pred = predecessors(mm);
    while (!work.empty()) {
        std::uint32_t v = work.back();
        work.pop_back();
        if (!z[v]) continue;
        z[v] = 0;
        for (auto e = pred.off[v]; e < pred.off[v + 1]; ++e) {
            std::uint32_t u = pred.to[e];
            if (z[u] && --cnt[u] == 0) work.push_back(u);
        }
    }
    return z;
}

std::vector<int> scc_decompose(const MarkovModel& mm, const StateSet& within, std::vector<char>& nontrivial) {
    return tarjan(successors(mm, {}), within, nontrivial);
}

StateSet on_cycle(const MarkovModel& mm, const StateSet& within) {
    std::vector<char> nontrivial;
    auto comp = scc_decompose(mm, within, nontrivial);
    StateSet r(mm.num_states(), 0);
    for (std::size_t s = 0; s < r.size(); ++s) r[s] = comp[s] >= 0 && nontrivial[comp[s]];
    return r;
}

std::vector<int> mec_decompose(const MarkovModel& mm, const std::vector<char>& allowed_in, int& count) {
    const std::size_t n = mm.num_states();
    std::vector<char> allowed = allowed_in.empty() ? std::vector<char>(mm.num_choices(), 1) : allowed_in;
    StateSet alive(n, 0);
    for (std::size_t s = 0; s < n; ++s)
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
            if (allowed[c]) alive[s] = 1;
    std::vector<int> comp;
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<char> nontrivial;
        comp = tarjan(successors(mm, allowed), alive, nontrivial);
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            bool any = false;
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c) {
                if (!allowed[c]) continue;
                for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e) {
                    std::uint32_t d = mm.edges[e].dst;
                    if (mm.edges[e].p > 0 && (!alive[d] || comp[d] != comp[s])) {
                        allowed[c] = 0;
                        changed = true;
                        break;
                    }
                }
                any = any || allowed[c];
            }
            if (!any) {
                alive[s] = 0;
                changed = true;
            }
        }
    }
    // Renumber the surviving components densely.
    std::vector<int> remap;
    std::vector<int> out(n, -1);
    count = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!alive[s]) continue;
        int c = comp[s];
        if (c >= static_cast<int>(remap.size())) remap.resize(c + 1, -1);
        if (remap[c] < 0) remap[c] = count++;
        out[s] = remap[c];
    }
    return out;
}

StateSet prob0(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, Opt opt) {
    if (opt == Opt::Max) return set_not(exists_until(mm, phi1, phi2));
    // Pmin = 0 unless every choice leads towards phi2 with positive probability.
    const std::size_t n = mm.num_states();
    StateSet r = phi2;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (r[s] || !phi1[s]) continue;
            bool all = mm.row[s] < mm.row[s + 1];
            for (auto c = mm.row[s]; c < mm.row[s + 1] && all; ++c) {
                bool hit = false;
                for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                    if (mm.edges[e].p > 0 && r[mm.edges[e].dst]) hit = true;
                all = hit;
            }
            if (all) {
                r[s] = 1;
                changed = true;
            }
        }
    }
    return set_not(r);
}

StateSet prob1(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, Opt opt) {
    const std::size_t n = mm.num_states();
    if (opt == Opt::Min) {
        StateSet zero = prob0(mm, phi1, phi2, Opt::Min);
        return set_not(exists_until(mm, set_and(phi1, set_not(phi2)), zero));
    }
    // Pmax = 1: nested fixpoint over choices staying in U and progressing towards phi2.
    StateSet u = set_all(n);
    for (;;) {
        StateSet r = phi2;
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t s = 0; s < n; ++s) {
                if (r[s] || !phi1[s] || !u[s]) continue;
                for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c) {
                    bool inside = true, progress = false;
                    for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e) {
                        if (mm.edges[e].p <= 0) continue;
                        inside = inside && u[mm.edges[e].dst];
                        progress = progress || r[mm.edges[e].dst];
                    }
                    if (inside && progress) {
                        r[s] = 1;
                        changed = true;
                        break;
                    }
                }
            }
        }
        if (r == u) return r;
        u = std::move(r);
    }
}

std::vector<double> prob_next(const MarkovModel& mm, const StateSet& phi, Opt opt) {
    std::vector<double> x(mm.num_states(), 0.0);
    for (std::size_t s = 0; s < x.size(); ++s) {
        double best = worst(opt);
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
            best = better(opt, best, choice_sum(mm, c, [&](std::uint32_t e) { return phi[mm.edges[e].dst] ? 1.0 : 0.0; }));
        x[s] = std::isinf(best) ? 0.0 : best;
    }
    return x;
}

std::vector<double> prob_until(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, Opt opt,
                               const ViOptions& vo, ViStats* stats) {
    const std::size_t n = mm.num_states();
    StateSet yes = prob1(mm, phi1, phi2, opt);
    StateSet no = prob0(mm, phi1, phi2, opt);
    std::vector<double> x(n, 0.0);
    std::vector<std::uint32_t> maybe;
    for (std::size_t s = 0; s < n; ++s) {
        if (yes[s])
            x[s] = 1.0;
        else if (!no[s])
            maybe.push_back(static_cast<std::uint32_t>(s));
    }
    ViStats st;
    while (!maybe.empty()) {
        if (st.iterations >= vo.max_iter) cap_reached(st);
        ++st.iterations;
        double delta = 0;
        for (std::uint32_t s : maybe) {
            double best = worst(opt);
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
                best = better(opt, best, choice_sum(mm, c, [&](std::uint32_t e) { return x[mm.edges[e].dst]; }));
            delta = std::max(delta, rel_change(x[s], best));
            x[s] = best;
        }
        st.residual = delta;
        if (delta < vo.tol) break;
    }
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
    if (stats) *stats = st;
    return x;
}

std::vector<double> prob_until_bounded(const MarkovModel& mm, const StateSet& phi1, const StateSet& phi2, long k,
                                       Opt opt) {
    const std::size_t n = mm.num_states();
    std::vector<double> x(n, 0.0), y(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) x[s] = phi2[s] ? 1.0 : 0.0;
    for (long i = 0; i < k; ++i) {
        for (std::size_t s = 0; s < n; ++s) {
            if (phi2[s]) {
                y[s] = 1.0;
            } else if (!phi1[s]) {
                y[s] = 0.0;
            } else {
                double best = worst(opt);
                for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
                    best = better(opt, best, choice_sum(mm, c, [&](std::uint32_t e) { return x[mm.edges[e].dst]; }));
                y[s] = std::isinf(best) ? 0.0 : best;
            }
        }
        x.swap(y);
    }
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
    return x;
}

std::vector<double> reward_reach(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, const StateSet& target, Opt opt,
                                 const ViOptions& vo, ViStats* stats) {
    const std::size_t n = mm.num_states();
    // Maximising rewards: infinite unless every adversary reaches; minimising: unless some adversary does.
    StateSet sure = prob1(mm, set_all(n), target, opt == Opt::Max ? Opt::Min : Opt::Max);
    std::vector<double> x(n, 0.0);
    std::vector<std::uint32_t> maybe;
    for (std::size_t s = 0; s < n; ++s) {
        if (target[s]) continue;
        if (!sure[s])
            x[s] = kInf;
        else
            maybe.push_back(static_cast<std::uint32_t>(s));
    }
    ViStats st;
    while (!maybe.empty()) {
        if (st.iterations >= vo.max_iter) cap_reached(st);
        ++st.iterations;
        double delta = 0;
        for (std::uint32_t s : maybe) {
            double best = worst(opt);
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
                best = better(opt, best,
                              choice_sum(mm, c, [&](std::uint32_t e) { return edge_r[e] + x[mm.edges[e].dst]; }));
            best += state_r[s];
            delta = std::max(delta, rel_change(x[s], best));
            x[s] = best;
        }
        st.residual = delta;
        if (delta < vo.tol) break;
    }
    if (stats) *stats = st;
    return x;
}

std::vector<double> reward_cumul(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, long k, Opt opt) {
    const std::size_t n = mm.num_states();
    std::vector<double> x(n, 0.0), y(n, 0.0);
    for (long i = 0; i < k; ++i) {
        for (std::size_t s = 0; s < n; ++s) {
            double best = worst(opt);
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
                best = better(opt, best,
                              choice_sum(mm, c, [&](std::uint32_t e) { return edge_r[e] + x[mm.edges[e].dst]; }));
            y[s] = state_r[s] + (std::isinf(best) ? 0.0 : best);
        }
        x.swap(y);
    }
    return x;
}

std::vector<double> reward_total(const MarkovModel& mm, const std::vector<double>& state_r,
                                 const std::vector<double>& edge_r, Opt opt, const ViOptions& vo, ViStats* stats) {
    const std::size_t n = mm.num_states();
    auto choice_zero = [&](std::uint32_t c) {
        for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
            if (edge_r[e] != 0) return false;
        return true;
    };
    if (opt == Opt::Min && mm.kind == ModelKind::Mdp) {
        // Reward stops accruing once a zero-reward end component is entered.
        std::vector<char> allowed(mm.num_choices(), 0);
        for (std::size_t s = 0; s < n; ++s)
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c) allowed[c] = state_r[s] == 0 && choice_zero(c);
        int count = 0;
        auto comp = mec_decompose(mm, allowed, count);
        StateSet target(n, 0);
        for (std::size_t s = 0; s < n; ++s) target[s] = comp[s] >= 0;
        return reward_reach(mm, state_r, edge_r, target, Opt::Min, vo, stats);
    }
    // Infinite where an end component carrying positive reward can be reached.
    int count = 0;
    auto comp = mec_decompose(mm, {}, count);
    std::vector<char> positive(count, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] < 0) continue;
        if (state_r[s] > 0) positive[comp[s]] = 1;
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c) {
            bool inside = true;
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e)
                if (mm.edges[e].p > 0 && comp[mm.edges[e].dst] != comp[s]) inside = false;
            if (inside && !choice_zero(c)) positive[comp[s]] = 1;
        }
    }
    StateSet bad(n, 0);
    for (std::size_t s = 0; s < n; ++s) bad[s] = comp[s] >= 0 && positive[comp[s]];
    StateSet inf = exists_until(mm, set_all(n), bad);
    std::vector<double> x(n, 0.0);
    std::vector<std::uint32_t> maybe;
    for (std::size_t s = 0; s < n; ++s) {
        if (inf[s])
            x[s] = kInf;
        else
            maybe.push_back(static_cast<std::uint32_t>(s));
    }
    ViStats st;
    while (!maybe.empty()) {
        if (st.iterations >= vo.max_iter) cap_reached(st);
        ++st.iterations;
        double delta = 0;
        for (std::uint32_t s : maybe) {
            double best = -kInf;
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
                best = std::max(best,
                                choice_sum(mm, c, [&](std::uint32_t e) { return edge_r[e] + x[mm.edges[e].dst]; }));
            best = state_r[s] + (std::isinf(best) ? 0.0 : best);
            delta = std::max(delta, rel_change(x[s], best));
            x[s] = best;
        }
        st.residual = delta;
        if (delta < vo.tol) break;
    }
    if (stats) *stats = st;
    return x;
}

}  // namespace rcprob
