#include "rcprob/smc.h"

#include <chrono>
#include <cmath>

namespace rcprob {

namespace {

double param(const MarkovModel& mm, const ExprPtr& e) {
    return Compiler(*mm.closed).eval_const(*e).r.to_double();
}

std::size_t count_param(const MarkovModel& mm, const ExprPtr& e) {
    Value v = Compiler(*mm.closed).eval_const(*e);
    if (!v.r.is_integer() || v.r < Rational(1)) throw Error("SMC", "sample counts must be positive integers", e->pos);
    return static_cast<std::size_t>(v.r.num());
}

int given(std::initializer_list<bool> flags) {
    int k = 0;
    for (bool f : flags) k += f;
    return k;
}

void check_level(double x, const char* what) {
    if (!(x > 0 && x < 1)) throw Error("SMC", std::string(what) + " must lie strictly between 0 and 1");
}

}  // namespace

const char* to_string(SimPath::End e) {
    switch (e) {
        case SimPath::End::Decided: return "bound-hit";
        case SimPath::End::Absorbing: return "absorbing";
        case SimPath::End::Cap: return "pathlen-cap";
    }
    return "?";
}

PathSpec make_path_spec(const MarkovModel& mm, PropertyChecker& pc, const Expr& node) {
    PathSpec ps;
    const Expr& f = *node.children[0];
    const std::size_t n = mm.num_states();
    if (node.kind == ExprKind::Reward) {
        if (!node.name.empty())
            ps.rewards = mm.find_rewards(node.name.segments[0]);
        else if (mm.rewards.size() == 1)
            ps.rewards = &mm.rewards[0];
        if (!ps.rewards) throw Error("SCOPE", "reward structure '" + node.name.str() + "' is not attached", node.pos);
        if (f.op == Op::Cumul) {
            Value k = Compiler(*mm.closed).eval_const(*f.children[0]);
            if (!k.r.is_integer() || k.r < Rational(0)) throw Error("TYPE", "Cumul needs a non-negative integer", f.pos);
            ps.kind = PathSpec::Kind::Cumul;
            ps.bound = static_cast<long>(k.r.num());
            return ps;
        }
        const Expr* target = nullptr;
        if (f.op == Op::Reachable) target = f.children[0].get();
        if (f.op == Op::Ltl && f.children[0]->kind == ExprKind::Temporal && f.children[0]->op == Op::Finally &&
            !f.children[0]->bound)
            target = f.children[0]->children[0].get();
        if (!target) throw Error("UNSUPPORTED", "simulation supports Cumul and Reachable rewards only", f.pos);
        ps.kind = PathSpec::Kind::Reach;
        ps.rhs = pc.state_operand(*target);
        return ps;
    }
    if (f.kind != ExprKind::Temporal)
        throw Error("UNSUPPORTED", "simulation needs a single temporal operator: " + to_text(f), f.pos);
    ps.bound = pc.step_bound(f);
    switch (f.op) {
        case Op::Next:
            ps.kind = PathSpec::Kind::Next;
            ps.rhs = pc.state_operand(*f.children[0]);
            break;
        case Op::Finally:
            ps.kind = PathSpec::Kind::Until;
            ps.lhs = set_all(n);
            ps.rhs = pc.state_operand(*f.children[0]);
            break;
        case Op::Globally:
            ps.kind = PathSpec::Kind::Globally;
            ps.rhs = pc.state_operand(*f.children[0]);
            break;
        case Op::Until:
        case Op::WeakUntil:
        case Op::Release:
            ps.kind = f.op == Op::Until ? PathSpec::Kind::Until
                      : f.op == Op::WeakUntil ? PathSpec::Kind::WeakUntil
                                              : PathSpec::Kind::Release;
            ps.lhs = pc.state_operand(*f.children[0]);
            ps.rhs = pc.state_operand(*f.children[1]);
            break;
        default: throw Error("UNSUPPORTED", "unknown temporal operator", f.pos);
    }
    return ps;
}

Simulator::Simulator(const MarkovModel& mm, PathSpec spec, std::uint64_t seed, long pathlen)
    : mm_(mm), spec_(std::move(spec)), seed_(seed), pathlen_(pathlen) {
    if (mm.kind != ModelKind::Dtmc)
        throw Error("UNSUPPORTED", "simulation needs a dtmc; rebuild the model with kind=dtmc (uniform resolution)");
    if (pathlen < 1) throw Error("SMC", "pathlen must be at least 1");
    absorbing_.assign(mm.num_states(), 0);
    for (std::size_t s = 0; s < mm.num_states(); ++s) {
        const Choice& c = mm.choices[mm.row[s]];
        bool self = true;
        for (auto e = c.edge_begin; e < c.edge_end; ++e) self = self && mm.edges[e].dst == s;
        absorbing_[s] = self;
    }
}

double Simulator::sample(std::uint64_t index, SimPath* trace) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                     static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(sq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    using K = PathSpec::Kind;
    const auto& sr = spec_.rewards ? spec_.rewards->state : std::vector<double>{};
    const auto& er = spec_.rewards ? spec_.rewards->edge : std::vector<double>{};

    std::uint32_t s = mm_.initial;
    double acc = 0;
    if (trace) trace->steps.clear();
    auto done = [&](double v, SimPath::End end) {
        if (end == SimPath::End::Cap) ++capped_;
        if (trace) {
            trace->steps.push_back({s, -1});
            trace->end = end;
            trace->sample = v;
        }
        return v;
    };
    for (long step = 0;; ++step) {
        const bool hit = spec_.bound >= 0 && step == spec_.bound;
        const bool absorbed = absorbing_[s] != 0;
        switch (spec_.kind) {
            case K::Next:
                if (step == 1) return done(spec_.rhs[s], SimPath::End::Decided);
                break;
            case K::Until:
                if (spec_.rhs[s]) return done(1, SimPath::End::Decided);
                if (!spec_.lhs[s] || hit) return done(0, SimPath::End::Decided);
                if (absorbed) return done(0, SimPath::End::Absorbing);
                break;
            case K::WeakUntil:
                if (spec_.rhs[s]) return done(1, SimPath::End::Decided);
                if (!spec_.lhs[s]) return done(0, SimPath::End::Decided);
                if (hit) return done(1, SimPath::End::Decided);
                if (absorbed) return done(1, SimPath::End::Absorbing);
                break;
            case K::Release:
                if (!spec_.rhs[s]) return done(0, SimPath::End::Decided);
                if (spec_.lhs[s] || hit) return done(1, SimPath::End::Decided);
                if (absorbed) return done(1, SimPath::End::Absorbing);
                break;
            case K::Globally:
                if (!spec_.rhs[s]) return done(0, SimPath::End::Decided);
                if (hit) return done(1, SimPath::End::Decided);
                if (absorbed) return done(1, SimPath::End::Absorbing);
                break;
            case K::Cumul:
                if (hit) return done(acc, SimPath::End::Decided);
                if (absorbed) {
                    const Choice& c = mm_.choices[mm_.row[s]];
                    double per = sr[s];
                    for (auto e = c.edge_begin; e < c.edge_end; ++e) per += mm_.edges[e].p * er[e];
                    return done(acc + per * static_cast<double>(spec_.bound - step), SimPath::End::Absorbing);
                }
                break;
            case K::Reach:
                if (spec_.rhs[s]) return done(acc, SimPath::End::Decided);
                if (absorbed) return done(kInf, SimPath::End::Absorbing);
                break;
        }
        if (step + 1 >= pathlen_) {
            // Undecided: reachability-like formulas count as false, invariance-like ones as true.
            double v = 0;
            if (spec_.kind == K::Globally || spec_.kind == K::WeakUntil || spec_.kind == K::Release) v = 1;
            if (spec_.is_reward()) v = acc;
            return done(v, SimPath::End::Cap);
        }
        const Choice& c = mm_.choices[mm_.row[s]];
        double u = unif(rng), cum = 0;
        auto pick = c.edge_end - 1;
        for (auto e = c.edge_begin; e < c.edge_end; ++e) {
            cum += mm_.edges[e].p;
            if (u < cum) {
                pick = e;
                break;
            }
        }
        if (spec_.rewards) acc += sr[s] + er[pick];
        if (trace) trace->steps.push_back({s, mm_.edges[pick].tags});
        s = mm_.edges[pick].dst;
    }
}

double normal_quantile(double p) {
    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    if (p <= 0) return -kInf;
    if (p >= 1) return kInf;
    const double lo = 0.02425, hi = 1 - lo;
    if (p < lo) {
        double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > hi) return -normal_quantile(1 - p);
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

namespace {

// Finite trigonometric series for the t cdf with whole degrees of freedom.
double t_cdf(double t, long dof) {
    const double th = std::atan(t / std::sqrt(static_cast<double>(dof)));
    const double c2 = std::cos(th) * std::cos(th), s = std::sin(th);
    double sum = 0, term = 1;
    if (dof % 2 == 1) {
        for (long k = 3; k <= dof; k += 2) {
            if (k > 3) term *= c2 * static_cast<double>(k - 3) / static_cast<double>(k - 2);
            sum += term;
        }
        double a = (th + (dof > 1 ? s * std::cos(th) * sum : 0)) * 2 / M_PI;
        return 0.5 + a / 2;
    }
    for (long k = 2; k <= dof; k += 2) {
        if (k > 2) term *= c2 * static_cast<double>(k - 3) / static_cast<double>(k - 2);
        sum += term;
    }
    return 0.5 + s * sum / 2;
}

}  // namespace

double student_t_quantile(double p, double dof) {
    if (p <= 0) return -kInf;
    if (p >= 1) return kInf;
    if (p < 0.5) return -student_t_quantile(1 - p, dof);
    if (dof == 1) return std::tan(M_PI * (p - 0.5));
    if (dof == 2) {
        double a = 4 * p * (1 - p);
        return 2 * (p - 0.5) * std::sqrt(2 / a);
    }
    // Cornish-Fisher expansion around the normal quantile.
    double z = normal_quantile(p), z2 = z * z;
    double g1 = (z2 + 1) * z / 4;
    double g2 = ((5 * z2 + 16) * z2 + 3) * z / 96;
    double g3 = (((3 * z2 + 19) * z2 + 17) * z2 - 15) * z / 384;
    double g4 = ((((79 * z2 + 776) * z2 + 1482) * z2 - 1920) * z2 - 945) * z / 92160;
    double t = z + g1 / dof + g2 / (dof * dof) + g3 / (dof * dof * dof) + g4 / (dof * dof * dof * dof);
    if (dof != std::floor(dof) || dof > 1e6) return t;
    // Polish with Newton steps on the exact cdf for whole degrees of freedom.
    const double logc = std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2) - 0.5 * std::log(dof * M_PI);
    for (int i = 0; i < 4; ++i) {
        double pdf = std::exp(logc - (dof + 1) / 2 * std::log1p(t * t / dof));
        t -= (t_cdf(t, static_cast<long>(dof)) - p) / pdf;
    }
    return t;
}

std::size_t apmc_samples(double epsilon, double delta) {
    check_level(delta, "delta");
    if (!(epsilon > 0)) throw Error("SMC", "epsilon must be positive");
    double n = std::log(2 / delta) / (2 * epsilon * epsilon);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n - 1e-9)));
}

double apmc_epsilon(std::size_t n, double delta) {
    check_level(delta, "delta");
    return std::sqrt(std::log(2 / delta) / (2 * static_cast<double>(n)));
}

double apmc_delta(std::size_t n, double epsilon) {
    return std::min(1.0, 2 * std::exp(-2 * static_cast<double>(n) * epsilon * epsilon));
}

namespace {

struct Moments {
    std::size_t n = 0;
    double mean = 0, m2 = 0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double sample_var() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0; }
};

// Half-width of the interval for `m` at level alpha.
double half_width(const Moments& m, double alpha, bool asymptotic, bool bernoulli) {
    const double nn = static_cast<double>(m.n);
    double var = (bernoulli && !asymptotic) ? m.mean * (1 - m.mean) : m.sample_var();
    double q = (asymptotic && m.n < 50 && m.n > 1) ? student_t_quantile(1 - alpha / 2, nn - 1)
                                                    : normal_quantile(1 - alpha / 2);
    return q * std::sqrt(std::max(0.0, var) / nn);
}

constexpr std::size_t kMinSequential = 30;
constexpr std::size_t kMaxSequential = 100'000'000;

}  // namespace

Estimate run_ci(Simulator& sim, std::optional<double> w, std::optional<double> alpha, std::optional<std::size_t> n,
                bool asymptotic) {
    if (given({w.has_value(), alpha.has_value(), n.has_value()}) != 2)
        throw Error("SMC", "CI needs exactly two of w, alpha and n");
    if (alpha) check_level(*alpha, "alpha");
    if (w && !(*w > 0)) throw Error("SMC", "w must be positive");
    Estimate est;
    est.method = asymptotic ? SimMethod::ACI : SimMethod::CI;
    const bool bern = !sim.is_reward();
    Moments m;
    if (n) {
        for (std::size_t i = 0; i < *n; ++i) m.add(sim.next());
    } else {
        // Sequential: stop once the running half-width is small enough.
        while (m.n < kMaxSequential) {
            m.add(sim.next());
            if (m.n >= kMinSequential && half_width(m, *alpha, asymptotic, bern) <= *w) break;
        }
    }
    est.estimate = m.mean;
    est.n = m.n;
    if (alpha) {
        est.alpha = *alpha;
        est.w = half_width(m, *alpha, asymptotic, bern);
    } else {
        // Solve the level from the requested width (normal approximation).
        est.w = *w;
        double var = bern && !asymptotic ? m.mean * (1 - m.mean) : m.sample_var();
        double se = std::sqrt(std::max(0.0, var) / static_cast<double>(m.n));
        est.alpha = se > 0 ? std::erfc(*w / se / std::sqrt(2.0)) : 0.0;
    }
    est.capped = sim.capped();
    return est;
}

Estimate run_apmc(Simulator& sim, std::optional<double> epsilon, std::optional<double> delta,
                  std::optional<std::size_t> n) {
    if (given({epsilon.has_value(), delta.has_value(), n.has_value()}) != 2)
        throw Error("SMC", "APMC needs exactly two of epsilon, delta and n");
    Estimate est;
    est.method = SimMethod::APMC;
    if (!n) n = apmc_samples(*epsilon, *delta);
    if (!epsilon) epsilon = apmc_epsilon(*n, *delta);
    if (!delta) delta = apmc_delta(*n, *epsilon);
    Moments m;
    for (std::size_t i = 0; i < *n; ++i) m.add(sim.next());
    est.estimate = m.mean;
    est.n = m.n;
    est.epsilon = *epsilon;
    est.delta = *delta;
    est.capped = sim.capped();
    return est;
}

Estimate run_sprt(Simulator& sim, double theta, double alpha, double delta) {
    check_level(alpha, "alpha");
    if (alpha >= 0.5) throw Error("SMC", "SPRT needs alpha below 0.5");
    const double p0 = theta + delta, p1 = theta - delta;
    if (!(delta > 0) || p1 <= 0 || p0 >= 1)
        throw Error("SMC", "SPRT threshold must lie at least delta away from 0 and 1");
    if (sim.is_reward()) throw Error("UNSUPPORTED", "SPRT applies to probabilities only");
    const double upper = std::log((1 - alpha) / alpha), lower = std::log(alpha / (1 - alpha));
    const double yes = std::log(p1 / p0), no = std::log((1 - p1) / (1 - p0));
    Estimate est;
    est.method = SimMethod::SPRT;
    est.alpha = alpha;
    est.delta = delta;
    double llr = 0, ones = 0;
    while (est.n < kMaxSequential) {
        double x = sim.next();
        ++est.n;
        ones += x;
        llr += x > 0.5 ? yes : no;
        if (llr >= upper) {
            est.decision = Estimate::Decision::AcceptH1;
            break;
        }
        if (llr <= lower) {
            est.decision = Estimate::Decision::AcceptH0;
            break;
        }
    }
    est.estimate = est.n ? ones / static_cast<double>(est.n) : 0;
    est.capped = sim.capped();
    return est;
}

CheckResult check_property_smc(MarkovModel& mm, const ProbProperty& p, const SmcOptions& opts, Estimate* out) {
    auto t0 = std::chrono::steady_clock::now();
    const Expr& b = *p.body;
    if (b.kind != ExprKind::Prob && b.kind != ExprKind::Reward)
        throw Error("UNSUPPORTED", "simulation checks a top-level Prob or Reward operator only ('" + p.name + "')");
    if (b.query && *b.query != QueryKind::Plain)
        throw Error("UNSUPPORTED", "min/max queries need the exact engine ('" + p.name + "')");
    attach_property_rewards(mm, b);
    PropertyChecker pc(mm, opts.exact);
    SimMethodSpec ms;
    if (b.sim) {
        ms = *b.sim;
    } else {
        ms.method = SimMethod::CI;
    }
    long pathlen = ms.pathlen ? static_cast<long>(param(mm, ms.pathlen)) : opts.pathlen;
    Simulator sim(mm, make_path_spec(mm, pc, b), opts.seed, pathlen);
    auto opt_d = [&](const ExprPtr& e) { return e ? std::optional<double>(param(mm, e)) : std::nullopt; };
    auto opt_n = [&](const ExprPtr& e) { return e ? std::optional<std::size_t>(count_param(mm, e)) : std::nullopt; };

    Estimate est;
    switch (ms.method) {
        case SimMethod::CI:
        case SimMethod::ACI: {
            auto w = opt_d(ms.w), alpha = opt_d(ms.alpha);
            auto n = opt_n(ms.n);
            if (!b.sim) alpha = 0.05, n = 1000;
            est = run_ci(sim, w, alpha, n, ms.method == SimMethod::ACI);
            break;
        }
        case SimMethod::APMC: est = run_apmc(sim, opt_d(ms.epsilon), opt_d(ms.delta), opt_n(ms.n)); break;
        case SimMethod::SPRT: {
            if (!b.bound) throw Error("SMC", "SPRT needs a probability bound, not a query ('" + p.name + "')");
            double alpha = ms.alpha ? param(mm, ms.alpha) : 0.01;
            double delta = ms.delta ? param(mm, ms.delta) : 0.01;
            est = run_sprt(sim, param(mm, b.bound->value), alpha, delta);
            break;
        }
    }
    est.seed = opts.seed;

    CheckResult r;
    r.property = p.name;
    r.config = valuation_str(mm.closed->config);
    r.engine = "smc";
    r.mode = "estimate";
    r.iterations = est.n;
    if (b.query) {
        r.kind = CheckResult::Kind::Value;
        r.value = est.estimate;
    } else {
        r.kind = CheckResult::Kind::Boolean;
        r.value = est.estimate;
        const Op cmp = b.bound->cmp;
        if (est.decision != Estimate::Decision::None) {
            // H0 says p lies above the threshold.
            bool above = est.decision == Estimate::Decision::AcceptH0;
            r.verdict = (cmp == Op::Gt || cmp == Op::Ge) ? above : !above;
        } else {
            double th = param(mm, b.bound->value), x = est.estimate;
            r.verdict = cmp == Op::Lt ? x < th : cmp == Op::Le ? x <= th : cmp == Op::Gt ? x > th : x >= th;
        }
    }
    r.check_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (out) *out = est;
    return r;
}

}  // namespace rcprob
