#include "rcprob/check.h"

#include <chrono>
#include <cmath>

namespace rcprob {

namespace {

bool is_logical(const Expr& e) {
    return (e.kind == ExprKind::Unary && e.op == Op::Not) ||
           (e.kind == ExprKind::Binary && (e.op == Op::And || e.op == Op::Or || e.op == Op::Implies || e.op == Op::Iff));
}

/// A path formula proper: temporal operators at the top, possibly under boolean connectives.
bool is_path(const Expr& e) {
    if (e.kind == ExprKind::Temporal) return true;
    if (!is_logical(e)) return false;
    for (const auto& c : e.children)
        if (is_path(*c)) return true;
    return false;
}

bool is_temporal(const Expr& e, Op op) { return e.kind == ExprKind::Temporal && e.op == op && !e.bound; }

/// Matches G F x (returns x) or F G x.
const Expr* match2(const Expr& e, Op outer, Op inner) {
    if (!is_temporal(e, outer)) return nullptr;
    const Expr& in = *e.children[0];
    if (!is_temporal(in, inner) || is_path(*in.children[0])) return nullptr;
    return in.children[0].get();
}

[[noreturn]] void unsupported_ae(const Expr& e) {
    throw Error("UNSUPPORTED",
                "path formula outside the Forall/Exists fragment (X, U, F, G, W, R over state formulas, "
                "G F, F G, G F => G F, F G => G F, G (state => path)): " +
                    to_text(e),
                e.pos);
}

}  // namespace

bool has_operator(const Expr& e, const SpecAst* spec) {
    switch (e.kind) {
        case ExprKind::Prob:
        case ExprKind::Reward:
        case ExprKind::Forall:
        case ExprKind::Exists: return true;
        case ExprKind::LabelRef:
            if (spec)
                if (const auto* l = spec->find<LabelDecl>(e.name.segments[0])) return has_operator(*l->body, spec);
            return false;
        case ExprKind::FormulaRef:
            if (spec)
                if (const auto* f = spec->find<FormulaDecl>(e.name.segments[0])) return has_operator(*f->body, spec);
            return false;
        default:
            for (const auto& c : e.children)
                if (c && has_operator(*c, spec)) return true;
            return false;
    }
}

bool has_nondeterminism(const MarkovModel& mm) {
    for (std::size_t s = 0; s < mm.num_states(); ++s)
        if (mm.row[s + 1] - mm.row[s] > 1) return true;
    return false;
}

PropertyChecker::PropertyChecker(const MarkovModel& mm, CheckOptions opts) : mm_(mm), opts_(opts) {}

StateSet PropertyChecker::atom(const Expr& e) {
    Compiler comp(*mm_.closed);
    CExpr c = comp.spec_expr(e);
    StateSet r(mm_.num_states(), 0);
    for (std::size_t s = 0; s < r.size(); ++s) r[s] = eval(c, mm_.env(s)).truthy();
    return r;
}

StateSet PropertyChecker::sat(const Expr& e) {
    const SpecAst* spec = mm_.closed ? mm_.closed->spec.get() : nullptr;
    if (!has_operator(e, spec)) {
        if (is_path(e)) throw Error("TYPE", "path formula used as a state formula: " + to_text(e), e.pos);
        return atom(e);
    }
    switch (e.kind) {
        case ExprKind::Forall: return forall(*e.children[0]);
        case ExprKind::Exists: return exists(*e.children[0]);
        case ExprKind::Prob:
        case ExprKind::Reward: {
            if (!e.bound) throw Error("TYPE", "a query cannot be used as a state formula: " + to_text(e), e.pos);
            const Op cmp = e.bound->cmp;
            Opt opt = (cmp == Op::Lt || cmp == Op::Le) ? Opt::Max : Opt::Min;
            auto v = quantity(e, opt);
            double b = Compiler(*mm_.closed).eval_const(*e.bound->value).to_double();
            StateSet r(v.size(), 0);
            for (std::size_t s = 0; s < v.size(); ++s) {
                switch (cmp) {
                    case Op::Lt: r[s] = v[s] < b; break;
                    case Op::Le: r[s] = v[s] <= b; break;
                    case Op::Gt: r[s] = v[s] > b; break;
                    default: r[s] = v[s] >= b; break;
                }
            }
            return r;
        }
        case ExprKind::LabelRef: return sat(*spec->find<LabelDecl>(e.name.segments[0])->body);
        case ExprKind::FormulaRef: return sat(*spec->find<FormulaDecl>(e.name.segments[0])->body);
        case ExprKind::Unary:
            if (e.op == Op::Not) return set_not(sat(*e.children[0]));
            break;
        case ExprKind::Binary: {
            if (!is_logical(e)) break;
            StateSet a = sat(*e.children[0]), b = sat(*e.children[1]);
            switch (e.op) {
                case Op::And: return set_and(a, b);
                case Op::Or: return set_or(a, b);
                case Op::Implies: return set_or(set_not(a), b);
                default: {
                    StateSet r(a.size());
                    for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] != 0) == (b[i] != 0);
                    return r;
                }
            }
        }
        case ExprKind::Ite: {
            StateSet c = sat(*e.children[0]), a = sat(*e.children[1]), b = sat(*e.children[2]);
            StateSet r(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i] ? a[i] : b[i];
            return r;
        }
        default: break;
    }
    throw Error("UNSUPPORTED", "probabilistic operators inside arithmetic are not supported: " + to_text(e), e.pos);
}

long PropertyChecker::step_bound(const Expr& t) {
    if (!t.bound) return -1;
    Value v = Compiler(*mm_.closed).eval_const(*t.bound->value);
    if (!v.r.is_integer()) throw Error("TYPE", "step bound must be an integer", t.pos);
    long k = static_cast<long>(v.r.num());
    switch (t.bound->cmp) {
        case Op::Le: break;
        case Op::Lt: --k; break;
        default: throw Error("UNSUPPORTED", "only upper step bounds (<, <=) are supported", t.pos);
    }
    if (k < 0) throw Error("TYPE", "step bound must be non-negative", t.pos);
    return k;
}

StateSet PropertyChecker::state_operand(const Expr& e) {
    if (is_path(e))
        throw Error("UNSUPPORTED", "nested temporal operators are not supported here: " + to_text(e), e.pos);
    return sat(e);
}

std::vector<double> PropertyChecker::path_prob(const Expr& e, Opt opt) {
    const std::size_t n = mm_.num_states();
    if (!is_path(e)) {
        StateSet s = sat(e);
        return std::vector<double>(s.begin(), s.end());
    }
    numeric_ = true;
    if (e.kind == ExprKind::Unary) {
        auto v = path_prob(*e.children[0], flip(opt));
        for (auto& x : v) x = 1.0 - x;
        return v;
    }
    if (e.kind != ExprKind::Temporal)
        throw Error("UNSUPPORTED", "boolean combinations of path formulas are not supported under Prob: " + to_text(e),
                    e.pos);
    const long k = step_bound(e);
    auto until = [&](const StateSet& a, const StateSet& b, Opt o) {
        if (k >= 0) return prob_until_bounded(mm_, a, b, k, o);
        ViStats st;
        auto v = prob_until(mm_, a, b, o, opts_.vi, &st);
        iterations_ += st.iterations;
        return v;
    };
    auto complement = [](std::vector<double> v) {
        for (auto& x : v) x = 1.0 - x;
        return v;
    };
    const StateSet all = set_all(n);
    switch (e.op) {
        case Op::Next: return prob_next(mm_, state_operand(*e.children[0]), opt);
        case Op::Finally: return until(all, state_operand(*e.children[0]), opt);
        case Op::Globally: return complement(until(all, set_not(state_operand(*e.children[0])), flip(opt)));
        case Op::Until: return until(state_operand(*e.children[0]), state_operand(*e.children[1]), opt);
        case Op::WeakUntil: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            return complement(until(set_not(b), set_and(set_not(a), set_not(b)), flip(opt)));
        }
        case Op::Release: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            return complement(until(set_not(a), set_not(b), flip(opt)));
        }
        default: break;
    }
    throw Error("UNSUPPORTED", "unknown temporal operator", e.pos);
}

std::vector<double> PropertyChecker::quantity(const Expr& node, Opt opt) {
    if (node.kind == ExprKind::Prob) return path_prob(*node.children[0], opt);
    if (node.kind == ExprKind::Reward) return reward(node, opt);
    throw Error("TYPE", "not a Prob or Reward operator", node.pos);
}

std::vector<double> PropertyChecker::reward(const Expr& node, Opt opt) {
    numeric_ = true;
    const RewardStructure* rs = nullptr;
    if (!node.name.empty())
        rs = mm_.find_rewards(node.name.segments[0]);
    else if (mm_.rewards.size() == 1)
        rs = &mm_.rewards[0];
    if (!rs) throw Error("SCOPE", "reward structure '" + node.name.str() + "' is not attached", node.pos);
    const Expr& rp = *node.children[0];
    ViStats st;
    std::vector<double> v;
    switch (rp.op) {
        case Op::Reachable: v = reward_reach(mm_, rs->state, rs->edge, state_operand(*rp.children[0]), opt, opts_.vi, &st); break;
        case Op::Ltl: {
            const Expr& f = *rp.children[0];
            if (!is_temporal(f, Op::Finally))
                throw Error("UNSUPPORTED", "LTL rewards support only a plain Finally formula: " + to_text(f), f.pos);
            v = reward_reach(mm_, rs->state, rs->edge, state_operand(*f.children[0]), opt, opts_.vi, &st);
            break;
        }
        case Op::Cumul: {
            Value k = Compiler(*mm_.closed).eval_const(*rp.children[0]);
            if (!k.r.is_integer() || k.r < Rational(0)) throw Error("TYPE", "Cumul needs a non-negative integer", rp.pos);
            v = reward_cumul(mm_, rs->state, rs->edge, static_cast<long>(k.r.num()), opt);
            break;
        }
        default: v = reward_total(mm_, rs->state, rs->edge, opt, opts_.vi, &st); break;
    }
    iterations_ += st.iterations;
    return v;
}

StateSet PropertyChecker::egf(const StateSet& phi) {
    const std::size_t n = mm_.num_states();
    std::vector<char> nontrivial;
    auto comp = scc_decompose(mm_, set_all(n), nontrivial);
    std::vector<char> hit(nontrivial.size(), 0);
    for (std::size_t s = 0; s < n; ++s)
        if (phi[s] && nontrivial[comp[s]]) hit[comp[s]] = 1;
    StateSet cyc(n, 0);
    for (std::size_t s = 0; s < n; ++s) cyc[s] = hit[comp[s]];
    return exists_until(mm_, set_all(n), cyc);
}

StateSet PropertyChecker::efg(const StateSet& phi) {
    return exists_until(mm_, set_all(mm_.num_states()), exists_globally(mm_, phi));
}

StateSet PropertyChecker::exists(const Expr& e) {
    const std::size_t n = mm_.num_states();
    if (!is_path(e)) return sat(e);
    if (const Expr* x = match2(e, Op::Globally, Op::Finally)) return egf(sat(*x));
    if (const Expr* x = match2(e, Op::Finally, Op::Globally)) return efg(sat(*x));
    if (e.kind == ExprKind::Unary) return set_not(forall(*e.children[0]));
    if (e.kind == ExprKind::Binary) {
        const Expr& a = *e.children[0];
        const Expr& b = *e.children[1];
        if (e.op == Op::Or) return set_or(exists(a), exists(b));
        if (e.op == Op::Implies) {
            if (!is_path(a)) return set_or(set_not(sat(a)), exists(b));
            const Expr* p = match2(a, Op::Globally, Op::Finally);
            const Expr* p2 = match2(a, Op::Finally, Op::Globally);
            if (match2(b, Op::Globally, Op::Finally) && (p || p2)) {
                // E[GF p => GF q] = E[FG !p] or E[GF q];  E[FG p => GF q] = E[GF !p] or E[GF q].
                StateSet lhs = p ? efg(set_not(sat(*p))) : egf(set_not(sat(*p2)));
                return set_or(lhs, exists(b));
            }
        }
        if (e.op == Op::And && !is_path(a)) return set_and(sat(a), exists(b));
        if (e.op == Op::And && !is_path(b)) return set_and(exists(a), sat(b));
        unsupported_ae(e);
    }
    if (e.kind != ExprKind::Temporal) unsupported_ae(e);
    const long k = step_bound(e);
    const StateSet all = set_all(n);
    switch (e.op) {
        case Op::Next: return exists_next(mm_, state_operand(*e.children[0]));
        case Op::Finally:
            if (k < 0 && is_path(*e.children[0])) return exists_until(mm_, all, exists(*e.children[0]));
            return exists_until(mm_, all, state_operand(*e.children[0]), k);
        case Op::Globally: return exists_globally(mm_, state_operand(*e.children[0]), k);
        case Op::Until:
            return exists_until(mm_, state_operand(*e.children[0]), state_operand(*e.children[1]), k);
        case Op::WeakUntil: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            return set_or(exists_until(mm_, a, b, k), exists_globally(mm_, a, k));
        }
        case Op::Release: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            return set_or(exists_until(mm_, b, set_and(a, b), k), exists_globally(mm_, b, k));
        }
        default: unsupported_ae(e);
    }
}

StateSet PropertyChecker::forall(const Expr& e) {
    const std::size_t n = mm_.num_states();
    if (!is_path(e)) return sat(e);
    const StateSet all = set_all(n);
    if (const Expr* x = match2(e, Op::Globally, Op::Finally)) return set_not(efg(set_not(sat(*x))));
    if (const Expr* x = match2(e, Op::Finally, Op::Globally)) return set_not(egf(set_not(sat(*x))));
    if (e.kind == ExprKind::Unary) return set_not(exists(*e.children[0]));
    if (e.kind == ExprKind::Binary) {
        const Expr& a = *e.children[0];
        const Expr& b = *e.children[1];
        if (e.op == Op::And) return set_and(forall(a), forall(b));
        if (e.op == Op::Implies) {
            if (!is_path(a)) return set_or(set_not(sat(a)), forall(b));
            const Expr* q = match2(b, Op::Globally, Op::Finally);
            if (const Expr* p = match2(a, Op::Globally, Op::Finally); p && q) {
                // Fails iff some reachable cycle avoids q entirely yet visits p.
                StateSet notq = set_not(sat(*q));
                StateSet pset = sat(*p);
                std::vector<char> nontrivial;
                auto comp = scc_decompose(mm_, notq, nontrivial);
                std::vector<char> hit(nontrivial.size(), 0);
                for (std::size_t s = 0; s < n; ++s)
                    if (comp[s] >= 0 && pset[s] && nontrivial[comp[s]]) hit[comp[s]] = 1;
                StateSet bad(n, 0);
                for (std::size_t s = 0; s < n; ++s) bad[s] = comp[s] >= 0 && hit[comp[s]];
                return set_not(exists_until(mm_, all, bad));
            }
            if (const Expr* p = match2(a, Op::Finally, Op::Globally); p && q) {
                // A[FG p => GF q] = not E[FG (p and not q)]
                StateSet inner = set_and(sat(*p), set_not(sat(*q)));
                return set_not(exists_until(mm_, all, exists_globally(mm_, inner)));
            }
        }
        if (e.op == Op::Or && !is_path(a)) return set_or(sat(a), forall(b));
        if (e.op == Op::Or && !is_path(b)) return set_or(forall(a), sat(b));
        unsupported_ae(e);
    }
    if (e.kind != ExprKind::Temporal) unsupported_ae(e);
    const long k = step_bound(e);
    switch (e.op) {
        case Op::Next: return set_not(exists_next(mm_, set_not(state_operand(*e.children[0]))));
        case Op::Finally: return set_not(exists_globally(mm_, set_not(state_operand(*e.children[0])), k));
        case Op::Globally:
            // A[G psi] = not EF(not A[psi]); psi may itself be a path formula when unbounded.
            if (k < 0 && is_path(*e.children[0])) return set_not(exists_until(mm_, all, set_not(forall(*e.children[0]))));
            return set_not(exists_until(mm_, all, set_not(state_operand(*e.children[0])), k));
        case Op::Until: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            StateSet nb = set_not(b);
            return set_not(set_or(exists_until(mm_, nb, set_and(set_not(a), nb), k), exists_globally(mm_, nb, k)));
        }
        case Op::WeakUntil: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            StateSet nb = set_not(b);
            return set_not(exists_until(mm_, nb, set_and(set_not(a), nb), k));
        }
        case Op::Release: {
            StateSet a = state_operand(*e.children[0]), b = state_operand(*e.children[1]);
            return set_not(exists_until(mm_, set_not(a), set_not(b), k));
        }
        default: unsupported_ae(e);
    }
}

namespace {

void collect_rewards(const Expr& e, const SpecAst* spec, std::vector<std::string>& out, int depth = 0) {
    if (depth > 64) return;
    if (e.kind == ExprKind::Reward) out.push_back(e.name.empty() ? std::string() : e.name.segments[0]);
    if (spec && e.kind == ExprKind::LabelRef)
        if (const auto* l = spec->find<LabelDecl>(e.name.segments[0])) collect_rewards(*l->body, spec, out, depth + 1);
    if (spec && e.kind == ExprKind::FormulaRef)
        if (const auto* f = spec->find<FormulaDecl>(e.name.segments[0])) collect_rewards(*f->body, spec, out, depth + 1);
    for (const auto& c : e.children)
        if (c) collect_rewards(*c, spec, out, depth + 1);
}

}  // namespace

void attach_property_rewards(MarkovModel& mm, const Expr& body) {
    const SpecAst* spec = mm.closed->spec.get();
    std::vector<std::string> names;
    collect_rewards(body, spec, names);
    for (const auto& n : names) {
        const RewardsDecl* decl = nullptr;
        if (spec && !n.empty()) {
            decl = spec->find<RewardsDecl>(n);
        } else if (spec) {
            auto all = spec->all<RewardsDecl>();
            if (all.size() == 1) decl = all[0];
        }
        if (!decl) throw Error("SCOPE", "unknown reward structure '" + n + "'");
        if (!mm.find_rewards(decl->name)) attach_rewards(mm, *decl);
    }
}

CheckResult check_property(MarkovModel& mm, const ProbProperty& p, const CheckOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    attach_property_rewards(mm, *p.body);
    CheckResult r;
    r.property = p.name;
    r.config = valuation_str(mm.closed->config);
    PropertyChecker pc(mm, opts);
    const Expr& b = *p.body;
    const bool mdp = mm.kind == ModelKind::Mdp;
    if ((b.kind == ExprKind::Prob || b.kind == ExprKind::Reward) && b.query) {
        r.kind = CheckResult::Kind::Value;
        Opt opt = Opt::Max;
        if (mdp && *b.query == QueryKind::Min) opt = Opt::Min;
        if (mdp && *b.query != QueryKind::Plain) r.mode = *b.query == QueryKind::Min ? "min" : "max";
        if (mdp && *b.query == QueryKind::Plain && has_nondeterminism(mm))
            throw Error("UNSUPPORTED", "the model is nondeterministic: use 'min =?' or 'max =?' in '" + p.name + "'");
        r.value = pc.quantity(b, opt)[mm.initial];
    } else {
        r.kind = CheckResult::Kind::Boolean;
        r.verdict = pc.sat(b)[mm.initial] != 0;
        if (mdp && (b.kind == ExprKind::Prob || b.kind == ExprKind::Reward) && b.bound)
            r.mode = (b.bound->cmp == Op::Lt || b.bound->cmp == Op::Le) ? "max" : "min";
    }
    r.engine = pc.used_numeric() ? "numeric" : "graph";
    r.iterations = pc.iterations();
    r.check_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace rcprob
