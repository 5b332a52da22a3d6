#include "rcprob/markov.h"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace rcprob {

std::string valuation_str(const Valuation& v) {
    std::string out;
    for (const auto& [name, val] : v) {
        if (!out.empty()) out += ", ";
        out += name + "=" + val.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constant sweeps

namespace {

/// Evaluates a configuration value: literals, arithmetic, and top-level spec constants.
Value config_value(const Expr& e, const Resolver& r, int depth = 0) {
    if (depth > 64) throw Error("EVAL", "constants are defined in terms of themselves", e.pos);
    switch (e.kind) {
        case ExprKind::BoolLit: return Value::boolean(e.bool_value);
        case ExprKind::NumLit:
            return e.number_is_int && e.number.is_integer() ? Value::integer(e.number.num()) : Value::real(e.number);
        case ExprKind::Unary: return apply_unary(e.op, config_value(*e.children[0], r, depth + 1));
        case ExprKind::Binary:
            return apply_binary(e.op, config_value(*e.children[0], r, depth + 1),
                                config_value(*e.children[1], r, depth + 1));
        case ExprKind::Ite:
            return config_value(*e.children[0], r, depth + 1).truthy() ? config_value(*e.children[1], r, depth + 1)
                                                                       : config_value(*e.children[2], r, depth + 1);
        case ExprKind::Name: {
            if (r.spec() && e.name.segments.size() == 1)
                if (const auto* c = r.spec()->find<ConstantDecl>(e.name.segments[0]))
                    return config_value(*c->value, r, depth + 1);
            auto ref = r.resolve(e.name, nullptr);
            if (ref && ref->kind == RefKind::EnumLiteral) return Value::enumeration(ref->index);
            throw Error("TYPE", "'" + e.name.str() + "' is not a constant value", e.pos);
        }
        default: throw Error("TYPE", "not a constant value: " + to_text(e), e.pos);
    }
}

}  // namespace

std::vector<Valuation> expand_sweep(const ConstantsConfig& cfg, const Resolver& r) {
    std::vector<std::pair<std::string, std::vector<Value>>> axes;
    for (const auto& entry : cfg.entries) {
        auto ref = r.resolve(entry.name, nullptr);
        if (!ref || ref->kind != RefKind::Constant)
            throw Error("SCOPE", "'" + entry.name.str() + "' is not a model constant", entry.name.pos);
        const TypeRef& type = r.index().consts()[ref->index].type;
        std::string what = "constant '" + pretty(*ref) + "'";
        std::vector<Value> vals;
        const ValueSpec& vs = entry.spec;
        if (vs.kind == ValueSpec::Kind::Range) {
            Rational lo = config_value(*vs.lo, r).r, hi = config_value(*vs.hi, r).r;
            Rational step = vs.step ? config_value(*vs.step, r).r : Rational(1);
            if (step <= Rational(0)) throw Error("TYPE", "range step must be positive", vs.pos);
            for (Rational v = lo; v <= hi; v += step) vals.push_back(coerce(Value::real(v), type, what));
        } else {
            for (const auto& x : vs.values) vals.push_back(coerce(config_value(*x, r), type, what));
        }
        if (vals.empty()) throw Error("TYPE", "empty set of values for " + what, vs.pos);
        axes.emplace_back(pretty(*ref), std::move(vals));
    }
    std::vector<Valuation> out(1);
    for (const auto& [name, vals] : axes) {
        std::vector<Valuation> next;
        for (const auto& prefix : out)
            for (const auto& v : vals) {
                Valuation x = prefix;
                x.emplace_back(name, v);
                next.push_back(std::move(x));
            }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Instantiation

std::shared_ptr<const ClosedModel> instantiate(std::shared_ptr<const ModelAst> model,
                                               std::shared_ptr<const SpecAst> spec, const Valuation& config,
                                               const DefinitionsDecl* defs, const PModulesDecl* env, ModelKind kind) {
    auto cm = std::make_shared<ClosedModel>();
    cm->model = model;
    cm->spec = spec;
    cm->config = config;
    if (defs) cm->defs = *defs;
    if (env) cm->modules = *env;
    cm->kind = kind;
    cm->resolver = std::make_unique<Resolver>(*model, spec.get());
    const ModelIndex& idx = cm->resolver->index();
    cm->const_values.resize(idx.consts().size());

    for (const auto& [name, value] : config) {
        QualifiedName qn;
        std::stringstream ss(name);
        for (std::string seg; std::getline(ss, seg, ':');)
            if (!seg.empty()) qn.segments.push_back(seg);
        auto ref = cm->resolver->resolve(qn, nullptr);
        if (!ref || ref->kind != RefKind::Constant) throw Error("SCOPE", "'" + name + "' is not a model constant");
        const ConstInfo& ci = idx.consts()[ref->index];
        if (ci.value) throw Error("SCOPE", "constant '" + ci.path + "' is not loose and cannot be configured");
        cm->const_values[ref->index] = coerce(value, ci.type, "constant '" + ci.path + "'");
    }
    for (std::size_t i = 0; i < idx.consts().size(); ++i)
        if (!idx.consts()[i].value && !cm->const_values[i])
            throw Error("SCOPE", "loose constant '" + idx.consts()[i].path + "' is not covered by the configuration");
    LooseSymbols loose = loose_symbols(*model);
    for (const auto& f : loose.functions)
        if (!defs || !defs->find_function(f)) throw Error("SCOPE", "loose function '" + f + "' has no definition");
    for (const auto& o : loose.operations)
        if (!defs || !defs->find_operation(o)) throw Error("SCOPE", "loose operation '" + o + "' has no definition");

    compile_program(*cm);

    // Non-loose constants are folded now so that reports can show them.
    Compiler comp(*cm);
    for (std::size_t i = 0; i < idx.consts().size(); ++i) {
        if (cm->const_values[i]) continue;
        const ConstInfo& ci = idx.consts()[i];
        EvalEnv env0{cm->program.get(), nullptr, false, false, nullptr};
        cm->const_values[i] = coerce(eval(comp.model_expr(*ci.value, ci.owner), env0), ci.type, "constant '" + ci.path + "'");
    }

    // Junction distributions that do not depend on the state are checked exactly here.
    for (const auto& mp : cm->program->machines) {
        for (const auto& n : mp.nodes) {
            if (n.kind != NodeKind::ProbJunction) continue;
            Rational sum(0);
            bool constant = true;
            for (int ti : n.outgoing) {
                const TransInfo& t = mp.trans[ti];
                if (!t.has_prob || t.has_guard) {
                    constant = false;
                    break;
                }
                EvalEnv env0{cm->program.get(), nullptr, false, false, nullptr};
                Rational p;
                try {
                    p = eval(t.prob, env0).r;
                } catch (const Error& e) {
                    if (e.code() != "EVAL") throw;
                    constant = false;
                    break;
                }
                if (p < Rational(0) || Rational(1) < p)
                    throw Error("PROBABILITY", "probability " + p.str() + " of transition '" + t.id + "' is outside [0,1]");
                sum += p;
            }
            if (constant && sum != Rational(1))
                throw Error("PROBABILITY", "probabilities leaving junction '" + mp.name + "::" + n.name + "' sum to " +
                                               sum.decimal_str() + ", not 1");
        }
    }
    return cm;
}

// ---------------------------------------------------------------------------
// Exploration

namespace {

using State = std::vector<std::int64_t>;
using Writes = std::vector<std::pair<int, std::int64_t>>;

struct Outcome {
    Rational p;
    Writes writes;
};

struct Comm {
    int set = -1;
    EventDir dir = EventDir::Out;
    std::optional<Value> value;  // Out with a value
    int input_slot = -1;         // In with a variable
};

/// One local alternative of a single machine.
struct Option {
    int machine = -1;
    std::string label;
    std::vector<Outcome> outs;
    std::optional<Comm> comm;
};

/// A global move: a distribution over write sets plus the event tags it carries.
struct Move {
    std::string label;
    std::vector<Outcome> outs;
    std::vector<int> tags;
};

Writes diff(const State& pre, const State& post) {
    Writes w;
    for (std::size_t i = 0; i < pre.size(); ++i)
        if (pre[i] != post[i]) w.emplace_back(static_cast<int>(i), post[i]);
    return w;
}

/// Joins two write sets; the same slot written with different values is a conflict.
Writes merge(const Writes& a, const Writes& b) {
    Writes out = a;
    for (const auto& [s, v] : b) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& x) { return x.first == s; });
        if (it == out.end()) {
            out.emplace_back(s, v);
        } else if (it->second != v) {
            throw Error("CONFLICT", "simultaneous writes of different values to one variable");
        }
    }
    return out;
}

std::vector<Outcome> product(const std::vector<Outcome>& a, const std::vector<Outcome>& b) {
    std::vector<Outcome> out;
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(Outcome{x.p * y.p, merge(x.writes, y.writes)});
    return out;
}

class Explorer {
   public:
    Explorer(const ClosedModel& cm, const BuildOptions& opts) : cm_(cm), P_(cm.prog()), opts_(opts) {}

    MarkovModel run(std::shared_ptr<const ClosedModel> closed);

   private:
    EvalEnv env(const State& s) const { return EvalEnv{&P_, s.data(), false, false, nullptr}; }

    void set(State& s, int slot, const Value& v) const { s[slot] = P_.encode(v, slot); }

    void exec(const CAction& a, State& local) const;
    void arrive(const MachineProgram& mp, int t, State& local) const;
    void body(const MachineProgram& mp, int t, State& local) const;
    void options(int m, const State& s, std::vector<Option>& out) const;
    std::vector<Move> moves(const State& s) const;
    bool stable(const State& s) const;

    std::uint32_t intern(const State& s);
    int intern_tags(std::vector<int> tags);

    const ClosedModel& cm_;
    const Program& P_;
    BuildOptions opts_;
    MarkovModel mm_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::map<std::vector<int>, int> tag_index_;
    std::map<std::string, int> action_index_;
    std::deque<std::uint32_t> queue_;
};

void Explorer::exec(const CAction& a, State& local) const {
    switch (a.k) {
        case CAction::K::Skip:
        case CAction::K::Comm: return;
        case CAction::K::Assign: set(local, a.slot, eval(a.value, env(local))); return;
        case CAction::K::Seq:
            for (const auto& k : a.kids) exec(k, local);
            return;
        case CAction::K::If:
            if (eval(a.value, env(local)).truthy())
                exec(a.kids[0], local);
            else if (a.kids.size() > 1)
                exec(a.kids[1], local);
            return;
        case CAction::K::Call: {
            std::vector<Value> frame;
            for (const auto& x : a.args) frame.push_back(eval(x, env(local)));
            for (const auto& [slot, value] : P_.operations[a.op].assigns) {
                EvalEnv e = env(local);
                e.frame = &frame;
                set(local, slot, eval(value, e));
            }
            return;
        }
    }
}

void Explorer::arrive(const MachineProgram& mp, int t, State& local) const {
    const TransInfo& ti = mp.trans[t];
    const NodeInfo& target = mp.nodes[ti.target];
    if (local[mp.lk_slot] == 0) local[mp.lk_slot] = t + 1;
    if (target.kind == NodeKind::ProbJunction) {
        local[mp.pc_slot] = ti.target;
    } else if (target.entering_point >= 0) {
        local[mp.pc_slot] = target.entering_point;
    } else {
        local[mp.pc_slot] = ti.target;
        local[mp.lk_slot] = 0;
    }
}

void Explorer::body(const MachineProgram& mp, int t, State& local) const {
    const TransInfo& ti = mp.trans[t];
    if (ti.atoms.empty()) return arrive(mp, t, local);
    if (local[mp.lk_slot] == 0) local[mp.lk_slot] = t + 1;
    local[mp.pc_slot] = ti.act_point;
}

bool Explorer::stable(const State& s) const {
    for (const auto& mp : P_.machines) {
        if (s[mp.lk_slot] != 0) return false;
        if (mp.exit_slot >= 0 && s[mp.exit_slot] != EXIT_NONE) return false;
        const PointRole& r = mp.roles[s[mp.pc_slot]];
        if (r.k != PointRole::K::Node || mp.nodes[r.owner].kind != NodeKind::State) return false;
    }
    return true;
}

/// Enabled local alternatives of machine `m`, in lexicographic transition-id order.
void Explorer::options(int m, const State& s, std::vector<Option>& out) const {
    const MachineProgram& mp = P_.machines[m];
    const std::int64_t pc = s[mp.pc_slot];
    const PointRole& role = mp.roles[pc];
    auto single = [&](State post, std::optional<Comm> comm, const std::string& label) {
        out.push_back(Option{m, label, {Outcome{Rational(1), diff(s, post)}}, std::move(comm)});
    };
    auto comm_of = [&](const CAction& a) {
        Comm c{a.event_set, a.dir, std::nullopt, a.slot};
        if (a.dir == EventDir::Out && a.has_value) c.value = eval(a.value, env(s));
        return c;
    };
    auto atom_step = [&](const CAction& a, State& post) -> std::optional<Comm> {
        if (a.k == CAction::K::Comm) return comm_of(a);
        exec(a, post);
        return std::nullopt;
    };

    if (s[mp.lk_slot] == 0 && (mp.exit_slot < 0 || s[mp.exit_slot] == EXIT_NONE) && role.k == PointRole::K::Node &&
        mp.nodes[role.owner].kind != NodeKind::ProbJunction) {
        const NodeInfo& src = mp.nodes[role.owner];
        for (int t : src.outgoing) {
            const TransInfo& ti = mp.trans[t];
            if (ti.has_guard && !eval(ti.guard, env(s)).truthy()) continue;
            std::optional<Comm> comm;
            if (ti.trigger) {
                const CTrigger& tr = *ti.trigger;
                comm = Comm{tr.event_set, tr.dir, std::nullopt, tr.input_slot};
                if (tr.has_output) comm->value = eval(tr.output, env(s));
            }
            State post = s;
            if (!src.exit.empty()) {
                post[mp.lk_slot] = t + 1;
                post[mp.exit_slot] = EXIT_SUB_ACT;
            } else {
                body(mp, t, post);
            }
            single(std::move(post), comm, mp.name + "." + ti.id);
        }
        return;
    }

    if (s[mp.lk_slot] == 0) return;  // quiescent at a junction without a lock cannot happen
    const int lk = static_cast<int>(s[mp.lk_slot]) - 1;
    State post = s;
    std::optional<Comm> comm;
    switch (role.k) {
        case PointRole::K::Node: {
            const NodeInfo& n = mp.nodes[role.owner];
            if (n.kind == NodeKind::ProbJunction) {
                Option o{m, mp.name, {}, std::nullopt};
                for (int t : n.outgoing) {
                    const TransInfo& ti = mp.trans[t];
                    if (ti.has_guard && !eval(ti.guard, env(s)).truthy()) continue;
                    Rational p = ti.has_prob ? eval(ti.prob, env(s)).r : Rational(1);
                    if (p < Rational(0) || Rational(1) < p)
                        throw Error("PROBABILITY", "probability " + p.str() + " of transition '" + ti.id +
                                                       "' is outside [0,1]");
                    if (p == Rational(0)) continue;
                    State b = s;
                    body(mp, t, b);
                    o.outs.push_back(Outcome{p, diff(s, b)});
                }
                if (!o.outs.empty()) out.push_back(std::move(o));
                return;
            }
            // Exit actions begin at the source state itself.
            if (mp.exit_slot < 0 || s[mp.exit_slot] != EXIT_SUB_ACT) return;
            comm = atom_step(n.exit[0], post);
            post[mp.pc_slot] = n.exit_point;
            if (n.exit.size() == 1) post[mp.exit_slot] = EXIT_SUB_EXITED;
            break;
        }
        case PointRole::K::Exit: {
            const NodeInfo& n = mp.nodes[role.owner];
            const std::size_t k = static_cast<std::size_t>(role.step);
            if (k < n.exit.size()) {
                comm = atom_step(n.exit[k], post);
                post[mp.pc_slot] = pc + 1;
                if (k + 1 == n.exit.size()) post[mp.exit_slot] = EXIT_SUB_EXITED;
            } else {
                post[mp.exit_slot] = EXIT_NONE;
                body(mp, lk, post);
            }
            break;
        }
        case PointRole::K::TAct: {
            const TransInfo& ti = mp.trans[role.owner];
            const std::size_t k = static_cast<std::size_t>(role.step);
            comm = atom_step(ti.atoms[k], post);
            if (k + 1 < ti.atoms.size())
                post[mp.pc_slot] = pc + 1;
            else
                arrive(mp, role.owner, post);
            break;
        }
        case PointRole::K::Entry: {
            const NodeInfo& n = mp.nodes[role.owner];
            const std::size_t k = static_cast<std::size_t>(role.step);
            comm = atom_step(n.entry[k], post);
            if (k + 1 < n.entry.size()) {
                post[mp.pc_slot] = pc + 1;
            } else {
                post[mp.pc_slot] = role.owner;
                post[mp.lk_slot] = 0;
            }
            break;
        }
    }
    single(std::move(post), comm, mp.name);
}

std::vector<Move> Explorer::moves(const State& s) const {
    std::vector<Option> opts;
    for (std::size_t m = 0; m < P_.machines.size(); ++m) options(static_cast<int>(m), s, opts);

    std::vector<Move> base;
    for (const auto& o : opts) {
        if (!o.comm) {
            base.push_back(Move{o.label, o.outs, {}});
            continue;
        }
        const Comm& c = *o.comm;
        const EventSet& es = P_.event_sets[c.set];
        if (es.open) {
            Move mv{o.label, o.outs, {make_tag(c.set, c.dir)}};
            if (c.dir == EventDir::In && c.input_slot >= 0)
                throw Error("UNSUPPORTED", "input on '" + es.name + "' needs a value but no component sends one");
            if (c.value && es.latch_slot >= 0) {
                Writes w{{es.latch_slot, P_.encode(*c.value, es.latch_slot)}};
                for (auto& out : mv.outs) out.writes = merge(out.writes, w);
            }
            base.push_back(std::move(mv));
            continue;
        }
        if (c.dir != EventDir::Out) continue;  // inputs on closed sets join an output below
        for (const auto& in : opts) {
            if (!in.comm || in.machine == o.machine || in.comm->set != c.set || in.comm->dir != EventDir::In) continue;
            Writes w;
            if (in.comm->input_slot >= 0) {
                if (!c.value) throw Error("UNSUPPORTED", "input on '" + es.name + "' receives no value");
                w.emplace_back(in.comm->input_slot, P_.encode(*c.value, in.comm->input_slot));
            }
            if (c.value && es.latch_slot >= 0) w.emplace_back(es.latch_slot, P_.encode(*c.value, es.latch_slot));
            Move mv{o.label + "|" + in.label, product(o.outs, in.outs),
                    {make_tag(c.set, EventDir::In), make_tag(c.set, EventDir::Out)}};
            for (auto& out : mv.outs) out.writes = merge(out.writes, w);
            base.push_back(std::move(mv));
        }
    }

    // Environment modules: synchronised commands join matching moves, unlabelled ones interleave.
    auto alts_of = [&](const PCommandProgram& cmd) {
        std::vector<Outcome> outs;
        for (const auto& a : cmd.alts) {
            Rational p = eval(a.prob, env(s)).r;
            if (p < Rational(0) || Rational(1) < p)
                throw Error("PROBABILITY", "probability " + p.str() + " of command '" + cmd.label + "' is outside [0,1]");
            if (p == Rational(0)) continue;
            Writes w;
            for (const auto& [slot, value] : a.updates) w.emplace_back(slot, P_.encode(eval(value, env(s)), slot));
            outs.push_back(Outcome{p, diff(s, [&] {
                                           State x = s;
                                           for (const auto& [k, v] : w) x[k] = v;
                                           return x;
                                       }())});
        }
        return outs;
    };
    std::vector<Move> result;
    for (auto& mv : base) {
        std::vector<Move> partial{mv};
        for (const auto& pm : P_.pmodules) {
            bool involved = std::any_of(mv.tags.begin(), mv.tags.end(), [&](int t) {
                return std::binary_search(pm.alphabet.begin(), pm.alphabet.end(), t);
            });
            if (!involved) continue;
            std::vector<Move> next;
            for (const auto& cmd : pm.commands) {
                if (!cmd.sync_tag || std::find(mv.tags.begin(), mv.tags.end(), *cmd.sync_tag) == mv.tags.end()) continue;
                if (!eval(cmd.guard, env(s)).truthy()) continue;
                auto outs = alts_of(cmd);
                for (const auto& p : partial) next.push_back(Move{p.label + "|" + cmd.label, product(p.outs, outs), p.tags});
            }
            partial = std::move(next);
        }
        for (auto& p : partial) result.push_back(std::move(p));
    }
    for (const auto& pm : P_.pmodules)
        for (const auto& cmd : pm.commands) {
            if (cmd.sync_tag || !eval(cmd.guard, env(s)).truthy()) continue;
            result.push_back(Move{cmd.label, alts_of(cmd), {}});
        }
    return result;
}

std::uint32_t Explorer::intern(const State& s) {
    std::string key(reinterpret_cast<const char*>(s.data()), s.size() * sizeof(std::int64_t));
    auto [it, fresh] = index_.emplace(std::move(key), static_cast<std::uint32_t>(index_.size()));
    if (fresh) {
        if (index_.size() > opts_.max_states)
            throw Error("STATE_CAP", "state space exceeds the cap of " + std::to_string(opts_.max_states) + " states");
        mm_.values.insert(mm_.values.end(), s.begin(), s.end());
        queue_.push_back(it->second);
    }
    return it->second;
}

int Explorer::intern_tags(std::vector<int> tags) {
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    auto [it, fresh] = tag_index_.emplace(tags, static_cast<int>(mm_.tag_sets.size()));
    if (fresh) mm_.tag_sets.push_back(tags);
    return it->second;
}

MarkovModel Explorer::run(std::shared_ptr<const ClosedModel> closed) {
    mm_.kind = cm_.kind;
    mm_.closed = closed;
    mm_.width = P_.slots.size();
    intern_tags({});
    auto action = [&](const std::string& a) {
        auto [it, fresh] = action_index_.emplace(a, static_cast<int>(mm_.actions.size()));
        if (fresh) mm_.actions.push_back(a);
        return it->second;
    };
    mm_.initial = intern(P_.initial);
    mm_.row.push_back(0);
    while (!queue_.empty()) {
        std::uint32_t src = queue_.front();
        queue_.pop_front();
        State s(mm_.state(src), mm_.state(src) + mm_.width);
        std::vector<Move> mv = moves(s);
        bool dead = false;
        if (mv.empty()) {
            dead = !stable(s);
            mv.push_back(Move{dead ? "deadlock" : "idle", {Outcome{Rational(1), {}}}, {}});
        }
        mm_.deadlock.push_back(dead ? 1 : 0);

        // Successor targets, merged per (destination, tags) within one distribution.
        auto emit = [&](const std::string& label, const std::vector<std::pair<Rational, const Move*>>& parts) {
            Choice ch;
            ch.action = action(label);
            ch.edge_begin = static_cast<std::uint32_t>(mm_.edges.size());
            for (const auto& [w, m] : parts) {
                for (const auto& o : m->outs) {
                    State post = s;
                    for (const auto& [k, v] : o.writes) post[k] = v;
                    std::uint32_t dst = intern(post);
                    int tags = intern_tags(m->tags);
                    Rational p = w * o.p;
                    auto it = std::find_if(mm_.edges.begin() + ch.edge_begin, mm_.edges.end(),
                                           [&](const Edge& e) { return e.dst == dst && e.tags == tags; });
                    if (it != mm_.edges.end())
                        it->prob += p;
                    else
                        mm_.edges.push_back(Edge{dst, p, 0.0, tags});
                }
            }
            ch.edge_end = static_cast<std::uint32_t>(mm_.edges.size());
            for (auto e = ch.edge_begin; e < ch.edge_end; ++e) mm_.edges[e].p = mm_.edges[e].prob.to_double();
            mm_.choices.push_back(ch);
        };
        if (mm_.kind == ModelKind::Mdp || mv.size() == 1) {
            for (const auto& m : mv) emit(m.label, {{Rational(1), &m}});
        } else {
            std::vector<std::pair<Rational, const Move*>> parts;
            Rational w(1, static_cast<std::int64_t>(mv.size()));
            for (const auto& m : mv) parts.emplace_back(w, &m);
            emit("mix", parts);
        }
        mm_.row.push_back(static_cast<std::uint32_t>(mm_.choices.size()));
    }
    if (auto bad = check_stochastic(mm_)) throw Error("PROBABILITY", *bad);
    return std::move(mm_);
}

}  // namespace

MarkovModel build_markov(std::shared_ptr<const ClosedModel> closed, const BuildOptions& opts) {
    Explorer ex(*closed, opts);
    return ex.run(closed);
}

std::optional<std::string> check_stochastic(const MarkovModel& mm) {
    for (std::size_t s = 0; s < mm.num_states(); ++s) {
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c) {
            Rational sum(0);
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e) sum += mm.edges[e].prob;
            if (sum != Rational(1))
                return "distribution '" + mm.actions[mm.choices[c].action] + "' of state " + std::to_string(s) +
                       " (" + mm.valuation(s) + ") sums to " + sum.str();
        }
    }
    return std::nullopt;
}

std::string MarkovModel::valuation(std::size_t s) const {
    if (!closed) return "#" + std::to_string(s);
    const Program& P = closed->prog();
    std::string out;
    const std::int64_t* st = state(s);
    for (std::size_t i = 0; i < width; ++i) {
        if (i) out += ", ";
        const Slot& sl = P.slots[i];
        std::string name = sl.kind == SlotKind::Var || sl.kind == SlotKind::ModVar || sl.kind == SlotKind::Latch
                               ? sl.name
                               : P.machines[sl.machine].name + "." + sl.name;
        out += name + "=" + P.show(st[i], static_cast<int>(i));
    }
    return out;
}

const RewardStructure* MarkovModel::find_rewards(const std::string& name) const {
    for (const auto& r : rewards)
        if (r.name == name) return &r;
    return nullptr;
}

void attach_rewards(MarkovModel& mm, const RewardsDecl& decl) {
    Compiler comp(*mm.closed);
    RewardStructure rs;
    rs.name = decl.name;
    rs.state.assign(mm.num_states(), 0.0);
    rs.edge.assign(mm.num_edges(), 0.0);
    for (const auto& item : decl.items) {
        CExpr guard = comp.spec_expr(*item.guard);
        CExpr value = comp.spec_expr(*item.value);
        std::optional<int> tag;
        if (item.event) tag = comp.event_tag(*item.event);
        for (std::size_t s = 0; s < mm.num_states(); ++s) {
            EvalEnv env = mm.env(s);
            if (!eval(guard, env).truthy()) continue;
            double v = eval(value, env).to_double();
            if (v < 0) throw Error("REWARD", "negative reward " + std::to_string(v) + " in reward structure '" + decl.name + "'", item.pos);
            if (!tag) {
                rs.state[s] += v;
                continue;
            }
            for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
                for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e) {
                    const auto& tags = mm.tag_sets[mm.edges[e].tags];
                    if (std::binary_search(tags.begin(), tags.end(), *tag)) rs.edge[e] += v;
                }
        }
    }
    for (auto& r : mm.rewards)
        if (r.name == rs.name) {
            r = std::move(rs);
            return;
        }
    mm.rewards.push_back(std::move(rs));
}

std::string export_explicit(const MarkovModel& mm) {
    std::ostringstream os;
    const Program& P = mm.closed->prog();
    os << "STATES " << mm.num_states() << "\n";
    os << "KIND " << (mm.kind == ModelKind::Dtmc ? "dtmc" : "mdp") << "\n";
    os << "INIT " << mm.initial << "\n";
    for (std::size_t s = 0; s < mm.num_states(); ++s) {
        os << "state " << s << " " << mm.valuation(s);
        if (s == mm.initial) os << " init";
        if (mm.deadlock[s]) os << " deadlock";
        os << "\n";
    }
    for (std::size_t s = 0; s < mm.num_states(); ++s)
        for (auto c = mm.row[s]; c < mm.row[s + 1]; ++c)
            for (auto e = mm.choices[c].edge_begin; e < mm.choices[c].edge_end; ++e) {
                const Edge& ed = mm.edges[e];
                os << s << " (" << mm.actions[mm.choices[c].action] << ") " << ed.prob.str() << " " << ed.dst << " [";
                const auto& tags = mm.tag_sets[ed.tags];
                for (std::size_t i = 0; i < tags.size(); ++i) os << (i ? "," : "") << P.tag_name(tags[i]);
                os << "]\n";
            }
    for (const auto& r : mm.rewards) {
        os << "REWARD " << r.name << "\n";
        for (std::size_t s = 0; s < r.state.size(); ++s)
            if (r.state[s] != 0) os << "state " << s << " " << r.state[s] << "\n";
        for (std::size_t e = 0; e < r.edge.size(); ++e)
            if (r.edge[e] != 0) os << "edge " << e << " " << r.edge[e] << "\n";
    }
    return os.str();
}

}  // namespace rcprob
