#include <algorithm>
#include <set>
#include <sstream>

#include "rcprob/prism.h"

namespace rcprob {

// ---------------------------------------------------------------------------
// Names

namespace {

const std::set<std::string>& prism_keywords() {
    static const std::set<std::string> k = {
        "A",       "bool",    "ceil",    "clock",     "const",   "ctmc",   "C",         "double", "dtmc",
        "E",       "endinit", "endinvariant", "endmodule", "endrewards", "endsystem", "false", "floor",
        "formula", "filter",  "func",    "F",         "global",  "G",      "init",      "invariant", "I",
        "int",     "label",   "log",     "max",       "mdp",     "min",    "mod",       "module", "X",
        "nondeterministic", "Pmax", "Pmin", "P", "pow", "probabilistic", "prob", "pta", "rate", "rewards",
        "Rmax",    "Rmin",    "R",       "S",         "stochastic", "system", "true", "U", "W"};
    return k;
}

std::string flatten(const std::string& qualified) {
    std::string out;
    for (std::size_t i = 0; i < qualified.size(); ++i) {
        char c = qualified[i];
        if (c == ':' && i + 1 < qualified.size() && qualified[i + 1] == ':') {
            out += '_';
            ++i;
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            out += c;
        } else {
            out += '_';
        }
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "_" + out;
    return out;
}

}  // namespace

std::string NameMap::mangle(const std::string& qualified, const std::string& kind) {
    if (auto it = by_qualified_.find(qualified); it != by_qualified_.end()) return it->second;
    const std::string base = flatten(qualified);
    std::string id = base;
    for (int k = 2; by_ident_.count(id) || prism_keywords().count(id); ++k) id = base + "_" + std::to_string(k);
    by_qualified_[qualified] = id;
    by_ident_[id] = qualified;
    rows_.push_back({id, qualified, kind});
    return id;
}

void NameMap::encoding(const std::string& ident, std::int64_t value, const std::string& qualified,
                       const std::string& kind) {
    rows_.push_back({ident + "=" + std::to_string(value), qualified, kind});
}

bool NameMap::bijective() const {
    std::set<std::string> l, r;
    for (const auto& row : rows_) {
        if (!l.insert(row.ident).second) return false;
        if (!r.insert(row.kind + "\t" + row.qualified).second) return false;
    }
    return true;
}

std::string NameMap::tsv() const {
    std::string out;
    for (const auto& r : rows_) out += r.ident + "\t" + r.qualified + "\t" + r.kind + "\n";
    return out;
}

SlotRanges slot_ranges(const MarkovModel& mm) {
    SlotRanges r(mm.width, {0, 0});
    for (std::size_t s = 0; s < mm.num_states(); ++s) {
        const std::int64_t* v = mm.state(s);
        for (std::size_t i = 0; i < mm.width; ++i) {
            if (s == 0 || v[i] < r[i].first) r[i].first = v[i];
            if (s == 0 || v[i] > r[i].second) r[i].second = v[i];
        }
    }
    return r;
}

void merge_ranges(SlotRanges& into, const SlotRanges& more) {
    if (into.empty()) {
        into = more;
        return;
    }
    for (std::size_t i = 0; i < into.size() && i < more.size(); ++i) {
        into[i].first = std::min(into[i].first, more[i].first);
        into[i].second = std::max(into[i].second, more[i].second);
    }
}

// ---------------------------------------------------------------------------
// Expressions

namespace {

std::string literal(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Bool: return v.truthy() ? "true" : "false";
        case Value::Kind::Int:
        case Value::Kind::Enum: return std::to_string(v.r.num());
        case Value::Kind::Real: {
            std::string s = v.r.decimal_str();
            return s.find('/') != std::string::npos || s[0] == '-' ? "(" + s + ")" : s;
        }
    }
    return "0";
}

const char* prism_op(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Eq: return "=";
        case Op::Neq: return "!=";
        case Op::Lt: return "<";
        case Op::Le: return "<=";
        case Op::Gt: return ">";
        case Op::Ge: return ">=";
        case Op::And: return "&";
        case Op::Or: return "|";
        case Op::Implies: return "=>";
        case Op::Iff: return "<=>";
        default: return "?";
    }
}

bool is_arith(Op op) { return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Mod; }

/// Renders compiled expressions as PRISM text, inlining function calls.
class Renderer {
   public:
    using Env = std::map<int, std::string>;  // slot -> value in terms of the pre-state

    Renderer(const ClosedModel& cm, NameMap& names) : cm_(cm), P_(cm.prog()), names_(names) {}

    std::string slot_name(int s) {
        const Slot& sl = P_.slots[s];
        return names_.mangle(sl.path, "slot");
    }
    std::string const_name(int c) {
        return names_.mangle(cm_.resolver->index().consts()[c].path, "const");
    }

    struct Frame {
        std::vector<std::string> text;
        std::vector<bool> integral;
    };

    std::string expr(const CExpr& e, const Env* env = nullptr, const Frame* f = nullptr, int depth = 0) {
        if (depth > 64) throw Error("UNSUPPORTED", "recursive functions cannot be inlined into PRISM");
        auto sub = [&](const CExpr& k) { return expr(k, env, f, depth); };
        switch (e.k) {
            case CExpr::K::Lit: return literal(e.lit);
            case CExpr::K::Const: return const_name(e.index);
            case CExpr::K::Slot:
                if (env)
                    if (auto it = env->find(e.index); it != env->end()) return "(" + it->second + ")";
                return slot_name(e.index);
            case CExpr::K::Param: return f->text.at(static_cast<std::size_t>(e.index));
            case CExpr::K::Unary:
                return e.op == Op::Not ? "!" + sub(e.kids[0]) : "(-" + sub(e.kids[0]) + ")";
            case CExpr::K::Binary: {
                std::string a = sub(e.kids[0]), b = sub(e.kids[1]);
                if (e.op == Op::Mod) return "mod(" + a + ", " + b + ")";
                if (e.op == Op::Div && integral(e.kids[0], f) && integral(e.kids[1], f)) {
                    std::string q = "(" + a + "/" + b + ")";
                    return "(" + q + ">=0 ? floor" + q + " : ceil" + q + ")";
                }
                return "(" + a + " " + prism_op(e.op) + " " + b + ")";
            }
            case CExpr::K::Ite: return "(" + sub(e.kids[0]) + " ? " + sub(e.kids[1]) + " : " + sub(e.kids[2]) + ")";
            case CExpr::K::Call: {
                Frame inner;
                for (const auto& k : e.kids) {
                    inner.text.push_back(sub(k));
                    inner.integral.push_back(integral(k, f));
                }
                return expr(P_.functions[e.index].body, env, &inner, depth + 1);
            }
            case CExpr::K::Deadlock: return "\"deadlock\"";
            case CExpr::K::Init: return "\"init\"";
        }
        return "?";
    }

    /// Whether `e` denotes an integer, which decides how `/` is rendered.
    bool integral(const CExpr& e, const Frame* f, int depth = 0) const {
        if (depth > 64) return false;
        switch (e.k) {
            case CExpr::K::Lit:
            case CExpr::K::Const: return e.lit.kind == Value::Kind::Int;
            case CExpr::K::Slot: {
                const Slot& s = P_.slots[e.index];
                if (s.kind != SlotKind::Var && s.kind != SlotKind::Latch) return true;
                return s.type.kind == TypeKind::Int || s.type.kind == TypeKind::Nat;
            }
            case CExpr::K::Param: return f && f->integral.at(static_cast<std::size_t>(e.index));
            case CExpr::K::Unary: return e.op == Op::Neg && integral(e.kids[0], f, depth);
            case CExpr::K::Binary:
                return is_arith(e.op) && integral(e.kids[0], f, depth) && integral(e.kids[1], f, depth);
            case CExpr::K::Ite: return integral(e.kids[1], f, depth) && integral(e.kids[2], f, depth);
            case CExpr::K::Call: {
                Frame inner;
                for (const auto& k : e.kids) {
                    inner.text.emplace_back();
                    inner.integral.push_back(integral(k, f, depth));
                }
                return integral(P_.functions[e.index].body, &inner, depth + 1);
            }
            default: return false;
        }
    }

    std::string current(int slot, const Env& env) {
        auto it = env.find(slot);
        return it != env.end() ? it->second : slot_name(slot);
    }

    /// Symbolic execution of an atomic action: accumulates the new value of every written slot.
    void exec(const CAction& a, Env& env) {
        switch (a.k) {
            case CAction::K::Skip:
            case CAction::K::Comm: return;
            case CAction::K::Assign: env[a.slot] = expr(a.value, &env); return;
            case CAction::K::Seq:
                for (const auto& k : a.kids) exec(k, env);
                return;
            case CAction::K::If: {
                std::string c = expr(a.value, &env);
                Env t = env, f = env;
                exec(a.kids[0], t);
                if (a.kids.size() > 1) exec(a.kids[1], f);
                std::set<int> slots;
                for (const auto& [s, v] : t) slots.insert(s);
                for (const auto& [s, v] : f) slots.insert(s);
                for (int s : slots) {
                    std::string tv = current(s, t), fv = current(s, f);
                    env[s] = tv == fv ? tv : "(" + c + " ? " + tv + " : " + fv + ")";
                }
                return;
            }
            case CAction::K::Call: {
                Frame fr;
                for (const auto& x : a.args) {
                    fr.text.push_back(expr(x, &env));
                    fr.integral.push_back(integral(x, nullptr));
                }
                // Each assignment sees the effect of the previous ones.
                for (const auto& [slot, value] : P_.operations[a.op].assigns) env[slot] = expr(value, &env, &fr);
                return;
            }
        }
    }

   private:
    const ClosedModel& cm_;
    const Program& P_;
    NameMap& names_;
};

// ---------------------------------------------------------------------------
// Model

struct Command {
    std::string action, guard;
    std::vector<std::pair<std::string, std::map<int, std::string>>> alts;  // probability, updates
};

class ModelEmitter {
   public:
    ModelEmitter(const EmitRequest& req, NameMap& names)
        : req_(req), cm_(*req.closed), P_(cm_.prog()), names_(names), R_(cm_, names) {}

    std::string run();

   private:
    using Env = Renderer::Env;

    std::string action_of(int set, EventDir dir, int sender) {
        const EventSet& es = P_.event_sets[set];
        std::string base = names_.mangle(es.name, "event");
        if (es.open) return base + (dir == EventDir::Out ? "_out" : "_in");
        return base + "_from_" + names_.mangle(P_.machines[sender].path, "machine");
    }
    /// Action labels a communication of machine `m` takes part in.
    std::vector<std::string> comm_actions(int m, int set, EventDir dir, bool has_input) {
        const EventSet& es = P_.event_sets[set];
        if (es.open) {
            if (dir == EventDir::In && has_input)
                throw Error("UNSUPPORTED", "input on '" + es.name + "' needs a value but no component sends one");
            return {action_of(set, dir, m)};
        }
        if (es.machines.size() > 2)
            throw Error("UNSUPPORTED", "event '" + es.name + "' links more than two machines; PRISM would synchronise all of them");
        if (dir == EventDir::Out) return {action_of(set, dir, m)};
        if (has_input)
            throw Error("UNSUPPORTED", "typed communication between machines on '" + es.name + "' is not emitted");
        std::vector<std::string> out;
        for (int other : es.machines)
            if (other != m) out.push_back(action_of(set, dir, other));
        return out;
    }

    void arrive(const MachineProgram& mp, int t, bool lk_free, Env& env);
    void body(const MachineProgram& mp, int t, bool lk_free, Env& env);
    /// One atom step; returns the action labels (empty string: unlabelled).
    std::vector<std::string> atom(int m, const CAction& a, Env& env);
    void add(int m, std::vector<std::string> actions, const std::string& guard, const Env& env);
    void machine(int m);
    std::string pmodule(const PModuleProgram& pm);
    std::string idle_guard();
    std::string var_decl(int slot);
    std::string updates(const std::map<int, std::string>& env);

    const EmitRequest& req_;
    const ClosedModel& cm_;
    const Program& P_;
    NameMap& names_;
    Renderer R_;
    std::vector<int> owner_;  // slot -> machine writing it (-1 none, -2 several)
    std::vector<std::vector<Command>> commands_;
};

std::string ModelEmitter::updates(const std::map<int, std::string>& env) {
    if (env.empty()) return "true";
    std::string out;
    for (const auto& [s, v] : env) {
        if (!out.empty()) out += " & ";
        out += "(" + R_.slot_name(s) + "'=" + v + ")";
    }
    return out;
}

void ModelEmitter::arrive(const MachineProgram& mp, int t, bool lk_free, Env& env) {
    const TransInfo& ti = mp.trans[t];
    const NodeInfo& target = mp.nodes[ti.target];
    if (target.kind == NodeKind::ProbJunction) {
        if (lk_free) env[mp.lk_slot] = std::to_string(t + 1);
        env[mp.pc_slot] = std::to_string(ti.target);
    } else if (target.entering_point >= 0) {
        if (lk_free) env[mp.lk_slot] = std::to_string(t + 1);
        env[mp.pc_slot] = std::to_string(target.entering_point);
    } else {
        env[mp.pc_slot] = std::to_string(ti.target);
        if (!lk_free) env[mp.lk_slot] = "0";
    }
}

void ModelEmitter::body(const MachineProgram& mp, int t, bool lk_free, Env& env) {
    const TransInfo& ti = mp.trans[t];
    if (ti.atoms.empty()) return arrive(mp, t, lk_free, env);
    if (lk_free) env[mp.lk_slot] = std::to_string(t + 1);
    env[mp.pc_slot] = std::to_string(ti.act_point);
}

std::vector<std::string> ModelEmitter::atom(int m, const CAction& a, Env& env) {
    if (a.k != CAction::K::Comm) {
        R_.exec(a, env);
        return {""};
    }
    const EventSet& es = P_.event_sets[a.event_set];
    if (a.dir == EventDir::Out && a.has_value && es.latch_slot >= 0) env[es.latch_slot] = R_.expr(a.value, &env);
    return comm_actions(m, a.event_set, a.dir, a.slot >= 0);
}

void ModelEmitter::add(int m, std::vector<std::string> actions, const std::string& guard, const Env& env) {
    for (const auto& act : actions) commands_[m].push_back(Command{act, guard, {{"", env}}});
}

void ModelEmitter::machine(int m) {
    const MachineProgram& mp = P_.machines[m];
    const std::string pc = R_.slot_name(mp.pc_slot), lk = R_.slot_name(mp.lk_slot);
    const std::string ex = mp.exit_slot >= 0 ? R_.slot_name(mp.exit_slot) : "";
    auto at = [&](int p) { return pc + "=" + std::to_string(p); };

    for (std::size_t n = 0; n < mp.nodes.size(); ++n) {
        const NodeInfo& src = mp.nodes[n];
        if (src.kind == NodeKind::ProbJunction) {
            // Branch of a probabilistic junction: one weighted command.
            Command c{"", at(static_cast<int>(n)) + " & " + lk + "!=0", {}};
            std::string any;
            bool open = false;  // some branch is unguarded
            for (int t : src.outgoing) {
                const TransInfo& ti = mp.trans[t];
                std::string p = ti.has_prob ? R_.expr(ti.prob) : "1";
                if (ti.has_guard) {
                    std::string g = R_.expr(ti.guard);
                    p = "(" + g + " ? " + p + " : 0)";
                    any += (any.empty() ? "" : " | ") + g;
                } else {
                    open = true;
                }
                Env env;
                body(mp, t, false, env);
                c.alts.emplace_back(p, env);
            }
            if (!open && !any.empty()) c.guard += " & (" + any + ")";
            if (!c.alts.empty()) commands_[m].push_back(std::move(c));
            continue;
        }
        // Firing from a stable node.
        for (int t : src.outgoing) {
            const TransInfo& ti = mp.trans[t];
            std::string guard = at(static_cast<int>(n)) + " & " + lk + "=0";
            if (!ex.empty()) guard += " & " + ex + "=0";
            if (ti.has_guard) guard += " & " + R_.expr(ti.guard);
            Env env;
            std::vector<std::string> acts{""};
            if (ti.trigger) {
                const CTrigger& tr = *ti.trigger;
                const EventSet& es = P_.event_sets[tr.event_set];
                if (tr.has_output && es.latch_slot >= 0) env[es.latch_slot] = R_.expr(tr.output);
                acts = comm_actions(m, tr.event_set, tr.dir, tr.input_slot >= 0);
            }
            if (!src.exit.empty()) {
                env[mp.lk_slot] = std::to_string(t + 1);
                env[mp.exit_slot] = std::to_string(EXIT_SUB_ACT);
            } else {
                body(mp, t, true, env);
            }
            add(m, acts, guard, env);
        }
        // First exit action, taken at the source state itself.
        if (!src.exit.empty()) {
            Env env;
            auto acts = atom(m, src.exit[0], env);
            env[mp.pc_slot] = std::to_string(src.exit_point);
            if (src.exit.size() == 1) env[mp.exit_slot] = std::to_string(EXIT_SUB_EXITED);
            add(m, acts, at(static_cast<int>(n)) + " & " + ex + "=" + std::to_string(EXIT_SUB_ACT), env);
        }
    }

    for (std::size_t p = 0; p < mp.points.size(); ++p) {
        const PointRole& role = mp.roles[p];
        const int pi = static_cast<int>(p);
        switch (role.k) {
            case PointRole::K::Node: break;
            case PointRole::K::Exit: {
                const NodeInfo& n = mp.nodes[role.owner];
                const std::size_t k = static_cast<std::size_t>(role.step);
                if (k < n.exit.size()) {
                    Env env;
                    auto acts = atom(m, n.exit[k], env);
                    env[mp.pc_slot] = std::to_string(pi + 1);
                    if (k + 1 == n.exit.size()) env[mp.exit_slot] = std::to_string(EXIT_SUB_EXITED);
                    add(m, acts, at(pi), env);
                } else {
                    for (int t : n.outgoing) {
                        Env env;
                        env[mp.exit_slot] = std::to_string(EXIT_NONE);
                        body(mp, t, false, env);
                        add(m, {""}, at(pi) + " & " + lk + "=" + std::to_string(t + 1), env);
                    }
                }
                break;
            }
            case PointRole::K::TAct: {
                const TransInfo& ti = mp.trans[role.owner];
                const std::size_t k = static_cast<std::size_t>(role.step);
                Env env;
                auto acts = atom(m, ti.atoms[k], env);
                if (k + 1 < ti.atoms.size())
                    env[mp.pc_slot] = std::to_string(pi + 1);
                else
                    arrive(mp, role.owner, false, env);
                add(m, acts, at(pi), env);
                break;
            }
            case PointRole::K::Entry: {
                const NodeInfo& n = mp.nodes[role.owner];
                const std::size_t k = static_cast<std::size_t>(role.step);
                Env env;
                auto acts = atom(m, n.entry[k], env);
                if (k + 1 < n.entry.size()) {
                    env[mp.pc_slot] = std::to_string(pi + 1);
                } else {
                    env[mp.pc_slot] = std::to_string(role.owner);
                    env[mp.lk_slot] = "0";
                }
                add(m, acts, at(pi), env);
                break;
            }
        }
    }
}

std::string ModelEmitter::var_decl(int s) {
    const Slot& sl = P_.slots[s];
    const std::string name = R_.slot_name(s);
    const Value init = P_.decode(P_.initial[s], s);
    if (sl.kind == SlotKind::Var || sl.kind == SlotKind::Latch) {
        if (sl.type.kind == TypeKind::Bool) return name + " : bool init " + literal(init) + ";";
        if (sl.type.kind == TypeKind::Real)
            throw Error("UNSUPPORTED", "real-valued variable '" + sl.path + "' has no PRISM counterpart");
    }
    if (sl.kind == SlotKind::ModVar && sl.type.kind == TypeKind::Bool)
        return name + " : bool init " + literal(init) + ";";
    std::int64_t lo = 0, hi = 0;
    switch (sl.kind) {
        case SlotKind::Lock: hi = static_cast<std::int64_t>(P_.machines[sl.machine].trans.size()); break;
        case SlotKind::Pc: hi = static_cast<std::int64_t>(P_.machines[sl.machine].points.size()) - 1; break;
        case SlotKind::Exit: hi = EXIT_SUB_EXITED; break;
        case SlotKind::ModVar:
            lo = sl.lo;
            hi = sl.hi;
            break;
        default:
            if (static_cast<std::size_t>(s) < req_.ranges.size()) std::tie(lo, hi) = req_.ranges[s];
            lo = std::min(lo, P_.initial[s]);
            hi = std::max(hi, P_.initial[s]);
    }
    return name + " : [" + std::to_string(lo) + ".." + std::to_string(hi) + "] init " + literal(init) + ";";
}

std::string ModelEmitter::pmodule(const PModuleProgram& pm) {
    std::ostringstream os;
    os << "module " << names_.mangle(pm.name, "module") << "\n";
    for (int s : pm.slots) os << "    " << var_decl(s) << "\n";
    for (const auto& cmd : pm.commands) {
        std::vector<std::string> acts{""};
        if (cmd.sync_tag) {
            const int set = tag_set(*cmd.sync_tag);
            const EventSet& es = P_.event_sets[set];
            if (es.open) {
                acts = {action_of(set, tag_dir(*cmd.sync_tag), -1)};
            } else {
                acts.clear();
                for (int m : es.machines) acts.push_back(action_of(set, EventDir::Out, m));
            }
        }
        std::string rhs;
        for (const auto& alt : cmd.alts) {
            Env env;
            for (const auto& [slot, value] : alt.updates) env[slot] = R_.expr(value);
            if (!rhs.empty()) rhs += " + ";
            std::string p = R_.expr(alt.prob);
            rhs += (cmd.alts.size() == 1 && p == "1") ? updates(env) : p + " : " + updates(env);
        }
        for (const auto& a : acts)
            os << "    [" << a << "] " << R_.expr(cmd.guard) << " -> " << rhs << ";  // " << cmd.label << "\n";
    }
    os << "endmodule\n";
    return os.str();
}

// Quiescent states self-loop instead of deadlocking. A node with a triggered
// transition is left out, since whether it can fire depends on the partner.
std::string ModelEmitter::idle_guard() {
    std::string all;
    for (const auto& mp : P_.machines) {
        const std::string pc = R_.slot_name(mp.pc_slot), lk = R_.slot_name(mp.lk_slot);
        std::string any;
        for (std::size_t n = 0; n < mp.nodes.size(); ++n) {
            const NodeInfo& node = mp.nodes[n];
            if (node.kind != NodeKind::State) continue;
            std::string blocked;
            bool never = false;
            for (int t : node.outgoing) {
                const TransInfo& ti = mp.trans[t];
                if (ti.trigger || !ti.has_guard) {
                    never = true;
                    break;
                }
                blocked += (blocked.empty() ? "" : " | ") + R_.expr(ti.guard);
            }
            if (never) continue;
            std::string g = pc + "=" + std::to_string(n) + " & " + lk + "=0";
            if (mp.exit_slot >= 0) g += " & " + R_.slot_name(mp.exit_slot) + "=0";
            if (!blocked.empty()) g += " & !(" + blocked + ")";
            any += (any.empty() ? "(" : " | (") + g + ")";
        }
        if (any.empty()) return "";
        all += (all.empty() ? "(" : " & (") + any + ")";
    }
    for (const auto& pm : P_.pmodules)
        for (const auto& cmd : pm.commands)
            if (!cmd.sync_tag) all += " & !(" + R_.expr(cmd.guard) + ")";
    return all;
}

std::string ModelEmitter::run() {
    const std::size_t nslots = P_.slots.size();
    commands_.assign(P_.machines.size(), {});
    for (std::size_t m = 0; m < P_.machines.size(); ++m) machine(static_cast<int>(m));

    // Variables live in the one module that writes them; shared ones become globals.
    owner_.assign(nslots, -1);
    for (std::size_t m = 0; m < commands_.size(); ++m)
        for (const auto& c : commands_[m])
            for (const auto& alt : c.alts)
                for (const auto& [s, v] : alt.second) {
                    const SlotKind k = P_.slots[s].kind;
                    if (k != SlotKind::Var && k != SlotKind::Latch) continue;
                    if (owner_[s] == -1) owner_[s] = static_cast<int>(m);
                    else if (owner_[s] != static_cast<int>(m)) owner_[s] = -2;
                }
    for (std::size_t m = 0; m < commands_.size(); ++m)
        for (const auto& c : commands_[m])
            for (const auto& alt : c.alts)
                for (const auto& [s, v] : alt.second)
                    if (owner_[s] == -2 && !c.action.empty())
                        throw Error("UNSUPPORTED", "shared variable '" + P_.slots[s].path +
                                                       "' is written in a synchronised step, which PRISM forbids");

    for (const auto& mp : P_.machines) {
        names_.mangle(mp.path, "machine");
        for (std::size_t p = 0; p < mp.points.size(); ++p)
            names_.encoding(R_.slot_name(mp.pc_slot), static_cast<std::int64_t>(p), mp.path + "::" + mp.points[p], "pc");
        for (std::size_t t = 0; t < mp.trans.size(); ++t)
            names_.encoding(R_.slot_name(mp.lk_slot), static_cast<std::int64_t>(t + 1), mp.path + "::" + mp.trans[t].id,
                            "lk");
    }

    const std::string idle = idle_guard();

    std::ostringstream os;
    os << (cm_.kind == ModelKind::Dtmc ? "dtmc" : "mdp") << "\n\n";
    const auto& consts = cm_.resolver->index().consts();
    bool any_const = false;
    for (std::size_t c = 0; c < consts.size(); ++c) {
        if (consts[c].value || !cm_.const_values[c]) continue;
        const char* ty = consts[c].type.kind == TypeKind::Real   ? "double"
                         : consts[c].type.kind == TypeKind::Bool ? "bool"
                                                                 : "int";
        os << "const " << ty << " " << R_.const_name(static_cast<int>(c)) << ";\n";
        any_const = true;
    }
    if (any_const) os << "\n";
    bool any_global = false;
    for (std::size_t s = 0; s < nslots; ++s) {
        const SlotKind k = P_.slots[s].kind;
        if ((k == SlotKind::Var || k == SlotKind::Latch) && owner_[s] < 0) {
            os << "global " << var_decl(static_cast<int>(s)) << "\n";
            any_global = true;
        }
    }
    if (any_global) os << "\n";

    for (std::size_t m = 0; m < P_.machines.size(); ++m) {
        const MachineProgram& mp = P_.machines[m];
        os << "module " << names_.mangle(mp.path, "machine") << "\n";
        for (std::size_t s = 0; s < nslots; ++s)
            if (owner_[s] == static_cast<int>(m)) os << "    " << var_decl(static_cast<int>(s)) << "\n";
        os << "    " << var_decl(mp.lk_slot) << "\n";
        os << "    " << var_decl(mp.pc_slot) << "\n";
        if (mp.exit_slot >= 0) os << "    " << var_decl(mp.exit_slot) << "\n";
        os << "\n";
        for (const auto& c : commands_[m]) {
            os << "    [" << c.action << "] " << c.guard << " -> ";
            for (std::size_t i = 0; i < c.alts.size(); ++i) {
                if (i) os << " + ";
                const auto& [p, env] = c.alts[i];
                if (!p.empty()) os << p << " : ";
                os << updates(env);
            }
            os << ";\n";
        }
        if (m == 0 && !idle.empty()) os << "    [] " << idle << " -> true;  // idle\n";
        os << "endmodule\n\n";
    }
    for (const auto& pm : P_.pmodules) os << pmodule(pm) << "\n";

    // Reward structures of the specification.
    if (cm_.spec) {
        Compiler comp(cm_);
        for (const RewardsDecl* rd : cm_.spec->all<RewardsDecl>()) {
            os << "rewards \"" << rd->name << "\"\n";
            for (const auto& item : rd->items) {
                std::string g = R_.expr(comp.spec_expr(*item.guard)), v = R_.expr(comp.spec_expr(*item.value));
                if (g.find('"') != std::string::npos || v.find('"') != std::string::npos)
                    throw Error("UNSUPPORTED", "reward '" + rd->name + "' refers to a label");
                if (!item.event) {
                    os << "    " << g << " : " << v << ";\n";
                    continue;
                }
                int tag = comp.event_tag(*item.event);
                const EventSet& es = P_.event_sets[tag_set(tag)];
                std::vector<std::string> acts;
                if (es.open)
                    acts.push_back(action_of(tag_set(tag), tag_dir(tag), -1));
                else
                    for (int m : es.machines) acts.push_back(action_of(tag_set(tag), EventDir::Out, m));
                for (const auto& a : acts) os << "    [" << a << "] " << g << " : " << v << ";\n";
            }
            os << "endrewards\n\n";
        }
    }
    std::string text = os.str();
    while (text.size() > 1 && text[text.size() - 1] == '\n' && text[text.size() - 2] == '\n') text.pop_back();
    return text;
}

// ---------------------------------------------------------------------------
// Properties

// Precedence levels of PRISM operators, loosest first.
enum Prec { P_TEMPORAL, P_ITE, P_IMPLIES, P_IFF, P_OR, P_AND, P_NOT, P_EQ, P_REL, P_ADD, P_MUL, P_NEG, P_ATOM };

int binary_prec(Op op) {
    switch (op) {
        case Op::Implies: return P_IMPLIES;
        case Op::Iff: return P_IFF;
        case Op::Or: return P_OR;
        case Op::And: return P_AND;
        case Op::Eq:
        case Op::Neq: return P_EQ;
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: return P_REL;
        case Op::Add:
        case Op::Sub: return P_ADD;
        default: return P_MUL;
    }
}

class PropWriter {
   public:
    PropWriter(const ClosedModel& cm, NameMap& names) : comp_(cm), R_(cm, names), names_(names) {}

    std::string text(const Expr& e, int min_prec = P_TEMPORAL) {
        auto [s, p] = go(e);
        return p < min_prec ? "(" + s + ")" : s;
    }

   private:
    std::string bound(const Bound& b) { return std::string(op_symbol(b.cmp)) + number(*b.value); }
    std::string number(const Expr& e) {
        if (e.kind == ExprKind::NumLit) return e.number.decimal_str();
        return R_.expr(comp_.spec_expr(e));
    }
    std::string query(const Expr& e) {
        if (e.query) {
            if (*e.query == QueryKind::Min) return "min=?";
            if (*e.query == QueryKind::Max) return "max=?";
            return "=?";
        }
        return bound(*e.bound);
    }

    std::pair<std::string, int> go(const Expr& e) {
        switch (e.kind) {
            case ExprKind::BoolLit: return {e.bool_value ? "true" : "false", P_ATOM};
            case ExprKind::NumLit: return {e.number.decimal_str(), P_ATOM};
            case ExprKind::LabelRef: return {"\"" + e.name.segments[0] + "\"", P_ATOM};
            case ExprKind::FormulaRef: return {names_.mangle(e.name.segments[0], "formula"), P_ATOM};
            case ExprKind::Unary:
                if (e.op == Op::Not) return {"!" + text(*e.children[0], P_NOT), P_NOT};
                return {"-" + text(*e.children[0], P_NEG), P_NEG};
            case ExprKind::Binary: {
                if (e.op == Op::Mod)
                    return {"mod(" + text(*e.children[0], P_ITE) + ", " + text(*e.children[1], P_ITE) + ")", P_ATOM};
                const int p = binary_prec(e.op);
                const bool assoc = e.op == Op::And || e.op == Op::Or || e.op == Op::Add || e.op == Op::Mul;
                const bool right = e.op == Op::Implies;
                std::string a = text(*e.children[0], right ? p + 1 : p);
                std::string b = text(*e.children[1], assoc || right ? p : p + 1);
                return {a + " " + prism_op(e.op) + " " + b, p};
            }
            case ExprKind::Ite:
                return {text(*e.children[0], P_IMPLIES) + " ? " + text(*e.children[1], P_IMPLIES) + " : " +
                            text(*e.children[2], P_ITE),
                        P_ITE};
            case ExprKind::Prob: return {"P" + query(e) + " [ " + text(*e.children[0]) + " ]", P_ATOM};
            case ExprKind::Reward: {
                std::string head = "R";
                if (!e.name.empty()) head += "{\"" + e.name.segments[0] + "\"}";
                return {head + query(e) + " [ " + text(*e.children[0]) + " ]", P_ATOM};
            }
            case ExprKind::Forall: return {"A [ " + text(*e.children[0]) + " ]", P_ATOM};
            case ExprKind::Exists: return {"E [ " + text(*e.children[0]) + " ]", P_ATOM};
            case ExprKind::RewardPath:
                switch (e.op) {
                    case Op::Reachable: return {"F " + text(*e.children[0], P_ITE), P_TEMPORAL};
                    case Op::Cumul: return {"C<=" + number(*e.children[0]), P_TEMPORAL};
                    case Op::Total: return {"C", P_TEMPORAL};
                    default: return {text(*e.children[0]), P_TEMPORAL};
                }
            case ExprKind::Temporal: {
                std::string b = e.bound ? bound(*e.bound) : "";
                switch (e.op) {
                    case Op::Next: return {"X " + text(*e.children[0], P_TEMPORAL), P_TEMPORAL};
                    case Op::Finally: return {"F" + b + " " + text(*e.children[0], P_TEMPORAL), P_TEMPORAL};
                    case Op::Globally: return {"G" + b + " " + text(*e.children[0], P_TEMPORAL), P_TEMPORAL};
                    default: {
                        const char* sym = e.op == Op::Until ? "U" : e.op == Op::WeakUntil ? "W" : "R";
                        return {text(*e.children[0], P_ITE) + " " + sym + b + " " + text(*e.children[1], P_ITE),
                                P_TEMPORAL};
                    }
                }
            }
            default: {
                // Names, `is in`, calls and module variables are compiled and rendered structurally.
                std::string s = R_.expr(comp_.spec_expr(e));
                return {s, P_ATOM};
            }
        }
    }

    Compiler comp_;
    Renderer R_;
    NameMap& names_;
};

std::string sweep_text(const std::vector<Valuation>& sweep, NameMap& names, const ClosedModel& cm) {
    std::string out;
    for (const auto& v : sweep) {
        std::string line;
        for (const auto& [name, value] : v) {
            QualifiedName qn;
            std::stringstream ss(name);
            for (std::string seg; std::getline(ss, seg, ':');)
                if (!seg.empty()) qn.segments.push_back(seg);
            auto r = cm.resolver->resolve(qn, nullptr);
            std::string id = r ? names.mangle(cm.resolver->index().consts()[r->index].path, "const") : name;
            if (!line.empty()) line += ",";
            line += id + "=" + literal(value);
        }
        out += line + "\n";
    }
    return out;
}

}  // namespace

std::string translate_property(const Expr& body, const ClosedModel& cm, NameMap& names) {
    return PropWriter(cm, names).text(body);
}

EmittedPair emit_prism(const EmitRequest& req) {
    NameMap names;
    EmittedPair out;
    const ClosedModel& cm = *req.closed;
    out.model = ModelEmitter(req, names).run();

    std::ostringstream ps;
    PropWriter pw(cm, names);
    if (cm.spec) {
        for (const LabelDecl* l : cm.spec->all<LabelDecl>()) ps << "label \"" << l->name << "\" = " << pw.text(*l->body) << ";\n";
        for (const FormulaDecl* f : cm.spec->all<FormulaDecl>())
            ps << "formula " << names.mangle(f->name, "formula") << " = " << pw.text(*f->body) << ";\n";
    }
    if (ps.tellp() > 0) ps << "\n";
    for (const ProbProperty* p : req.properties) ps << "\"" << p->name << "\": " << pw.text(*p->body) << ";\n";
    out.props = ps.str();
    out.sweep = sweep_text(req.sweep, names, cm);
    if (!names.bijective()) throw Error("INTERNAL", "PRISM name table is not a bijection");
    out.namemap = names.tsv();
    return out;
}

}  // namespace rcprob
