#include "rcprob/program.h"

#include <algorithm>
#include <numeric>

#include "rcprob/markov.h"

namespace rcprob {

// ---------------------------------------------------------------------------
// Program helpers

int Program::slot_of(const std::string& path) const {
    auto it = slot_by_path_.find(path);
    return it == slot_by_path_.end() ? -1 : it->second;
}

std::int64_t Program::encode(const Value& v, int slot) const {
    const Slot& s = slots[slot];
    if (s.kind == SlotKind::Lock || s.kind == SlotKind::Pc || s.kind == SlotKind::Exit) return v.r.num();
    Value c = coerce(v, s.type, "value of '" + s.path + "'");
    if (s.bounded && (c.r < Rational(s.lo) || Rational(s.hi) < c.r))
        throw Error("RANGE", "value " + c.str() + " of '" + s.path + "' is outside [" + std::to_string(s.lo) + ".." +
                                 std::to_string(s.hi) + "]");
    if (s.type.kind != TypeKind::Real) return c.r.num();
    auto key = std::make_pair(c.r.num(), c.r.den());
    auto it = real_index_.find(key);
    if (it != real_index_.end()) return it->second;
    std::int64_t id = static_cast<std::int64_t>(reals_.size());
    reals_.push_back(c.r);
    real_index_.emplace(key, id);
    return id;
}

Value Program::decode(std::int64_t raw, int slot) const {
    const Slot& s = slots[slot];
    if (s.kind == SlotKind::Lock || s.kind == SlotKind::Pc || s.kind == SlotKind::Exit) return Value::integer(raw);
    switch (s.type.kind) {
        case TypeKind::Bool: return Value::boolean(raw != 0);
        case TypeKind::Enum: return Value::enumeration(raw);
        case TypeKind::Real: return Value::real(reals_.at(static_cast<std::size_t>(raw)));
        default: return Value::integer(raw);
    }
}

std::string Program::show(std::int64_t raw, int slot) const {
    const Slot& s = slots[slot];
    switch (s.kind) {
        case SlotKind::Pc: return machines[s.machine].points.at(static_cast<std::size_t>(raw));
        case SlotKind::Lock:
            return raw == 0 ? "0" : machines[s.machine].trans.at(static_cast<std::size_t>(raw - 1)).id;
        case SlotKind::Exit: return raw == EXIT_NONE ? "NONE" : raw == EXIT_SUB_ACT ? "Sub_ACT" : "Sub_EXITED";
        default: break;
    }
    return decode(raw, slot).str();
}

int Program::tag_of(const ResolvedRef& ev, EventDir dir) const {
    if (ev.kind != RefKind::Event || ev.path.size() < 2) throw Error("TYPE", "'" + pretty(ev) + "' is not an event");
    std::string key = ev.path[ev.path.size() - 2] + "::" + ev.path.back();
    auto it = set_by_endpoint_.find(key);
    if (it == set_by_endpoint_.end()) throw Error("SCOPE", "unknown event endpoint '" + pretty(ev) + "'");
    if (endpoint_is_platform_.at(key)) dir = dir == EventDir::In ? EventDir::Out : EventDir::In;
    return make_tag(it->second, dir);
}

std::string Program::tag_name(int tag) const {
    return event_sets[tag_set(tag)].name + (tag_dir(tag) == EventDir::Out ? ".out" : ".in");
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {
thread_local int call_depth = 0;
constexpr int kMaxCallDepth = 10000;
}  // namespace

Value eval(const CExpr& e, const EvalEnv& env) {
    switch (e.k) {
        case CExpr::K::Lit:
        case CExpr::K::Const: return e.lit;
        case CExpr::K::Slot:
            if (!env.state) throw Error("EVAL", "expression depends on the state: '" + env.prog->slots[e.index].path + "'");
            return env.prog->decode(env.state[e.index], e.index);
        case CExpr::K::Param: return env.frame->at(static_cast<std::size_t>(e.index));
        case CExpr::K::Unary: return apply_unary(e.op, eval(e.kids[0], env));
        case CExpr::K::Binary: {
            Value a = eval(e.kids[0], env);
            if (e.op == Op::And && !a.truthy()) return Value::boolean(false);
            if (e.op == Op::Or && a.truthy()) return Value::boolean(true);
            if (e.op == Op::Implies && !a.truthy()) return Value::boolean(true);
            return apply_binary(e.op, a, eval(e.kids[1], env));
        }
        case CExpr::K::Ite: return eval(e.kids[0], env).truthy() ? eval(e.kids[1], env) : eval(e.kids[2], env);
        case CExpr::K::Call: {
            std::vector<Value> frame;
            frame.reserve(e.kids.size());
            for (const auto& k : e.kids) frame.push_back(eval(k, env));
            if (++call_depth > kMaxCallDepth) {
                call_depth = 0;
                throw Error("EVAL", "function call depth exceeded");
            }
            EvalEnv inner = env;
            inner.frame = &frame;
            Value v = eval(env.prog->functions[e.index].body, inner);
            --call_depth;
            return v;
        }
        case CExpr::K::Deadlock: return Value::boolean(env.deadlock);
        case CExpr::K::Init: return Value::boolean(env.is_init);
    }
    return Value{};
}

// ---------------------------------------------------------------------------
// Compiler

namespace {

CExpr lit(const Value& v) {
    CExpr c;
    c.k = CExpr::K::Lit;
    c.lit = v;
    return c;
}

// Configured loose constants stay symbolic so that emitters can name them.
CExpr const_ref(const ConstInfo& ci, int index, const Value& v) {
    CExpr c = lit(v);
    if (!ci.value) {
        c.k = CExpr::K::Const;
        c.index = index;
    }
    return c;
}

CExpr slot_ref(int i) {
    CExpr c;
    c.k = CExpr::K::Slot;
    c.index = i;
    return c;
}

CExpr node(CExpr::K k, Op op, std::vector<CExpr> kids) {
    CExpr c;
    c.k = k;
    c.op = op;
    c.kids = std::move(kids);
    return c;
}

Value literal_value(const Expr& e) {
    if (e.kind == ExprKind::BoolLit) return Value::boolean(e.bool_value);
    return e.number_is_int && e.number.is_integer() ? Value::integer(e.number.num()) : Value::real(e.number);
}

thread_local int const_depth = 0;

}  // namespace

Compiler::Compiler(const ClosedModel& cm) : cm_(cm), prog_(cm.program.get()) {}

CExpr Compiler::model_expr(const Expr& e, const Owner& scope, const std::vector<Param>* params) const {
    switch (e.kind) {
        case ExprKind::BoolLit:
        case ExprKind::NumLit: return lit(literal_value(e));
        case ExprKind::Name: {
            const auto& segs = e.name.segments;
            if (segs.size() == 2) {
                auto l = cm_.resolver->index().enum_literal(e.name);
                if (!l) throw Error("SCOPE", "unknown enumeration literal '" + e.name.str() + "'", e.pos);
                return lit(Value::enumeration(l->second));
            }
            if (params) {
                for (std::size_t i = 0; i < params->size(); ++i) {
                    if ((*params)[i].name == segs[0]) {
                        CExpr c;
                        c.k = CExpr::K::Param;
                        c.index = static_cast<int>(i);
                        return c;
                    }
                }
            }
            auto sym = cm_.resolver->index().lookup(scope, segs[0]);
            if (sym.kind == ModelIndex::Symbol::Kind::Var) return slot_ref(sym.index);
            if (sym.kind == ModelIndex::Symbol::Kind::Const) {
                const auto& ci = cm_.resolver->index().consts()[sym.index];
                if (cm_.const_values[sym.index]) return const_ref(ci, sym.index, *cm_.const_values[sym.index]);
                if (!ci.value) throw Error("SCOPE", "loose constant '" + ci.path + "' has no value", e.pos);
                if (++const_depth > 64) {
                    const_depth = 0;
                    throw Error("EVAL", "constant '" + ci.path + "' is defined in terms of itself", e.pos);
                }
                CExpr c = model_expr(*ci.value, ci.owner, nullptr);
                --const_depth;
                EvalEnv env{prog_, nullptr, false, false, nullptr};
                return lit(coerce(eval(c, env), ci.type, "constant '" + ci.path + "'"));
            }
            throw Error("SCOPE", "unknown name '" + segs[0] + "'", e.pos);
        }
        case ExprKind::Unary: return node(CExpr::K::Unary, e.op, {model_expr(*e.children[0], scope, params)});
        case ExprKind::Binary:
            return node(CExpr::K::Binary, e.op,
                        {model_expr(*e.children[0], scope, params), model_expr(*e.children[1], scope, params)});
        case ExprKind::Ite:
            return node(CExpr::K::Ite, Op::None,
                        {model_expr(*e.children[0], scope, params), model_expr(*e.children[1], scope, params),
                         model_expr(*e.children[2], scope, params)});
        case ExprKind::Call: {
            const std::string& n = e.name.segments[0];
            const FunctionDecl* f = cm_.resolver->index().function(scope, n);
            if (!f) throw Error("SCOPE", "unknown function '" + n + "'", e.pos);
            CExpr c;
            c.k = CExpr::K::Call;
            c.index = f->body ? model_function(*f, scope) : pfunction(n);
            for (const auto& a : e.children) c.kids.push_back(model_expr(*a, scope, params));
            if (c.kids.size() != static_cast<std::size_t>(prog_->functions[c.index].nparams))
                throw Error("TYPE", "wrong number of arguments to '" + n + "'", e.pos);
            return c;
        }
        default: throw Error("UNSUPPORTED", "expression form not allowed in a model: " + to_text(e), e.pos);
    }
}

int Compiler::model_function(const FunctionDecl& f, const Owner& scope) const {
    std::string key = "m:" + std::to_string(scope.platform) + ":" + std::to_string(scope.machine) + ":" + f.name;
    auto it = fn_index_.find(key);
    if (it != fn_index_.end()) return it->second;
    int id = static_cast<int>(prog_->functions.size());
    prog_->functions.push_back(CFunction{f.name, static_cast<int>(f.params.size()), {}});
    fn_index_[key] = id;
    CExpr body = model_expr(*f.body, scope, &f.params);
    prog_->functions[id].body = std::move(body);
    return id;
}

int Compiler::pfunction(const std::string& name) const {
    std::string key = "p:" + name;
    auto it = fn_index_.find(key);
    if (it != fn_index_.end()) return it->second;
    const PFunction* pf = cm_.defs ? cm_.defs->find_function(name) : nullptr;
    if (!pf) throw Error("SCOPE", "loose function '" + name + "' has no definition");
    int id = static_cast<int>(prog_->functions.size());
    prog_->functions.push_back(CFunction{name, static_cast<int>(pf->params.size()), {}});
    fn_index_[key] = id;
    SpecCtx c;
    c.params = &pf->params;
    CExpr body = spec(*pf->body, c);
    prog_->functions[id].body = std::move(body);
    return id;
}

int Compiler::operation(const std::string& name) const {
    auto it = op_index_.find(name);
    if (it != op_index_.end()) return it->second;
    const POperation* po = cm_.defs ? cm_.defs->find_operation(name) : nullptr;
    if (!po) throw Error("SCOPE", "loose operation '" + name + "' has no definition");
    COperation op;
    op.name = name;
    op.nparams = static_cast<int>(po->params.size());
    SpecCtx c;
    c.params = &po->params;
    for (const auto& a : po->body) {
        auto r = cm_.resolver->resolve(a.target, nullptr);
        if (!r || r->kind != RefKind::Variable)
            throw Error("SCOPE", "operation '" + name + "' assigns to '" + a.target.str() + "', which is not a variable",
                        a.pos);
        op.assigns.emplace_back(r->index, spec(*a.value, c));
    }
    int id = static_cast<int>(prog_->operations.size());
    prog_->operations.push_back(std::move(op));
    op_index_[name] = id;
    return id;
}

CExpr Compiler::spec_expr(const Expr& e) const { return spec(e, SpecCtx{}); }

Value Compiler::eval_const(const Expr& e) const {
    CExpr c = spec_expr(e);
    EvalEnv env{prog_, nullptr, false, false, nullptr};
    return eval(c, env);
}

int Compiler::event_tag(const EventRef& ev) const {
    auto r = cm_.resolver->resolve(ev.name, nullptr);
    if (!r) throw Error("SCOPE", "unknown event '" + ev.name.str() + "'", ev.name.pos);
    return prog_->tag_of(*r, ev.dir);
}

CExpr Compiler::spec(const Expr& e, const SpecCtx& c) const {
    if (c.depth > 64) throw Error("EVAL", "labels or formulas are defined in terms of themselves", e.pos);
    SpecCtx d = c;
    d.depth++;
    switch (e.kind) {
        case ExprKind::BoolLit:
        case ExprKind::NumLit: return lit(literal_value(e));
        case ExprKind::Name: {
            auto r = cm_.resolver->resolve(e.name, nullptr);
            if (!r) throw Error("SCOPE", "cannot resolve '" + e.name.str() + "'", e.pos);
            switch (r->kind) {
                case RefKind::Variable: return slot_ref(r->index);
                case RefKind::Constant: {
                    const auto& ci = cm_.resolver->index().consts()[r->index];
                    if (cm_.const_values[r->index]) return const_ref(ci, r->index, *cm_.const_values[r->index]);
                    if (!ci.value) throw Error("SCOPE", "loose constant '" + ci.path + "' has no value", e.pos);
                    CExpr k = model_expr(*ci.value, ci.owner, nullptr);
                    EvalEnv env{prog_, nullptr, false, false, nullptr};
                    return lit(coerce(eval(k, env), ci.type, "constant '" + ci.path + "'"));
                }
                case RefKind::EnumLiteral: return lit(Value::enumeration(r->index));
                case RefKind::SpecConstant: {
                    const ConstantDecl* k = cm_.spec->find<ConstantDecl>(e.name.segments[0]);
                    CExpr v = spec(*k->value, SpecCtx{nullptr, d.depth});
                    EvalEnv env{prog_, nullptr, false, false, nullptr};
                    return lit(eval(v, env));
                }
                default:
                    throw Error("TYPE", "'" + pretty(*r) + "' (" + to_string(r->kind) + ") is not a value", e.pos);
            }
        }
        case ExprKind::Unary: return node(CExpr::K::Unary, e.op, {spec(*e.children[0], d)});
        case ExprKind::Binary:
            return node(CExpr::K::Binary, e.op, {spec(*e.children[0], d), spec(*e.children[1], d)});
        case ExprKind::Ite:
            return node(CExpr::K::Ite, Op::None,
                        {spec(*e.children[0], d), spec(*e.children[1], d), spec(*e.children[2], d)});
        case ExprKind::Call: {
            const std::string& n = e.name.segments[0];
            CExpr call;
            call.k = CExpr::K::Call;
            if (cm_.defs && cm_.defs->find_function(n)) {
                call.index = pfunction(n);
            } else {
                const auto& idx = cm_.resolver->index();
                const FunctionDecl* f = nullptr;
                Owner scope;
                for (std::size_t m = 0; m < idx.machines().size() && !f; ++m) {
                    scope = idx.machine_owner(static_cast<int>(m));
                    f = idx.function(scope, n);
                }
                if (!f) throw Error("SCOPE", "unknown function '&" + n + "'", e.pos);
                call.index = f->body ? model_function(*f, scope) : pfunction(n);
            }
            for (const auto& a : e.children) call.kids.push_back(spec(*a, d));
            if (call.kids.size() != static_cast<std::size_t>(prog_->functions[call.index].nparams))
                throw Error("TYPE", "wrong number of arguments to '&" + n + "'", e.pos);
            return call;
        }
        case ExprKind::IsIn: {
            auto l = cm_.resolver->resolve(e.name, nullptr);
            auto r = cm_.resolver->resolve(e.name2, nullptr);
            if (!l || !r || l->kind != RefKind::Machine ||
                (r->kind != RefKind::State && r->kind != RefKind::Junction) || r->machine != l->machine)
                throw Error("TYPE", "invalid 'is in' operands (WFExp-5)", e.pos);
            const MachineProgram& mp = prog_->machines[l->machine];
            int pt = -1;
            for (std::size_t i = 0; i < mp.nodes.size(); ++i)
                if (mp.nodes[i].name == r->path.back()) pt = static_cast<int>(i);
            return node(CExpr::K::Binary, Op::Eq, {slot_ref(mp.pc_slot), lit(Value::integer(pt))});
        }
        case ExprKind::ModVar: {
            if (!cm_.modules) throw Error("SCOPE", "no environment modules for '@" + e.name.str() + "'", e.pos);
            const auto& segs = e.name.segments;
            for (const auto& m : cm_.modules->modules) {
                if (segs.size() == 3 && (segs[0] != cm_.modules->name || segs[1] != m.name)) continue;
                int s = prog_->slot_of(cm_.modules->name + "::" + m.name + "::" + segs.back());
                if (s >= 0) return slot_ref(s);
            }
            throw Error("SCOPE", "unknown module variable '@" + e.name.str() + "'", e.pos);
        }
        case ExprKind::LabelRef: {
            const std::string& n = e.name.segments[0];
            if (n == "deadlock") return node(CExpr::K::Deadlock, Op::None, {});
            if (n == "init") return node(CExpr::K::Init, Op::None, {});
            const LabelDecl* l = cm_.spec ? cm_.spec->find<LabelDecl>(n) : nullptr;
            if (!l) throw Error("SCOPE", "unknown label '#" + n + "'", e.pos);
            return spec(*l->body, SpecCtx{nullptr, d.depth});
        }
        case ExprKind::FormulaRef: {
            const std::string& n = e.name.segments[0];
            const FormulaDecl* f = cm_.spec ? cm_.spec->find<FormulaDecl>(n) : nullptr;
            if (!f) throw Error("SCOPE", "unknown formula '`" + n + "'", e.pos);
            return spec(*f->body, d);
        }
        case ExprKind::ParamRef: {
            const std::string& n = e.name.segments[0];
            if (c.params) {
                auto it = std::find(c.params->begin(), c.params->end(), n);
                if (it != c.params->end()) {
                    CExpr p;
                    p.k = CExpr::K::Param;
                    p.index = static_cast<int>(it - c.params->begin());
                    return p;
                }
            }
            throw Error("SCOPE", "unknown parameter '$$" + n + "'", e.pos);
        }
        case ExprKind::EventVal: {
            int tag = event_tag(e.event);
            const EventSet& es = prog_->event_sets[tag_set(tag)];
            if (es.latch_slot < 0) throw Error("TYPE", "event '" + e.event.name.str() + "' carries no value", e.pos);
            return slot_ref(es.latch_slot);
        }
        default:
            throw Error("UNSUPPORTED", "not a state expression: " + to_text(e), e.pos);
    }
}

CAction Compiler::action(const Action& a, const Owner& scope, const MachineProgram& mp) const {
    CAction c;
    switch (a.kind) {
        case ActionKind::Skip: c.k = CAction::K::Skip; return c;
        case ActionKind::Assign: {
            auto sym = cm_.resolver->index().lookup(scope, a.target);
            if (sym.kind != ModelIndex::Symbol::Kind::Var)
                throw Error("SCOPE", "assignment target '" + a.target + "' is not a variable", a.pos);
            c.k = CAction::K::Assign;
            c.slot = sym.index;
            c.value = model_expr(*a.value, scope);
            return c;
        }
        case ActionKind::Comm: {
            auto it = mp.event_sets.find(a.target);
            if (it == mp.event_sets.end()) throw Error("SCOPE", "unknown event '" + a.target + "'", a.pos);
            c.k = CAction::K::Comm;
            c.event_set = it->second;
            c.dir = a.dir;
            if (a.value) {
                c.has_value = true;
                c.value = model_expr(*a.value, scope);
            }
            if (!a.input_var.empty()) {
                auto sym = cm_.resolver->index().lookup(scope, a.input_var);
                if (sym.kind != ModelIndex::Symbol::Kind::Var)
                    throw Error("SCOPE", "input variable '" + a.input_var + "' is not a variable", a.pos);
                c.slot = sym.index;
            }
            return c;
        }
        case ActionKind::Call: {
            c.k = CAction::K::Call;
            c.op = operation(a.target);
            for (const auto& x : a.args) c.args.push_back(model_expr(*x, scope));
            if (static_cast<int>(c.args.size()) != prog_->operations[c.op].nparams)
                throw Error("TYPE", "wrong number of arguments to '" + a.target + "'", a.pos);
            return c;
        }
        case ActionKind::Seq:
        case ActionKind::If: {
            c.k = a.kind == ActionKind::Seq ? CAction::K::Seq : CAction::K::If;
            if (a.kind == ActionKind::If) c.value = model_expr(*a.value, scope);
            for (const auto& k : a.children) {
                CAction sub = k ? action(*k, scope, mp) : CAction{};
                if (sub.k == CAction::K::Comm)
                    throw Error("UNSUPPORTED", "communication inside a conditional or nested block", k->pos);
                c.kids.push_back(std::move(sub));
            }
            return c;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Program construction

namespace {

struct UnionFind {
    std::vector<int> parent;
    int add() {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
    }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

Value type_default(const TypeRef&) { return Value::integer(0); }

}  // namespace

std::shared_ptr<Program> compile_program(ClosedModel& cm) {
    auto prog = std::make_shared<Program>();
    cm.program = prog;
    Program& P = *prog;
    const ModelAst& m = *cm.model;
    const ModelIndex& idx = cm.resolver->index();
    Compiler comp(cm);

    auto add_slot = [&](Slot s) {
        int id = static_cast<int>(P.slots.size());
        P.slot_by_path_[s.path] = id;
        P.slots.push_back(std::move(s));
        P.initial.push_back(0);
        return id;
    };

    // Model variables: slot index == ModelIndex variable index.
    for (const auto& v : idx.vars()) add_slot(Slot{v.name, v.path, SlotKind::Var, v.type});

    // Machines: lock, program counter and (when any state has an exit action) exit flag.
    for (std::size_t mi = 0; mi < idx.machines().size(); ++mi) {
        const MachineInfo& info = idx.machines()[mi];
        MachineProgram mp;
        mp.name = info.sm->name;
        mp.path = info.path;
        mp.scope = idx.machine_owner(static_cast<int>(mi));
        TypeRef nat{TypeKind::Nat};
        mp.lk_slot = add_slot(Slot{"lk", info.path + "::lk", SlotKind::Lock, nat, false, 0, 0, static_cast<int>(mi)});
        mp.pc_slot = add_slot(Slot{"pc", info.path + "::pc", SlotKind::Pc, nat, false, 0, 0, static_cast<int>(mi)});
        bool any_exit = std::any_of(info.sm->nodes.begin(), info.sm->nodes.end(), [](const Node& n) {
            return n.exit && !flatten_seq(n.exit).empty();
        });
        if (any_exit)
            mp.exit_slot =
                add_slot(Slot{"exit", info.path + "::exit", SlotKind::Exit, nat, false, 0, 0, static_cast<int>(mi)});
        P.machines.push_back(std::move(mp));
    }

    // Synchronisation sets over all declared events.
    UnionFind uf;
    std::vector<std::string> ep_key, ep_path;
    std::vector<int> ep_machine;
    std::vector<std::optional<TypeRef>> ep_type;
    std::map<std::string, int> ep_by_key;
    auto add_ep = [&](const std::string& node, const std::string& path, const EventDecl& e, int machine,
                      bool platform) {
        int id = uf.add();
        std::string key = node + "::" + e.name;
        ep_key.push_back(key);
        ep_path.push_back(path + "::" + e.name);
        ep_machine.push_back(machine);
        ep_type.push_back(e.type);
        ep_by_key[key] = id;
        P.endpoint_is_platform_[key] = platform;
    };
    for (const auto& p : m.platforms)
        for (const auto& e : p.events) add_ep(p.name, m.name + "::" + p.name, e, -1, true);
    {
        int mi = 0;
        for (const auto& c : m.controllers) {
            for (const auto& e : c.events) add_ep(c.name, m.name + "::" + c.name, e, -1, false);
            for (const auto& sm : c.machines) {
                for (const auto& e : sm.events) add_ep(sm.name, m.name + "::" + c.name + "::" + sm.name, e, mi, false);
                ++mi;
            }
        }
    }
    auto connect = [&](const Connection& cn) {
        auto a = ep_by_key.find(cn.from.node + "::" + cn.from.event);
        auto b = ep_by_key.find(cn.to.node + "::" + cn.to.event);
        if (a == ep_by_key.end() || b == ep_by_key.end())
            throw Error("REFERENCE", "connection " + cn.from.str() + " -> " + cn.to.str() + " names an unknown event",
                        cn.pos);
        if (cn.async) throw Error("UNSUPPORTED", "asynchronous connections are not supported", cn.pos);
        uf.unite(a->second, b->second);
    };
    for (const auto& c : m.controllers)
        for (const auto& cn : c.connections) connect(cn);
    for (const auto& cn : m.connections) connect(cn);
    std::map<int, int> set_of_root;
    for (std::size_t i = 0; i < ep_key.size(); ++i) {
        int root = uf.find(static_cast<int>(i));
        auto [it, fresh] = set_of_root.emplace(root, static_cast<int>(P.event_sets.size()));
        if (fresh) P.event_sets.emplace_back();
        EventSet& es = P.event_sets[it->second];
        es.members.push_back(ep_path[i]);
        if (ep_machine[i] >= 0 && std::find(es.machines.begin(), es.machines.end(), ep_machine[i]) == es.machines.end())
            es.machines.push_back(ep_machine[i]);
        if (!es.type && ep_type[i]) es.type = ep_type[i];
        P.set_by_endpoint_[ep_key[i]] = it->second;
        if (ep_machine[i] >= 0) P.machines[ep_machine[i]].event_sets[ep_key[i].substr(ep_key[i].find("::") + 2)] = it->second;
    }
    for (auto& es : P.event_sets) {
        es.open = es.machines.size() < 2;
        es.name = es.members.front();
        for (std::size_t i = 0; i < es.members.size(); ++i) {
            // Prefer a machine endpoint as the representative name.
            for (const auto& mp : P.machines)
                if (es.members[i].rfind(mp.path + "::", 0) == 0) {
                    es.name = es.members[i];
                    i = es.members.size();
                    break;
                }
        }
        if (es.type) {
            Slot s{es.name.substr(es.name.rfind("::") + 2) + ".val", es.name + ".val", SlotKind::Latch, *es.type};
            es.latch_slot = add_slot(s);
        }
    }

    // Environment modules.
    if (cm.modules) {
        for (const auto& pm : cm.modules->modules) {
            PModuleProgram mp;
            mp.name = cm.modules->name + "::" + pm.name;
            for (const auto& v : pm.vars) {
                Slot s{"@" + v.name, mp.name + "::" + v.name, SlotKind::ModVar,
                       TypeRef{v.is_bool ? TypeKind::Bool : TypeKind::Int}};
                if (!v.is_bool) {
                    s.bounded = true;
                    s.lo = coerce(comp.eval_const(*v.lo), TypeRef{TypeKind::Int}, "lower bound of '@" + v.name + "'").r.num();
                    s.hi = coerce(comp.eval_const(*v.hi), TypeRef{TypeKind::Int}, "upper bound of '@" + v.name + "'").r.num();
                    if (s.hi < s.lo) throw Error("RANGE", "empty range for '@" + v.name + "'", v.pos);
                }
                mp.slots.push_back(add_slot(s));
            }
            P.pmodules.push_back(std::move(mp));
        }
    }

    // Initial values: variables, then pModule variables; latches default to 0 / false / first literal.
    for (std::size_t i = 0; i < idx.vars().size(); ++i) {
        const VarInfo& v = idx.vars()[i];
        Value init = type_default(v.type);
        if (v.init) {
            CExpr c = comp.model_expr(*v.init, v.owner);
            EvalEnv env{&P, P.initial.data(), false, false, nullptr};
            init = eval(c, env);
        } else if (v.type.kind == TypeKind::Bool) {
            init = Value::boolean(false);
        } else if (v.type.kind == TypeKind::Enum) {
            init = Value::enumeration(0);
        }
        P.initial[i] = P.encode(init, static_cast<int>(i));
    }
    for (auto& es : P.event_sets) {
        if (es.latch_slot < 0) continue;
        Value d = es.type->kind == TypeKind::Bool ? Value::boolean(false)
                  : es.type->kind == TypeKind::Enum ? Value::enumeration(0)
                                                    : Value::integer(0);
        P.initial[es.latch_slot] = P.encode(d, es.latch_slot);
    }
    if (cm.modules) {
        for (std::size_t k = 0; k < cm.modules->modules.size(); ++k) {
            const auto& pm = cm.modules->modules[k];
            for (std::size_t j = 0; j < pm.vars.size(); ++j) {
                int s = P.pmodules[k].slots[j];
                Value init = pm.vars[j].is_bool ? Value::boolean(false) : Value::integer(P.slots[s].lo);
                if (pm.vars[j].init) init = comp.eval_const(*pm.vars[j].init);
                P.initial[s] = P.encode(init, s);
            }
        }
    }

    // Machine control structure.
    for (std::size_t mi = 0; mi < P.machines.size(); ++mi) {
        MachineProgram& mp = P.machines[mi];
        const StateMachine& sm = *idx.machines()[mi].sm;
        auto atoms = [&](const ActionPtr& a) {
            std::vector<CAction> out;
            for (const auto& x : flatten_seq(a))
                if (x->kind != ActionKind::Skip) out.push_back(comp.action(*x, mp.scope, mp));
            return out;
        };
        std::map<std::string, int> node_index;
        for (std::size_t i = 0; i < sm.nodes.size(); ++i) {
            const Node& n = sm.nodes[i];
            NodeInfo ni;
            ni.name = n.name;
            ni.kind = n.kind;
            if (n.entry) ni.entry = atoms(n.entry);
            if (n.exit) ni.exit = atoms(n.exit);
            node_index[n.name] = static_cast<int>(i);
            if (n.kind == NodeKind::Initial) mp.initial_node = static_cast<int>(i);
            mp.nodes.push_back(std::move(ni));
            mp.points.push_back(n.name);
            mp.roles.push_back(PointRole{PointRole::K::Node, static_cast<int>(i), 0});
        }
        for (std::size_t ti = 0; ti < sm.transitions.size(); ++ti) {
            const Transition& t = sm.transitions[ti];
            TransInfo info;
            info.id = t.id;
            info.source = node_index.at(t.source);
            info.target = node_index.at(t.target);
            if (t.guard) {
                info.has_guard = true;
                info.guard = comp.model_expr(*t.guard, mp.scope);
            }
            if (t.prob) {
                info.has_prob = true;
                info.prob = comp.model_expr(*t.prob, mp.scope);
            }
            if (t.trigger) {
                const Trigger& tr = *t.trigger;
                CTrigger ct;
                ct.event_set = mp.event_sets.at(tr.event);
                ct.dir = tr.dir;
                if (!tr.input_var.empty()) {
                    auto sym = idx.lookup(mp.scope, tr.input_var);
                    if (sym.kind != ModelIndex::Symbol::Kind::Var)
                        throw Error("SCOPE", "input variable '" + tr.input_var + "' is not a variable", tr.pos);
                    ct.input_slot = sym.index;
                }
                if (tr.output) {
                    ct.has_output = true;
                    ct.output = comp.model_expr(*tr.output, mp.scope);
                }
                info.trigger = std::move(ct);
            }
            if (t.action) info.atoms = atoms(t.action);
            if (!info.atoms.empty()) {
                info.act_point = static_cast<int>(mp.points.size());
                mp.points.push_back(t.id + "_act");
                mp.roles.push_back(PointRole{PointRole::K::TAct, static_cast<int>(ti), 0});
                for (std::size_t k = 1; k < info.atoms.size(); ++k) {
                    mp.points.push_back(t.id + "_act_" + std::to_string(k));
                    mp.roles.push_back(PointRole{PointRole::K::TAct, static_cast<int>(ti), static_cast<int>(k)});
                }
            }
            mp.trans.push_back(std::move(info));
        }
        for (std::size_t i = 0; i < mp.nodes.size(); ++i) {
            NodeInfo& ni = mp.nodes[i];
            if (!ni.entry.empty()) {
                ni.entering_point = static_cast<int>(mp.points.size());
                mp.points.push_back(ni.name + "_entering");
                mp.roles.push_back(PointRole{PointRole::K::Entry, static_cast<int>(i), 0});
                for (std::size_t k = 1; k < ni.entry.size(); ++k) {
                    mp.points.push_back(ni.name + "_a_e_" + std::to_string(k));
                    mp.roles.push_back(PointRole{PointRole::K::Entry, static_cast<int>(i), static_cast<int>(k)});
                }
            }
            if (!ni.exit.empty()) {
                ni.exit_point = static_cast<int>(mp.points.size());
                for (std::size_t k = 1; k <= ni.exit.size(); ++k) {
                    mp.points.push_back(ni.name + "_exit_" + std::to_string(k));
                    mp.roles.push_back(PointRole{PointRole::K::Exit, static_cast<int>(i), static_cast<int>(k)});
                }
            }
        }
        for (std::size_t ti = 0; ti < mp.trans.size(); ++ti) mp.nodes[mp.trans[ti].source].outgoing.push_back(static_cast<int>(ti));
        for (auto& ni : mp.nodes)
            std::sort(ni.outgoing.begin(), ni.outgoing.end(),
                      [&](int a, int b) { return mp.trans[a].id < mp.trans[b].id; });
        P.initial[mp.lk_slot] = 0;
        P.initial[mp.pc_slot] = mp.initial_node;
        if (mp.exit_slot >= 0) P.initial[mp.exit_slot] = EXIT_NONE;
    }

    // Environment module commands.
    if (cm.modules) {
        for (std::size_t k = 0; k < cm.modules->modules.size(); ++k) {
            const auto& pm = cm.modules->modules[k];
            PModuleProgram& mp = P.pmodules[k];
            int ci = 0;
            for (const auto& cmd : pm.commands) {
                PCommandProgram pc;
                pc.label = cm.modules->name + "." + pm.name + ".c" + std::to_string(++ci);
                if (cmd.sync) {
                    pc.sync_tag = comp.event_tag(*cmd.sync);
                    mp.alphabet.push_back(*pc.sync_tag);
                }
                pc.guard = cmd.guard ? comp.spec_expr(*cmd.guard) : lit(Value::boolean(true));
                for (const auto& alt : cmd.alternatives) {
                    PCommandProgram::Alt a;
                    a.prob = alt.prob ? comp.spec_expr(*alt.prob) : lit(Value::integer(1));
                    for (const auto& u : alt.updates) {
                        int s = -1;
                        for (std::size_t j = 0; j < pm.vars.size(); ++j)
                            if (pm.vars[j].name == u.var) s = mp.slots[j];
                        if (s < 0) throw Error("SCOPE", "module '" + pm.name + "' has no variable '@" + u.var + "'", u.pos);
                        a.updates.emplace_back(s, comp.spec_expr(*u.value));
                    }
                    pc.alts.push_back(std::move(a));
                }
                mp.commands.push_back(std::move(pc));
            }
            std::sort(mp.alphabet.begin(), mp.alphabet.end());
            mp.alphabet.erase(std::unique(mp.alphabet.begin(), mp.alphabet.end()), mp.alphabet.end());
        }
    }
    return prog;
}

}  // namespace rcprob
