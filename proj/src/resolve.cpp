#include "rcprob/resolve.h"

#include <deque>
#include <functional>
#include <set>

#include "json.hpp"

namespace rcprob {

const char* to_string(RefKind k) {
    switch (k) {
        case RefKind::Module: return "module";
        case RefKind::Platform: return "platform";
        case RefKind::Controller: return "controller";
        case RefKind::Machine: return "machine";
        case RefKind::State: return "state";
        case RefKind::Junction: return "junction";
        case RefKind::Transition: return "transition";
        case RefKind::Variable: return "variable";
        case RefKind::Constant: return "constant";
        case RefKind::Event: return "event";
        case RefKind::Function: return "function";
        case RefKind::Operation: return "operation";
        case RefKind::EnumLiteral: return "enum literal";
        case RefKind::SpecConstant: return "specification constant";
    }
    return "?";
}

std::string pretty(const ResolvedRef& r) {
    std::string out;
    for (std::size_t i = 0; i < r.path.size(); ++i) out += (i ? "::" : "") + r.path[i];
    return out;
}

std::string to_json_line(const Diagnostic& d) {
    nlohmann::ordered_json j;
    j["code"] = d.code;
    j["severity"] = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
    j["message"] = d.message;
    j["file"] = d.file;
    j["line"] = d.line;
    j["col"] = d.col;
    return j.dump();
}

bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Diagnostic::Severity::Error) return true;
    return false;
}

namespace {

Diagnostic make_diag(std::string code, std::string msg, SourcePos pos, const std::string& file,
                     Diagnostic::Severity sev = Diagnostic::Severity::Error) {
    return Diagnostic{sev, std::move(code), std::move(msg), file, pos.line, pos.col};
}

std::vector<std::string> extend(std::vector<std::string> p, const std::string& s) {
    p.push_back(s);
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Resolver

int Resolver::add(int parent, const std::string& name, ResolvedRef ref) {
    int id = static_cast<int>(ents_.size());
    ents_.push_back(Entity{name, {}, std::move(ref)});
    if (parent >= 0) ents_[parent].children.emplace(name, id);
    by_name_.emplace(name, id);
    return id;
}

void Resolver::alias(int parent, int child) { ents_[parent].children.emplace(ents_[child].name, child); }

Resolver::Resolver(const ModelAst& model, const SpecAst* spec) : model_(&model), spec_(spec), index_(model) {
    const auto& vars = index_.vars();
    const auto& consts = index_.consts();
    int root = add(-1, model.name, ResolvedRef{RefKind::Module, {model.name}});

    auto add_decls = [&](int parent, const std::vector<std::string>& base, const std::string& prefix, int machine) {
        std::vector<int> ids;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].path.rfind(prefix + "::", 0) != 0 || vars[i].path.size() != prefix.size() + 2 + vars[i].name.size())
                continue;
            ResolvedRef r{RefKind::Variable, extend(base, vars[i].name), vars[i].type, machine, static_cast<int>(i)};
            ids.push_back(add(parent, vars[i].name, r));
        }
        for (std::size_t i = 0; i < consts.size(); ++i) {
            if (consts[i].path.rfind(prefix + "::", 0) != 0 ||
                consts[i].path.size() != prefix.size() + 2 + consts[i].name.size())
                continue;
            ResolvedRef r{RefKind::Constant, extend(base, consts[i].name), consts[i].type, machine, static_cast<int>(i)};
            ids.push_back(add(parent, consts[i].name, r));
        }
        return ids;
    };
    auto add_events = [&](int parent, const std::vector<std::string>& base, const std::vector<EventDecl>& evs,
                          int machine) {
        for (const auto& e : evs) add(parent, e.name, ResolvedRef{RefKind::Event, extend(base, e.name), e.type, machine});
    };

    std::vector<std::vector<int>> platform_decls(model.platforms.size());
    for (std::size_t p = 0; p < model.platforms.size(); ++p) {
        const auto& pl = model.platforms[p];
        std::vector<std::string> base{model.name, pl.name};
        int id = add(root, pl.name, ResolvedRef{RefKind::Platform, base});
        platform_decls[p] = add_decls(id, base, model.name + "::" + pl.name, -1);
        add_events(id, base, pl.events, -1);
        for (const auto& f : pl.functions) add(id, f.name, ResolvedRef{RefKind::Function, extend(base, f.name), f.result});
        for (const auto& o : pl.operations) add(id, o.name, ResolvedRef{RefKind::Operation, extend(base, o.name)});
    }
    int mi = 0;
    for (std::size_t c = 0; c < model.controllers.size(); ++c) {
        const auto& ct = model.controllers[c];
        std::vector<std::string> cbase{model.name, ct.name};
        int cid = add(root, ct.name, ResolvedRef{RefKind::Controller, cbase});
        std::vector<int> cdecls = add_decls(cid, cbase, model.name + "::" + ct.name, -1);
        add_events(cid, cbase, ct.events, -1);
        std::vector<int> shared;
        for (int p : index_.required_platforms(static_cast<int>(c)))
            shared.insert(shared.end(), platform_decls[p].begin(), platform_decls[p].end());
        for (int s : shared) alias(cid, s);
        for (const auto& sm : ct.machines) {
            std::vector<std::string> mbase{model.name, ct.name, sm.name};
            int mid = add(cid, sm.name, ResolvedRef{RefKind::Machine, mbase, std::nullopt, mi});
            for (const auto& n : sm.nodes) {
                RefKind k = n.kind == NodeKind::State ? RefKind::State : RefKind::Junction;
                add(mid, n.name, ResolvedRef{k, extend(mbase, n.name), std::nullopt, mi});
            }
            for (const auto& t : sm.transitions)
                add(mid, t.id, ResolvedRef{RefKind::Transition, extend(mbase, t.id), std::nullopt, mi});
            add_decls(mid, mbase, model.name + "::" + ct.name + "::" + sm.name, mi);
            add_events(mid, mbase, sm.events, mi);
            for (const auto& f : sm.functions)
                add(mid, f.name, ResolvedRef{RefKind::Function, extend(mbase, f.name), f.result, mi});
            for (const auto& o : sm.operations)
                add(mid, o.name, ResolvedRef{RefKind::Operation, extend(mbase, o.name), std::nullopt, mi});
            for (int d : cdecls) alias(mid, d);
            for (int s : shared) alias(mid, s);
            ++mi;
        }
    }
}

std::optional<ResolvedRef> Resolver::resolve(const QualifiedName& qn, std::vector<Diagnostic>* diags,
                                             const std::string& file) const {
    auto report = [&](const char* code, const std::string& msg) {
        if (diags) diags->push_back(make_diag(code, msg, qn.pos, file));
    };
    if (qn.empty()) {
        report("SCOPE", "empty name");
        return std::nullopt;
    }
    const auto& segs = qn.segments;
    if (auto lit = index_.enum_literal(qn)) {
        ResolvedRef r{RefKind::EnumLiteral, segs, TypeRef{TypeKind::Enum, lit->first}, -1, lit->second, lit->first};
        return r;
    }
    if (segs.size() == 1 && spec_) {
        if (spec_->find<ConstantDecl>(segs[0])) return ResolvedRef{RefKind::SpecConstant, segs};
    }

    int cur = -1;
    bool head_known = true;
    if (segs[0] == model_->name) {
        cur = 0;
    } else {
        report("WFREF-1", "'" + qn.str() + "' must start with the module name '" + model_->name + "'");
        auto it = by_name_.find(segs[0]);
        if (it != by_name_.end()) {
            cur = it->second;
        } else {
            head_known = false;
            if (segs.size() == 1) {
                report("SCOPE", "unknown name '" + segs[0] + "'");
                return std::nullopt;
            }
        }
    }
    for (std::size_t i = 1; i < segs.size(); ++i) {
        if (head_known) {
            auto it = ents_[cur].children.find(segs[i]);
            if (it != ents_[cur].children.end()) {
                cur = it->second;
                continue;
            }
        }
        if (!head_known || by_name_.count(segs[i])) {
            report("WFREF-2", "in '" + qn.str() + "', '" + segs[i] + "' is not a child of '" + segs[i - 1] + "'");
        } else {
            report("SCOPE", "unknown name '" + segs[i] + "' in '" + qn.str() + "'");
        }
        return std::nullopt;
    }
    return ents_[cur].ref;
}

ResolveResult resolve_fqn(const ModelAst& model, const SpecAst& spec, const QualifiedName& qn) {
    Resolver r(model, &spec);
    ResolveResult out;
    out.ref = r.resolve(qn, &out.diagnostics);
    return out;
}

// ---------------------------------------------------------------------------
// Type classes

std::string TypeClass::str() const {
    auto name = [](Kind k) -> std::string {
        switch (k) {
            case Kind::Boolean: return "boolean";
            case Kind::Numeric: return "numeric";
            case Kind::Set: return "set";
            case Kind::Enum: return "enum";
            case Kind::FormulaQuery: return "formula query";
            case Kind::PathFormula: return "path formula";
            case Kind::RewardPath: return "reward path";
            case Kind::Entity: return "model element";
            case Kind::Any: return "any";
            case Kind::Error: return "error";
        }
        return "?";
    };
    if (kind == Kind::Enum) return "enum " + enum_name;
    if (kind == Kind::Set) return "set of " + (elem == Kind::Enum ? "enum " + enum_name : name(elem));
    return name(kind);
}

TypeClass type_class_of(const TypeRef& t) {
    switch (t.kind) {
        case TypeKind::Bool: return TypeClass::of(TypeClass::Kind::Boolean);
        case TypeKind::Enum: return TypeClass{TypeClass::Kind::Enum, t.enum_name, TypeClass::Kind::Any};
        default: return TypeClass::of(TypeClass::Kind::Numeric);
    }
}

const ConstantsConfig* property_constants(const SpecAst& spec, const ProbProperty& p) {
    using K = WithClause<ConstantsConfig>::Kind;
    if (p.constants.kind == K::Inline) return &p.constants.inline_value;
    if (p.constants.kind == K::Ref) return spec.find<ConstantsConfig>(p.constants.ref);
    return nullptr;
}

const DefinitionsDecl* property_definitions(const SpecAst& spec, const ProbProperty& p) {
    using K = WithClause<DefinitionsDecl>::Kind;
    if (p.definitions.kind == K::Inline) return &p.definitions.inline_value;
    if (p.definitions.kind == K::Ref) return spec.find<DefinitionsDecl>(p.definitions.ref);
    return nullptr;
}

const PModulesDecl* property_modules(const SpecAst& spec, const ProbProperty& p) {
    using K = WithClause<PModulesDecl>::Kind;
    if (p.modules.kind == K::Inline) return &p.modules.inline_value;
    if (p.modules.kind == K::Ref) return spec.find<PModulesDecl>(p.modules.ref);
    return nullptr;
}

namespace {

using TK = TypeClass::Kind;

bool is_k(const TypeClass& t, TK k) { return t.kind == k || t.kind == TK::Any; }

bool compatible(const TypeClass& a, const TypeClass& b) {
    if (a.kind == TK::Any || b.kind == TK::Any) return true;
    if (a.kind != b.kind) return false;
    if (a.kind == TK::Enum) return a.enum_name == b.enum_name;
    if (a.kind == TK::Set) return a.elem == b.elem && a.enum_name == b.enum_name;
    return true;
}

struct Ctx {
    const ProbProperty* prop = nullptr;
    const DefinitionsDecl* defs = nullptr;
    const PModulesDecl* mods = nullptr;
    const std::vector<std::string>* params = nullptr;  // pfunction / poperation parameters
    const std::vector<Param>* model_params = nullptr;  // model function parameters
    std::optional<Owner> model_scope;                  // set for model-side expressions
    bool inside_path = false;
    bool top = false;
};

class Checker {
   public:
    Checker(const Resolver& r, std::vector<Diagnostic>& out, std::string file)
        : r_(r), out_(out), file_(std::move(file)) {}

    void set_file(std::string f) { file_ = std::move(f); }

    TypeClass err(const char* code, const std::string& msg, SourcePos pos) {
        out_.push_back(make_diag(code, msg, pos, file_));
        return TypeClass::of(TK::Error);
    }
    void warn(const char* code, const std::string& msg, SourcePos pos) {
        out_.push_back(make_diag(code, msg, pos, file_, Diagnostic::Severity::Warning));
    }

    TypeClass check(const Expr& e, const Ctx& ctx);

    std::optional<ResolvedRef> resolve(const QualifiedName& qn) { return r_.resolve(qn, &out_, file_); }

    /// `@v` lookup within the given modules declaration (or any, when null).
    const PVar* mod_var(const QualifiedName& qn, const PModulesDecl* mods) const {
        auto search = [&](const PModulesDecl& d) -> const PVar* {
            if (qn.segments.size() == 3 && qn.segments[0] != d.name) return nullptr;
            for (const auto& m : d.modules) {
                if (qn.segments.size() == 3 && qn.segments[1] != m.name) continue;
                for (const auto& v : m.vars)
                    if (v.name == qn.segments.back()) return &v;
            }
            return nullptr;
        };
        if (mods) return search(*mods);
        if (!r_.spec()) return nullptr;
        for (const auto* d : r_.spec()->all<PModulesDecl>())
            if (const PVar* v = search(*d)) return v;
        return nullptr;
    }

   private:
    TypeClass check_name(const Expr& e, const Ctx& ctx);
    TypeClass check_call(const Expr& e, const Ctx& ctx);
    TypeClass check_unary(const Expr& e, const Ctx& ctx);
    TypeClass check_binary(const Expr& e, const Ctx& ctx);
    TypeClass check_quantified(const Expr& e, const Ctx& ctx);
    TypeClass check_temporal(const Expr& e, const Ctx& ctx);
    void check_bound(const Bound& b, const Ctx& ctx);
    void check_sim(const Expr& e, const Ctx& ctx);

    const Resolver& r_;
    std::vector<Diagnostic>& out_;
    std::string file_;
    std::set<std::string> visiting_;  // recursion guard for formulas/constants/functions
};

Ctx sub(const Ctx& c) {
    Ctx s = c;
    s.top = false;
    return s;
}

TypeClass Checker::check(const Expr& e, const Ctx& ctx) {
    switch (e.kind) {
        case ExprKind::BoolLit: return TypeClass::of(TK::Boolean);
        case ExprKind::NumLit: return TypeClass::of(TK::Numeric);
        case ExprKind::Name: return check_name(e, ctx);
        case ExprKind::Call: return check_call(e, ctx);
        case ExprKind::Unary: return check_unary(e, ctx);
        case ExprKind::Binary: return check_binary(e, ctx);
        case ExprKind::Ite: {
            Ctx s = sub(ctx);
            TypeClass c = check(*e.children[0], s);
            TypeClass a = check(*e.children[1], s);
            TypeClass b = check(*e.children[2], s);
            if (c.kind == TK::Error || a.kind == TK::Error || b.kind == TK::Error) return TypeClass::of(TK::Error);
            if (!is_k(c, TK::Boolean)) return err("TYPE", "condition of 'if' must be boolean, got " + c.str(), e.pos);
            if (!compatible(a, b))
                return err("TYPE", "branches of 'if' have different types (" + a.str() + ", " + b.str() + ")", e.pos);
            return a.kind == TK::Any ? b : a;
        }
        case ExprKind::SetExt: {
            TypeClass elem = TypeClass::of(TK::Any);
            bool bad = false;
            for (const auto& c : e.children) {
                TypeClass t = check(*c, sub(ctx));
                if (t.kind == TK::Error) return t;
                if (!compatible(elem, t)) bad = true;
                if (elem.kind == TK::Any) elem = t;
            }
            if (bad) return err("WFExp-4", "set extension mixes element types", e.pos);
            return TypeClass{TK::Set, elem.enum_name, elem.kind};
        }
        case ExprKind::SetRange: {
            for (const auto& c : e.children) {
                TypeClass t = check(*c, sub(ctx));
                if (t.kind == TK::Error) return t;
                if (!is_k(t, TK::Numeric)) return err("WFExp-3", "range bounds must be numeric, got " + t.str(), c->pos);
            }
            return TypeClass{TK::Set, {}, TK::Numeric};
        }
        case ExprKind::IsIn: {
            auto l = resolve(e.name);
            auto r = resolve(e.name2);
            if (!l || !r) return TypeClass::of(TK::Error);
            if (l->kind != RefKind::Machine)
                return err("WFExp-5", "left operand of 'is in' must be a state machine, got " + std::string(to_string(l->kind)),
                           e.pos);
            // Junctions are accepted too so that pc=i0 style propositions stay expressible.
            bool node = r->kind == RefKind::State || r->kind == RefKind::Junction;
            bool child = node && r->machine == l->machine && r->path.size() == l->path.size() + 1;
            if (!child)
                return err("WFExp-5", "'" + pretty(*r) + "' is not an immediate node of '" + pretty(*l) + "'", e.pos);
            return TypeClass::of(TK::Boolean);
        }
        case ExprKind::ModVar: {
            bool restricted = ctx.prop != nullptr || ctx.mods != nullptr;
            const PVar* v = restricted ? (ctx.mods ? mod_var(e.name, ctx.mods) : nullptr) : mod_var(e.name, nullptr);
            if (!v) {
                std::string where = ctx.prop ? " among the modules of property '" + ctx.prop->name + "'" : "";
                return err("SCOPE", "unknown module variable '@" + e.name.str() + "'" + where, e.pos);
            }
            return TypeClass::of(v->is_bool ? TK::Boolean : TK::Numeric);
        }
        case ExprKind::LabelRef: {
            const std::string& n = e.name.segments[0];
            if (n == "deadlock" || n == "init") return TypeClass::of(TK::Boolean);
            if (!r_.spec() || !r_.spec()->find<LabelDecl>(n)) return err("SCOPE", "unknown label '#" + n + "'", e.pos);
            return TypeClass::of(TK::Boolean);
        }
        case ExprKind::FormulaRef: {
            const std::string& n = e.name.segments[0];
            const FormulaDecl* f = r_.spec() ? r_.spec()->find<FormulaDecl>(n) : nullptr;
            if (!f) return err("SCOPE", "unknown formula '`" + n + "'", e.pos);
            std::string key = "formula:" + n;
            if (visiting_.count(key)) return err("TYPE", "formula '" + n + "' is defined in terms of itself", e.pos);
            visiting_.insert(key);
            std::vector<Diagnostic> scratch;
            std::swap(scratch, out_);
            TypeClass t = check(*f->body, sub(ctx));
            std::swap(scratch, out_);  // body diagnostics are reported at the declaration
            visiting_.erase(key);
            return t.kind == TK::Error ? TypeClass::of(TK::Any) : t;
        }
        case ExprKind::ParamRef: {
            const std::string& n = e.name.segments[0];
            if (!ctx.params || std::find(ctx.params->begin(), ctx.params->end(), n) == ctx.params->end())
                return err("SCOPE", "unknown parameter '$$" + n + "'", e.pos);
            return TypeClass::of(TK::Any);
        }
        case ExprKind::EventVal: {
            auto r = resolve(e.event.name);
            if (!r) return TypeClass::of(TK::Error);
            if (r->kind != RefKind::Event) return err("TYPE", "'" + pretty(*r) + "' is not an event", e.pos);
            if (!r->type) return err("TYPE", "event '" + pretty(*r) + "' carries no value; '.val' is undefined", e.pos);
            return type_class_of(*r->type);
        }
        case ExprKind::Index:
            return err("UNSUPPORTED", "array indexing is not supported", e.pos);
        case ExprKind::Prob:
        case ExprKind::Reward:
        case ExprKind::Forall:
        case ExprKind::Exists:
            return check_quantified(e, ctx);
        case ExprKind::Temporal:
            return check_temporal(e, ctx);
        case ExprKind::RewardPath:
            return TypeClass::of(TK::RewardPath);
    }
    return TypeClass::of(TK::Error);
}

TypeClass Checker::check_name(const Expr& e, const Ctx& ctx) {
    const auto& segs = e.name.segments;
    if (ctx.model_scope) {
        if (segs.size() == 1 && ctx.model_params) {
            for (const auto& p : *ctx.model_params)
                if (p.name == segs[0]) return type_class_of(p.type);
        }
        if (segs.size() == 2) {
            if (auto lit = r_.index().enum_literal(e.name))
                return TypeClass{TK::Enum, lit->first, TK::Any};
            return err("SCOPE", "unknown enumeration literal '" + e.name.str() + "'", e.pos);
        }
        auto sym = r_.index().lookup(*ctx.model_scope, segs[0]);
        if (sym.kind == ModelIndex::Symbol::Kind::Var) return type_class_of(r_.index().vars()[sym.index].type);
        if (sym.kind == ModelIndex::Symbol::Kind::Const) return type_class_of(r_.index().consts()[sym.index].type);
        return err("SCOPE", "unknown name '" + segs[0] + "'", e.pos);
    }
    auto r = resolve(e.name);
    if (!r) return TypeClass::of(TK::Error);
    switch (r->kind) {
        case RefKind::Variable:
        case RefKind::Constant:
            return type_class_of(*r->type);
        case RefKind::EnumLiteral:
            return TypeClass{TK::Enum, r->enum_name, TK::Any};
        case RefKind::SpecConstant: {
            const ConstantDecl* c = r_.spec()->find<ConstantDecl>(segs[0]);
            std::string key = "const:" + c->name;
            if (visiting_.count(key)) return err("TYPE", "constant '" + c->name + "' is defined in terms of itself", e.pos);
            visiting_.insert(key);
            std::vector<Diagnostic> scratch;
            std::swap(scratch, out_);
            TypeClass t = check(*c->value, Ctx{});
            std::swap(scratch, out_);
            visiting_.erase(key);
            return t.kind == TK::Error ? TypeClass::of(TK::Any) : t;
        }
        default:
            return TypeClass::of(TK::Entity);
    }
}

TypeClass Checker::check_call(const Expr& e, const Ctx& ctx) {
    const std::string& n = e.name.segments[0];
    std::vector<TypeClass> args;
    for (const auto& a : e.children) {
        args.push_back(check(*a, sub(ctx)));
        if (args.back().kind == TK::Error) return args.back();
    }
    auto arity = [&](std::size_t want) -> bool {
        if (want == args.size()) return true;
        err("TYPE", "'" + n + "' expects " + std::to_string(want) + " argument(s), got " + std::to_string(args.size()),
            e.pos);
        return false;
    };
    if (ctx.model_scope) {
        const FunctionDecl* f = r_.index().function(*ctx.model_scope, n);
        if (!f) return err("SCOPE", "unknown function '" + n + "'", e.pos);
        if (!arity(f->params.size())) return TypeClass::of(TK::Error);
        for (std::size_t i = 0; i < args.size(); ++i)
            if (!compatible(args[i], type_class_of(f->params[i].type)))
                return err("TYPE", "argument " + std::to_string(i + 1) + " of '" + n + "' must be " +
                                       type_class_of(f->params[i].type).str() + ", got " + args[i].str(),
                           e.children[i]->pos);
        return type_class_of(f->result);
    }
    const PFunction* pf = nullptr;
    if (ctx.defs) pf = ctx.defs->find_function(n);
    if (!pf && !ctx.prop && r_.spec()) {
        for (const auto* d : r_.spec()->all<DefinitionsDecl>())
            if ((pf = d->find_function(n))) break;
    }
    if (pf) {
        if (!arity(pf->params.size())) return TypeClass::of(TK::Error);
        std::string key = "fn:" + n;
        if (visiting_.count(key)) return TypeClass::of(TK::Any);  // recursion: type is the body's
        visiting_.insert(key);
        std::vector<Diagnostic> scratch;
        std::swap(scratch, out_);
        Ctx body;
        body.params = &pf->params;
        body.defs = ctx.defs;
        TypeClass t = check(*pf->body, body);
        std::swap(scratch, out_);
        visiting_.erase(key);
        return t.kind == TK::Error ? TypeClass::of(TK::Any) : t;
    }
    // A model function (e.g. a loose one with a result type) may also be called from a specification.
    for (std::size_t m = 0; m < r_.index().machines().size(); ++m) {
        if (const FunctionDecl* f = r_.index().function(r_.index().machine_owner(static_cast<int>(m)), n)) {
            if (!arity(f->params.size())) return TypeClass::of(TK::Error);
            return type_class_of(f->result);
        }
    }
    return err("SCOPE", "unknown function '&" + n + "'", e.pos);
}

TypeClass Checker::check_unary(const Expr& e, const Ctx& ctx) {
    TypeClass a = check(*e.children[0], sub(ctx));
    if (a.kind == TK::Error) return a;
    if (e.op == Op::Not) {
        if (is_k(a, TK::Boolean)) return TypeClass::of(TK::Boolean);
        if (ctx.inside_path && a.kind == TK::PathFormula) return a;
        return err("WFExp-1", "operand of 'not' must be boolean, got " + a.str(), e.pos);
    }
    if (!is_k(a, TK::Numeric)) return err("WFExp-3", "operand of unary '-' must be numeric, got " + a.str(), e.pos);
    return TypeClass::of(TK::Numeric);
}

TypeClass Checker::check_binary(const Expr& e, const Ctx& ctx) {
    TypeClass a = check(*e.children[0], sub(ctx));
    TypeClass b = check(*e.children[1], sub(ctx));
    if (a.kind == TK::Error || b.kind == TK::Error) return TypeClass::of(TK::Error);
    const std::string sym = op_symbol(e.op);
    switch (e.op) {
        case Op::And:
        case Op::Or:
        case Op::Implies:
        case Op::Iff: {
            auto logical = [&](const TypeClass& t) {
                return is_k(t, TK::Boolean) || (ctx.inside_path && t.kind == TK::PathFormula);
            };
            if (!logical(a) || !logical(b))
                return err("WFExp-1",
                           "operands of '" + sym + "' must be boolean, got " + a.str() + " and " + b.str(), e.pos);
            if (a.kind == TK::PathFormula || b.kind == TK::PathFormula) return TypeClass::of(TK::PathFormula);
            return TypeClass::of(TK::Boolean);
        }
        case Op::Eq:
        case Op::Neq: {
            auto comparable = [](const TypeClass& t) {
                return t.kind == TK::Any || t.kind == TK::Boolean || t.kind == TK::Numeric || t.kind == TK::Enum;
            };
            if (!comparable(a) || !comparable(b) || !compatible(a, b))
                return err("WFExp-2",
                           "operands of '" + sym + "' must have the same type, got " + a.str() + " and " + b.str(),
                           e.pos);
            return TypeClass::of(TK::Boolean);
        }
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
            if (!is_k(a, TK::Numeric) || !is_k(b, TK::Numeric))
                return err("WFExp-3",
                           "operands of '" + sym + "' must be numeric, got " + a.str() + " and " + b.str(), e.pos);
            return TypeClass::of(TK::Boolean);
        default:
            if (!is_k(a, TK::Numeric) || !is_k(b, TK::Numeric))
                return err("WFExp-3",
                           "operands of '" + sym + "' must be numeric, got " + a.str() + " and " + b.str(), e.pos);
            return TypeClass::of(TK::Numeric);
    }
}

void Checker::check_bound(const Bound& b, const Ctx& ctx) {
    if (!b.value) return;
    Ctx s = sub(ctx);
    s.inside_path = false;
    TypeClass t = check(*b.value, s);
    if (t.kind != TK::Error && !is_k(t, TK::Numeric))
        err("WFExp-7", "bound must be numeric, got " + t.str(), b.value->pos);
}

void Checker::check_sim(const Expr& e, const Ctx& ctx) {
    const SimMethodSpec& s = *e.sim;
    Ctx c = sub(ctx);
    c.inside_path = false;
    for (const ExprPtr* p : {&s.w, &s.alpha, &s.n, &s.epsilon, &s.delta, &s.pathlen}) {
        if (!*p) continue;
        TypeClass t = check(**p, c);
        if (t.kind != TK::Error && !is_k(t, TK::Numeric))
            err("TYPE", "simulation parameter must be numeric, got " + t.str(), (*p)->pos);
    }
    if (s.method == SimMethod::SPRT && !e.bound) err("TYPE", "SPRT needs a probability bound, not a query", s.pos);
    if (e.kind == ExprKind::Reward && s.method == SimMethod::SPRT)
        err("UNSUPPORTED", "SPRT applies to probability operators only", s.pos);
}

TypeClass Checker::check_quantified(const Expr& e, const Ctx& ctx) {
    if (e.query && !ctx.top) err("WFProp-1", "a query may only appear as the whole body of a property", e.pos);
    if (e.bound) check_bound(*e.bound, ctx);
    if (e.sim) check_sim(e, ctx);
    const Expr& body = *e.children[0];
    const char* what = e.kind == ExprKind::Prob ? "Prob" : e.kind == ExprKind::Forall ? "Forall" : "Exists";
    if (e.kind == ExprKind::Reward) {
        const SpecAst* spec = r_.spec();
        if (e.name.empty()) {
            if (!spec || spec->all<RewardsDecl>().size() != 1)
                err("SCOPE", "Reward without '{name}' needs exactly one rewards declaration", e.pos);
        } else if (!spec || !spec->find<RewardsDecl>(e.name.segments[0])) {
            err("SCOPE", "unknown rewards structure '" + e.name.segments[0] + "'", e.name.pos);
        }
        Ctx s = sub(ctx);
        if (body.op == Op::Ltl) {
            s.inside_path = true;
            TypeClass t = check(*body.children[0], s);
            if (t.kind != TK::Error && t.kind != TK::PathFormula)
                err("TYPE", "LTL reward operand must be a path formula, got " + t.str(), body.pos);
        } else if (body.op == Op::Reachable || body.op == Op::Cumul) {
            s.inside_path = false;
            TypeClass t = check(*body.children[0], s);
            TK want = body.op == Op::Reachable ? TK::Boolean : TK::Numeric;
            if (t.kind != TK::Error && !is_k(t, want))
                err("TYPE", std::string(body.op == Op::Reachable ? "Reachable" : "Cumul") + " operand must be " +
                                TypeClass::of(want).str() + ", got " + t.str(),
                    body.pos);
        }
        return TypeClass::of(e.query ? TK::FormulaQuery : TK::Boolean);
    }
    Ctx s = sub(ctx);
    s.inside_path = true;
    TypeClass t = check(body, s);
    if (t.kind != TK::Error && t.kind != TK::PathFormula)
        err("WFExp-6", std::string("operand of ") + what + " must be a path formula, got " + t.str(), body.pos);
    return TypeClass::of(e.query ? TK::FormulaQuery : TK::Boolean);
}

TypeClass Checker::check_temporal(const Expr& e, const Ctx& ctx) {
    if (e.bound) check_bound(*e.bound, ctx);
    bool bad = false;
    for (const auto& c : e.children) {
        TypeClass t = check(*c, sub(ctx));
        if (t.kind == TK::Error) return t;
        if (!is_k(t, TK::Boolean) && t.kind != TK::PathFormula) bad = true;
    }
    if (bad) return err("WFExp-1", std::string("operands of '") + op_symbol(e.op) + "' must be boolean", e.pos);
    return TypeClass::of(TK::PathFormula);
}

// ---------------------------------------------------------------------------
// Model-side validation

class ModelValidator {
   public:
    ModelValidator(const Resolver& r, std::vector<Diagnostic>& out, const std::string& file)
        : r_(r), ck_(r, out, file), out_(out), file_(file) {}

    void run();

   private:
    TypeClass expr(const Expr& e, const Owner& scope, const std::vector<Param>* params = nullptr) {
        Ctx c;
        c.model_scope = scope;
        c.model_params = params;
        return ck_.check(e, c);
    }
    void expect(const Expr& e, const TypeClass& want, const Owner& scope, const std::string& what) {
        TypeClass t = expr(e, scope);
        if (t.kind != TK::Error && !compatible(t, want))
            ck_.err("TYPE", what + " must be " + want.str() + ", got " + t.str(), e.pos);
    }
    void decls(const std::vector<ConstDecl>& cs, const std::vector<VarDecl>& vs, const Owner& scope);
    void action(const Action& a, const Owner& scope, const StateMachine& sm);
    void machine(int mi);
    void connection(const Connection& c, const std::vector<const EventDecl*>& from,
                    const std::vector<const EventDecl*>& to);
    const EventDecl* event_of(const std::string& node, const std::string& ev) const;

    const Resolver& r_;
    Checker ck_;
    std::vector<Diagnostic>& out_;
    std::string file_;
};

void ModelValidator::decls(const std::vector<ConstDecl>& cs, const std::vector<VarDecl>& vs, const Owner& scope) {
    for (const auto& c : cs)
        if (c.value) expect(*c.value, type_class_of(c.type), scope, "value of constant '" + c.name + "'");
    for (const auto& v : vs)
        if (v.init) expect(*v.init, type_class_of(v.type), scope, "initial value of '" + v.name + "'");
}

void ModelValidator::action(const Action& a, const Owner& scope, const StateMachine& sm) {
    switch (a.kind) {
        case ActionKind::Skip: return;
        case ActionKind::Assign: {
            auto sym = r_.index().lookup(scope, a.target);
            if (sym.kind == ModelIndex::Symbol::Kind::None) {
                ck_.err("SCOPE", "assignment to unknown variable '" + a.target + "'", a.pos);
                return;
            }
            if (sym.kind == ModelIndex::Symbol::Kind::Const) {
                ck_.err("TYPE", "cannot assign to constant '" + a.target + "'", a.pos);
                return;
            }
            expect(*a.value, type_class_of(r_.index().vars()[sym.index].type), scope,
                   "value assigned to '" + a.target + "'");
            return;
        }
        case ActionKind::Comm: {
            const EventDecl* ev = sm.find_event(a.target);
            if (!ev) {
                ck_.err("SCOPE", "event '" + a.target + "' is not declared in machine '" + sm.name + "'", a.pos);
                return;
            }
            if (a.value) {
                if (!ev->type) ck_.err("TYPE", "event '" + a.target + "' carries no value", a.pos);
                else expect(*a.value, type_class_of(*ev->type), scope, "value sent on '" + a.target + "'");
            }
            if (!a.input_var.empty()) {
                auto sym = r_.index().lookup(scope, a.input_var);
                if (sym.kind != ModelIndex::Symbol::Kind::Var)
                    ck_.err("SCOPE", "input variable '" + a.input_var + "' is not a variable", a.pos);
                else if (!ev->type)
                    ck_.err("TYPE", "event '" + a.target + "' carries no value", a.pos);
                else if (!compatible(type_class_of(r_.index().vars()[sym.index].type), type_class_of(*ev->type)))
                    ck_.err("TYPE", "input variable '" + a.input_var + "' does not match the type of '" + a.target + "'",
                            a.pos);
            }
            return;
        }
        case ActionKind::Call: {
            const OperationDecl* op = r_.index().operation(scope, a.target);
            if (!op) {
                ck_.err("SCOPE", "unknown operation '" + a.target + "'", a.pos);
                return;
            }
            if (op->params.size() != a.args.size())
                ck_.err("TYPE", "'" + a.target + "' expects " + std::to_string(op->params.size()) + " argument(s)", a.pos);
            for (std::size_t i = 0; i < a.args.size() && i < op->params.size(); ++i)
                expect(*a.args[i], type_class_of(op->params[i].type), scope, "argument of '" + a.target + "'");
            return;
        }
        case ActionKind::Seq:
            for (const auto& c : a.children) action(*c, scope, sm);
            return;
        case ActionKind::If:
            expect(*a.value, TypeClass::of(TK::Boolean), scope, "condition of 'if'");
            for (const auto& c : a.children)
                if (c) action(*c, scope, sm);
            return;
    }
}

void ModelValidator::machine(int mi) {
    const MachineInfo& info = r_.index().machines()[mi];
    const StateMachine& sm = *info.sm;
    Owner scope = r_.index().machine_owner(mi);
    decls(sm.constants, sm.variables, scope);
    for (const auto& f : sm.functions) {
        if (!f.body) continue;
        Ctx c;
        c.model_scope = scope;
        c.model_params = &f.params;
        TypeClass t = ck_.check(*f.body, c);
        if (t.kind != TK::Error && !compatible(t, type_class_of(f.result)))
            ck_.err("TYPE", "body of '" + f.name + "' must be " + type_class_of(f.result).str() + ", got " + t.str(),
                    f.body->pos);
    }
    for (const auto& n : sm.nodes) {
        if (n.entry) action(*n.entry, scope, sm);
        if (n.exit) action(*n.exit, scope, sm);
    }
    for (const auto& t : sm.transitions) {
        if (t.guard) expect(*t.guard, TypeClass::of(TK::Boolean), scope, "guard of '" + t.id + "'");
        if (t.prob) expect(*t.prob, TypeClass::of(TK::Numeric), scope, "probability of '" + t.id + "'");
        if (t.action) action(*t.action, scope, sm);
        if (t.trigger) {
            const Trigger& tr = *t.trigger;
            const EventDecl* ev = sm.find_event(tr.event);
            if (!ev) continue;  // rejected by the parser
            if ((!tr.input_var.empty() || tr.output) && !ev->type)
                ck_.err("TYPE", "event '" + tr.event + "' carries no value", tr.pos);
            if (!tr.input_var.empty() && ev->type) {
                auto sym = r_.index().lookup(scope, tr.input_var);
                if (sym.kind != ModelIndex::Symbol::Kind::Var)
                    ck_.err("SCOPE", "input variable '" + tr.input_var + "' is not a variable", tr.pos);
                else if (!compatible(type_class_of(r_.index().vars()[sym.index].type), type_class_of(*ev->type)))
                    ck_.err("TYPE", "input variable '" + tr.input_var + "' does not match the type of '" + tr.event + "'",
                            tr.pos);
            }
            if (tr.output && ev->type) expect(*tr.output, type_class_of(*ev->type), scope, "value sent on '" + tr.event + "'");
        }
    }
    // Nodes not reachable from the initial junction along transitions.
    std::set<std::string> seen{sm.initial().name};
    std::deque<std::string> work{sm.initial().name};
    while (!work.empty()) {
        std::string n = work.front();
        work.pop_front();
        for (const auto& t : sm.transitions)
            if (t.source == n && seen.insert(t.target).second) work.push_back(t.target);
    }
    for (const auto& n : sm.nodes)
        if (!seen.count(n.name))
            ck_.warn("UNREACHABLE", "node '" + n.name + "' of '" + sm.name + "' is unreachable from its initial junction",
                     n.pos);
}

const EventDecl* ModelValidator::event_of(const std::string& node, const std::string& ev) const {
    const ModelAst& m = r_.model();
    for (const auto& p : m.platforms)
        if (p.name == node)
            for (const auto& e : p.events)
                if (e.name == ev) return &e;
    for (const auto& c : m.controllers) {
        if (c.name == node) return c.find_event(ev);
        for (const auto& sm : c.machines)
            if (sm.name == node) return sm.find_event(ev);
    }
    return nullptr;
}

void ModelValidator::run() {
    const ModelAst& m = r_.model();
    for (std::size_t p = 0; p < m.platforms.size(); ++p) {
        const auto& pl = m.platforms[p];
        decls(pl.constants, pl.variables, Owner{static_cast<int>(p), -1, -1});
        for (const auto& f : pl.functions) {
            if (!f.body) continue;
            Ctx c;
            c.model_scope = Owner{static_cast<int>(p), -1, -1};
            c.model_params = &f.params;
            TypeClass t = ck_.check(*f.body, c);
            if (t.kind != TK::Error && !compatible(t, type_class_of(f.result)))
                ck_.err("TYPE", "body of '" + f.name + "' must be " + type_class_of(f.result).str(), f.body->pos);
        }
    }
    for (std::size_t c = 0; c < m.controllers.size(); ++c)
        decls(m.controllers[c].constants, m.controllers[c].variables, Owner{-1, static_cast<int>(c), -1});
    for (std::size_t mi = 0; mi < r_.index().machines().size(); ++mi) machine(static_cast<int>(mi));

    auto conn = [&](const Connection& c) {
        if (c.async) ck_.err("UNSUPPORTED", "asynchronous connections are not supported", c.pos);
        const EventDecl* a = event_of(c.from.node, c.from.event);
        const EventDecl* b = event_of(c.to.node, c.to.event);
        if (a && b && !(a->type.has_value() == b->type.has_value() && (!a->type || *a->type == *b->type)))
            ck_.err("TYPE", "connection " + c.from.str() + " -> " + c.to.str() + " joins events of different types", c.pos);
    };
    for (const auto& c : m.controllers)
        for (const auto& cn : c.connections) conn(cn);
    for (const auto& cn : m.connections) conn(cn);
}

// ---------------------------------------------------------------------------
// Spec-side validation

class SpecValidator {
   public:
    SpecValidator(const Resolver& r, std::vector<Diagnostic>& out, const ValidateOptions& opts)
        : r_(r), ck_(r, out, opts.spec_file), out_(out), opts_(opts), loose_(loose_symbols(r.model())) {}

    void run();

   private:
    void constants_config(const ConstantsConfig& cfg);
    void definitions(const DefinitionsDecl& d);
    void pmodules(const PModulesDecl& d);
    void rewards(const RewardsDecl& d);
    void property(const ProbProperty& p);
    void event_ref(const EventRef& ev, SourcePos pos);
    void collect_modvars(const Expr& e, std::vector<const Expr*>& out, std::set<std::string>& seen,
                         bool indirect) const;

    template <typename T>
    bool with_ref(const WithClause<T>& w, const char* code, const char* kind);

    const Resolver& r_;
    Checker ck_;
    std::vector<Diagnostic>& out_;
    const ValidateOptions& opts_;
    LooseSymbols loose_;
};

void SpecValidator::event_ref(const EventRef& ev, SourcePos pos) {
    auto r = ck_.resolve(ev.name);
    if (r && r->kind != RefKind::Event) ck_.err("TYPE", "'" + pretty(*r) + "' is not an event", pos);
}

void SpecValidator::constants_config(const ConstantsConfig& cfg) {
    std::set<std::string> seen;
    for (const auto& entry : cfg.entries) {
        auto r = ck_.resolve(entry.name);
        if (!r) continue;
        if (r->kind != RefKind::Constant) {
            ck_.err("TYPE", "'" + pretty(*r) + "' is not a model constant", entry.name.pos);
            continue;
        }
        if (!seen.insert(pretty(*r)).second)
            ck_.err("DUPLICATE", "constant '" + pretty(*r) + "' is set twice in '" + cfg.name + "'", entry.name.pos);
        TypeClass want = type_class_of(*r->type);
        const ValueSpec& vs = entry.spec;
        Ctx c;
        auto value = [&](const Expr& e) {
            TypeClass t = ck_.check(e, c);
            if (t.kind != TK::Error && !compatible(t, want))
                ck_.err("TYPE", "value for '" + pretty(*r) + "' must be " + want.str() + ", got " + t.str(), e.pos);
        };
        if (vs.kind == ValueSpec::Kind::FromSet && vs.values.size() > 1) {
            // The set itself must be homogeneous before its elements are matched against the constant.
            TypeClass first = ck_.check(*vs.values[0], c);
            bool mixed = false;
            for (std::size_t i = 1; i < vs.values.size() && first.kind != TK::Error; ++i) {
                TypeClass t = ck_.check(*vs.values[i], c);
                if (t.kind != TK::Error && !compatible(first, t)) mixed = true;
            }
            if (mixed) {
                ck_.err("WFExp-4", "set of values for '" + pretty(*r) + "' mixes element types", vs.pos);
                continue;
            }
        }
        for (const auto& v : vs.values) value(*v);
        if (vs.kind == ValueSpec::Kind::Range) {
            if (want.kind != TK::Numeric) {
                ck_.err("TYPE", "a range can only be given for numeric constant '" + pretty(*r) + "'", vs.pos);
                continue;
            }
            for (const ExprPtr* p : {&vs.lo, &vs.hi, &vs.step}) value(**p);
            if (vs.step->kind == ExprKind::NumLit && vs.step->number <= Rational(0))
                ck_.err("TYPE", "range step must be positive", vs.step->pos);
            if (vs.lo->kind == ExprKind::NumLit && vs.hi->kind == ExprKind::NumLit && vs.hi->number < vs.lo->number)
                ck_.err("TYPE", "empty range: lower bound exceeds upper bound", vs.pos);
        }
        if (r->type->kind == TypeKind::Nat) {
            for (const auto& v : vs.values)
                if (v->kind == ExprKind::Unary && v->op == Op::Neg)
                    ck_.err("TYPE", "negative value for nat constant '" + pretty(*r) + "'", v->pos);
        }
    }
}

void SpecValidator::definitions(const DefinitionsDecl& d) {
    for (const auto& f : d.functions) {
        Ctx c;
        c.params = &f.params;
        c.defs = &d;
        ck_.check(*f.body, c);
    }
    for (const auto& op : d.operations) {
        for (const auto& a : op.body) {
            auto r = ck_.resolve(a.target);
            Ctx c;
            c.params = &op.params;
            c.defs = &d;
            TypeClass t = ck_.check(*a.value, c);
            if (!r) continue;
            if (r->kind != RefKind::Variable) {
                ck_.err("TYPE", "'" + pretty(*r) + "' is not a variable", a.pos);
                continue;
            }
            if (t.kind != TK::Error && !compatible(t, type_class_of(*r->type)))
                ck_.err("TYPE", "value assigned to '" + pretty(*r) + "' must be " + type_class_of(*r->type).str(), a.pos);
        }
    }
}

void SpecValidator::pmodules(const PModulesDecl& d) {
    Ctx c;
    c.mods = &d;
    for (const auto& m : d.modules) {
        for (const auto& v : m.vars) {
            for (const ExprPtr* p : {&v.lo, &v.hi}) {
                if (!*p) continue;
                TypeClass t = ck_.check(**p, c);
                if (t.kind != TK::Error && !is_k(t, TK::Numeric)) ck_.err("TYPE", "range bound must be numeric", (*p)->pos);
            }
            if (v.init) {
                TypeClass t = ck_.check(*v.init, c);
                TypeClass want = TypeClass::of(v.is_bool ? TK::Boolean : TK::Numeric);
                if (t.kind != TK::Error && !compatible(t, want))
                    ck_.err("TYPE", "initial value of '@" + v.name + "' must be " + want.str(), v.init->pos);
            }
        }
        for (const auto& cmd : m.commands) {
            if (cmd.sync) event_ref(*cmd.sync, cmd.pos);
            if (cmd.guard) {
                TypeClass t = ck_.check(*cmd.guard, c);
                if (t.kind != TK::Error && !is_k(t, TK::Boolean)) ck_.err("TYPE", "guard must be boolean", cmd.guard->pos);
            }
            for (const auto& alt : cmd.alternatives) {
                if (alt.prob) {
                    TypeClass t = ck_.check(*alt.prob, c);
                    if (t.kind != TK::Error && !is_k(t, TK::Numeric))
                        ck_.err("TYPE", "probability must be numeric", alt.prob->pos);
                }
                for (const auto& u : alt.updates) {
                    const PVar* v = nullptr;
                    for (const auto& pv : m.vars)
                        if (pv.name == u.var) v = &pv;
                    if (!v) {
                        ck_.err("SCOPE", "module '" + m.name + "' has no variable '@" + u.var + "'", u.pos);
                        continue;
                    }
                    TypeClass t = ck_.check(*u.value, c);
                    TypeClass want = TypeClass::of(v->is_bool ? TK::Boolean : TK::Numeric);
                    if (t.kind != TK::Error && !compatible(t, want))
                        ck_.err("TYPE", "value for '@" + u.var + "' must be " + want.str() + ", got " + t.str(), u.pos);
                }
            }
        }
    }
}

void SpecValidator::rewards(const RewardsDecl& d) {
    for (const auto& item : d.items) {
        if (item.event) event_ref(*item.event, item.pos);
        Ctx c;
        if (item.guard) {
            TypeClass t = ck_.check(*item.guard, c);
            if (t.kind != TK::Error && !is_k(t, TK::Boolean))
                ck_.err("TYPE", "reward guard must be boolean, got " + t.str(), item.guard->pos);
        }
        TypeClass t = ck_.check(*item.value, c);
        if (t.kind != TK::Error && !is_k(t, TK::Numeric))
            ck_.err("TYPE", "reward value must be numeric, got " + t.str(), item.value->pos);
    }
}

template <typename T>
bool SpecValidator::with_ref(const WithClause<T>& w, const char* code, const char* kind) {
    if (w.kind != WithClause<T>::Kind::Ref) return true;
    if (r_.spec()->find<T>(w.ref)) return true;
    std::string actual;
    for (const auto& s : r_.spec()->statements)
        if (statement_name(s) == w.ref) actual = statement_kind(s);
    ck_.err(code,
            "'" + w.ref + "' " + (actual.empty() ? "is not declared" : "is a " + actual + " declaration") + "; expected " +
                kind,
            w.pos);
    return false;
}

void SpecValidator::collect_modvars(const Expr& e, std::vector<const Expr*>& out, std::set<std::string>& seen,
                                    bool indirect) const {
    if (e.kind == ExprKind::ModVar && indirect) out.push_back(&e);
    if (e.kind == ExprKind::LabelRef || e.kind == ExprKind::FormulaRef) {
        const std::string key = (e.kind == ExprKind::LabelRef ? "l:" : "f:") + e.name.segments[0];
        if (seen.insert(key).second) {
            const Expr* body = nullptr;
            if (e.kind == ExprKind::LabelRef) {
                if (auto* l = r_.spec()->find<LabelDecl>(e.name.segments[0])) body = l->body.get();
            } else if (auto* f = r_.spec()->find<FormulaDecl>(e.name.segments[0])) {
                body = f->body.get();
            }
            if (body) collect_modvars(*body, out, seen, true);
        }
    }
    for (const auto& c : e.children)
        if (c) collect_modvars(*c, out, seen, indirect);
    if (e.bound && e.bound->value) collect_modvars(*e.bound->value, out, seen, indirect);
}

void SpecValidator::property(const ProbProperty& p) {
    bool ok_c = with_ref(p.constants, "WFProp-2", "a constants declaration");
    bool ok_d = with_ref(p.definitions, "WFProp-3", "a definitions declaration");
    bool ok_m = with_ref(p.modules, "WFProp-4", "a pmodules declaration");
    if (p.constants.kind == WithClause<ConstantsConfig>::Kind::Inline) constants_config(p.constants.inline_value);
    if (p.definitions.kind == WithClause<DefinitionsDecl>::Kind::Inline) definitions(p.definitions.inline_value);
    if (p.modules.kind == WithClause<PModulesDecl>::Kind::Inline) pmodules(p.modules.inline_value);

    const SpecAst& spec = *r_.spec();
    Ctx c;
    c.prop = &p;
    c.defs = property_definitions(spec, p);
    c.mods = property_modules(spec, p);
    c.top = true;
    TypeClass t = ck_.check(*p.body, c);
    if (t.kind != TK::Error && !is_k(t, TK::Boolean) && t.kind != TK::FormulaQuery)
        ck_.err("WFProp-1", "body of property '" + p.name + "' must be boolean or a query, got " + t.str(), p.body->pos);

    // Module variables reached through labels and formulas must belong to this property's modules.
    if (ok_m) {
        std::vector<const Expr*> mv;
        std::set<std::string> seen, reported;
        collect_modvars(*p.body, mv, seen, false);
        for (const Expr* e : mv)
            if (!ck_.mod_var(e->name, c.mods) && reported.insert(e->name.str()).second)
                ck_.err("SCOPE",
                        "module variable '@" + e->name.str() + "' is not declared by the modules of property '" +
                            p.name + "'",
                        p.body->pos);
    }

    if (opts_.kind == ModelKind::Dtmc && p.body->query && *p.body->query != QueryKind::Plain)
        ck_.warn("TYPE", "min/max query on a dtmc has a single adversary; treated as a plain query", p.body->pos);

    // Completeness of loose symbols.
    if (ok_c) {
        const ConstantsConfig* cfg = property_constants(spec, p);
        std::set<std::string> covered;
        if (cfg)
            for (const auto& e : cfg->entries)
                if (auto r = r_.resolve(e.name, nullptr)) covered.insert(pretty(*r));
        for (const auto& lc : loose_.constants) {
            if (covered.count(lc)) continue;
            ck_.err("SCOPE",
                    cfg ? "loose constant '" + lc + "' has no value in constants '" + cfg->name + "'"
                        : "loose constant '" + lc + "' needs a constants clause on property '" + p.name + "'",
                    p.pos);
        }
    }
    if (ok_d) {
        const DefinitionsDecl* defs = c.defs;
        for (const auto& f : loose_.functions)
            if (!defs || !defs->find_function(f))
                ck_.err("SCOPE",
                        "loose function '" + f + "' is not defined" + (defs ? " by '" + defs->name + "'" : "") +
                            " for property '" + p.name + "'",
                        p.pos);
        for (const auto& o : loose_.operations)
            if (!defs || !defs->find_operation(o))
                ck_.err("SCOPE",
                        "loose operation '" + o + "' is not defined" + (defs ? " by '" + defs->name + "'" : "") +
                            " for property '" + p.name + "'",
                        p.pos);
    }
}

void SpecValidator::run() {
    for (const auto& s : r_.spec()->statements) {
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, ConstantDecl>) {
                    ck_.check(*d.value, Ctx{});
                } else if constexpr (std::is_same_v<T, ConstantsConfig>) {
                    constants_config(d);
                } else if constexpr (std::is_same_v<T, LabelDecl>) {
                    TypeClass t = ck_.check(*d.body, Ctx{});
                    if (t.kind != TK::Error && !is_k(t, TK::Boolean))
                        ck_.err("TYPE", "label '" + d.name + "' must be boolean, got " + t.str(), d.body->pos);
                } else if constexpr (std::is_same_v<T, FormulaDecl>) {
                    ck_.check(*d.body, Ctx{});
                } else if constexpr (std::is_same_v<T, RewardsDecl>) {
                    rewards(d);
                } else if constexpr (std::is_same_v<T, DefinitionsDecl>) {
                    definitions(d);
                } else if constexpr (std::is_same_v<T, PModulesDecl>) {
                    pmodules(d);
                } else {
                    property(d);
                }
            },
            s);
    }
}

}  // namespace

TypeClass classify(const Expr& e, const Resolver& r, const ClassifyContext& cc) {
    std::vector<Diagnostic> diags;
    Checker ck(r, diags, "");
    Ctx c;
    c.prop = cc.property;
    c.inside_path = cc.inside_path;
    c.top = true;
    if (cc.property && r.spec()) {
        c.defs = property_definitions(*r.spec(), *cc.property);
        c.mods = property_modules(*r.spec(), *cc.property);
    }
    TypeClass t = ck.check(e, c);
    for (const auto& d : diags) {
        if (d.severity != Diagnostic::Severity::Error) continue;
        std::string msg = d.message;
        if (d.code.rfind("WF", 0) == 0 && msg.find("(" + d.code + ")") == std::string::npos) msg += " (" + d.code + ")";
        const bool type_like = d.code.rfind("WFExp", 0) == 0;
        throw Error(type_like ? "TYPE" : d.code, msg, SourcePos{d.line, d.col});
    }
    return t;
}

std::vector<Diagnostic> validate_model(const ModelAst& model, const ValidateOptions& opts) {
    std::vector<Diagnostic> out;
    Resolver r(model);
    ModelValidator(r, out, opts.model_file).run();
    return out;
}

std::vector<Diagnostic> validate(const ModelAst& model, const SpecAst& spec, const ValidateOptions& opts) {
    std::vector<Diagnostic> out;
    Resolver r(model, &spec);
    ModelValidator(r, out, opts.model_file).run();
    SpecValidator(r, out, opts).run();
    return out;
}

}  // namespace rcprob
