#include "rcprob/spec.h"

#include <map>
#include <set>
#include <sstream>

#include "rcprob/expr_parser.h"

namespace rcprob {

const PFunction* DefinitionsDecl::find_function(const std::string& n) const {
    for (const auto& f : functions)
        if (f.name == n) return &f;
    return nullptr;
}

const POperation* DefinitionsDecl::find_operation(const std::string& n) const {
    for (const auto& o : operations)
        if (o.name == n) return &o;
    return nullptr;
}

const char* statement_kind(const Statement& s) {
    struct V {
        const char* operator()(const ConstantDecl&) const { return "const"; }
        const char* operator()(const ConstantsConfig&) const { return "constants"; }
        const char* operator()(const LabelDecl&) const { return "label"; }
        const char* operator()(const FormulaDecl&) const { return "formula"; }
        const char* operator()(const RewardsDecl&) const { return "rewards"; }
        const char* operator()(const DefinitionsDecl&) const { return "defs"; }
        const char* operator()(const PModulesDecl&) const { return "pmodules"; }
        const char* operator()(const ProbProperty&) const { return "prob property"; }
    };
    return std::visit(V{}, s);
}

const std::string& statement_name(const Statement& s) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, s);
}

SourcePos statement_pos(const Statement& s) {
    return std::visit([](const auto& x) { return x.pos; }, s);
}

namespace {

class SpecParser {
   public:
    explicit SpecParser(const std::string& text) : ts_(tokenize(text)), ep_(ts_, Dialect::Spec) {}

    SpecAst parse() {
        SpecAst ast;
        std::map<std::string, std::set<std::string>> names;
        while (!ts_.at_end()) {
            if (ts_.accept_sym(";")) continue;
            Statement st = statement();
            const char* kind = statement_kind(st);
            if (!names[kind].insert(statement_name(st)).second) {
                throw Error("DUPLICATE", std::string("duplicate ") + kind + " name '" + statement_name(st) + "'",
                            statement_pos(st));
            }
            ast.statements.push_back(std::move(st));
        }
        return ast;
    }

   private:
    std::string ident(const char* what) { return ts_.expect_ident(what).text; }

    Statement statement() {
        if (ts_.is_kw("const")) return constant_decl();
        if (ts_.is_kw("constants")) {
            SourcePos pos = ts_.next().pos;
            ConstantsConfig c;
            c.pos = pos;
            c.name = ident("configuration name");
            ts_.expect_sym(":");
            c.entries = const_entries();
            return c;
        }
        if (ts_.is_kw("label")) {
            LabelDecl l;
            l.pos = ts_.next().pos;
            l.name = ident("label name");
            ts_.expect_sym("=");
            l.body = ep_.parse();
            return l;
        }
        if (ts_.is_kw("formula")) {
            FormulaDecl f;
            f.pos = ts_.next().pos;
            f.name = ident("formula name");
            ts_.expect_sym("=");
            f.body = ep_.parse();
            return f;
        }
        if (ts_.is_kw("rewards")) return rewards();
        if (ts_.is_kw("defs")) {
            DefinitionsDecl d;
            d.pos = ts_.next().pos;
            d.name = ident("definitions name");
            ts_.expect_sym(":");
            definitions_body(d);
            return d;
        }
        if (ts_.is_kw("pmodules")) {
            PModulesDecl m;
            m.pos = ts_.next().pos;
            m.name = ident("modules name");
            ts_.expect_sym(":");
            modules_body(m);
            return m;
        }
        if (ts_.is_kw("prob")) return property();
        ts_.fail("expected a statement (const, constants, label, formula, rewards, defs, pmodules, prob property)");
    }

    ConstantDecl constant_decl() {
        ConstantDecl c;
        c.pos = ts_.expect_kw("const").pos;
        c.name = ident("constant name");
        ts_.expect_sym("=");
        c.value = ep_.parse();
        return c;
    }

    // -- constants ---------------------------------------------------------

    bool at_const_entry(std::size_t k) const {
        // FQN followed by `set to` or `from set`
        if (!ts_.is_ident(k)) return false;
        ++k;
        while (ts_.is_sym("::", k) && ts_.is_ident(k + 1)) k += 2;
        return (ts_.is_kw("set", k) && ts_.is_kw("to", k + 1)) || (ts_.is_kw("from", k) && ts_.is_kw("set", k + 1));
    }

    std::vector<ConstEntry> const_entries() {
        std::vector<ConstEntry> out;
        out.push_back(const_entry());
        for (;;) {
            std::size_t k = 0;
            if (ts_.is_sym(",", k)) ++k;
            if (ts_.is_kw("and", k)) ++k;
            if (k == 0 || !at_const_entry(k)) break;
            for (std::size_t i = 0; i < k; ++i) ts_.next();
            out.push_back(const_entry());
        }
        return out;
    }

    ConstEntry const_entry() {
        ConstEntry e;
        e.name = ep_.parse_qualified_name();
        e.spec.pos = e.name.pos;
        if (ts_.accept_kw("set")) {
            ts_.expect_kw("to");
            e.spec.kind = ValueSpec::Kind::Exactly;
            e.spec.values = {ep_.parse()};
            return e;
        }
        ts_.expect_kw("from");
        ts_.expect_kw("set");
        ts_.expect_sym("{");
        ExprPtr first = ep_.parse();
        if (ts_.accept_kw("to")) {
            e.spec.kind = ValueSpec::Kind::Range;
            e.spec.lo = first;
            e.spec.hi = ep_.parse();
            if (ts_.accept_kw("by")) {
                ts_.expect_kw("step");
                e.spec.step = ep_.parse();
                e.spec.step_given = true;
            } else {
                e.spec.step = make_number(Rational(1), true, e.spec.pos);
            }
        } else {
            e.spec.kind = ValueSpec::Kind::FromSet;
            e.spec.values.push_back(first);
            while (ts_.accept_sym(",")) e.spec.values.push_back(ep_.parse());
        }
        ts_.expect_sym("}");
        return e;
    }

    // -- rewards -----------------------------------------------------------

    RewardsDecl rewards() {
        RewardsDecl r;
        r.pos = ts_.expect_kw("rewards").pos;
        r.name = ident("rewards name");
        ts_.expect_sym("=");
        while (!ts_.accept_kw("endrewards")) {
            RewardItem it;
            it.pos = ts_.peek().pos;
            if (ts_.accept_sym("[")) {
                it.event = ep_.parse_event_ref();
                if (it.event->valued) ts_.fail("reward event labels take no '.val'");
                ts_.expect_sym("]");
            }
            it.guard = ep_.parse();
            ts_.expect_sym(":");
            it.value = ep_.parse();
            ts_.expect_sym(";");
            r.items.push_back(std::move(it));
        }
        return r;
    }

    // -- definitions -------------------------------------------------------

    std::vector<std::string> param_list() {
        std::vector<std::string> ps;
        ts_.expect_sym("(");
        while (!ts_.accept_sym(")")) {
            ps.push_back(ident("parameter name"));
            ts_.accept_sym(",");
        }
        return ps;
    }

    void definitions_body(DefinitionsDecl& d) {
        if (!ts_.is_kw("pfunction") && !ts_.is_kw("poperation")) ts_.fail("expected pfunction or poperation");
        while (ts_.is_kw("pfunction") || ts_.is_kw("poperation")) {
            if (ts_.is_kw("pfunction")) {
                PFunction f;
                f.pos = ts_.next().pos;
                f.name = ident("function name");
                f.params = param_list();
                ts_.expect_sym("=");
                ts_.expect_sym("{");
                ts_.expect_kw("return");
                f.body = ep_.parse();
                ts_.expect_sym("}");
                if (d.find_function(f.name)) throw Error("DUPLICATE", "duplicate pfunction '" + f.name + "'", f.pos);
                d.functions.push_back(std::move(f));
            } else {
                POperation o;
                o.pos = ts_.next().pos;
                o.name = ident("operation name");
                o.params = param_list();
                ts_.expect_sym("=");
                ts_.expect_sym("{");
                do {
                    PAssignment a;
                    a.pos = ts_.expect_sym("(").pos;
                    a.target = ep_.parse_qualified_name();
                    ts_.expect_sym("=");
                    a.value = ep_.parse();
                    ts_.expect_sym(")");
                    o.body.push_back(std::move(a));
                } while (ts_.accept_kw("and"));
                ts_.expect_sym("}");
                if (d.find_operation(o.name)) throw Error("DUPLICATE", "duplicate poperation '" + o.name + "'", o.pos);
                d.operations.push_back(std::move(o));
            }
        }
    }

    // -- modules -----------------------------------------------------------

    void modules_body(PModulesDecl& m) {
        if (!ts_.is_kw("pmodule")) ts_.fail("expected pmodule");
        while (ts_.is_kw("pmodule")) {
            PModule mod = module();
            for (const auto& other : m.modules)
                if (other.name == mod.name) throw Error("DUPLICATE", "duplicate pmodule '" + mod.name + "'", mod.pos);
            m.modules.push_back(std::move(mod));
        }
    }

    PModule module() {
        PModule mod;
        mod.pos = ts_.expect_kw("pmodule").pos;
        mod.name = ident("module name");
        ts_.expect_sym("{");
        while (ts_.is_ident() && ts_.is_sym(":", 1)) {
            PVar v;
            v.pos = ts_.peek().pos;
            v.name = ident("variable name");
            ts_.expect_sym(":");
            if (ts_.accept_kw("bool")) {
                v.is_bool = true;
            } else {
                ts_.expect_sym("[");
                v.lo = ep_.parse();
                ts_.expect_kw("to");
                v.hi = ep_.parse();
                ts_.expect_sym("]");
            }
            if (ts_.accept_kw("init")) v.init = ep_.parse();
            ts_.expect_sym(";");
            for (const auto& o : mod.vars)
                if (o.name == v.name) throw Error("DUPLICATE", "duplicate module variable '" + v.name + "'", v.pos);
            mod.vars.push_back(std::move(v));
        }
        while (!ts_.accept_sym("}")) mod.commands.push_back(command());
        if (mod.commands.empty()) throw Error("SYNTAX", "pmodule '" + mod.name + "' needs at least one command", mod.pos);
        return mod;
    }

    PCommand command() {
        PCommand c;
        c.pos = ts_.expect_sym("[").pos;
        if (!ts_.is_sym("]")) {
            c.sync = ep_.parse_event_ref();
            if (c.sync->valued) ts_.fail("synchronisation labels take no '.val'");
        }
        ts_.expect_sym("]");
        c.guard = ep_.parse();
        ts_.expect_sym("->");
        if (ts_.accept_kw("skip")) {
            c.alternatives.push_back(PAlternative{});
        } else {
            do {
                c.alternatives.push_back(alternative());
            } while (ts_.accept_sym("+"));
        }
        ts_.expect_sym(";");
        return c;
    }

    // `(p: @v=e) & (@w=f)` or `p : (@v=e) & (@w=f)`
    PAlternative alternative() {
        PAlternative alt;
        if (!ts_.is_sym("(") || !update_follows()) {
            alt.prob = ep_.parse_operand();
            ts_.expect_sym(":");
        }
        if (ts_.accept_kw("skip")) return alt;
        do {
            SourcePos pos = ts_.expect_sym("(").pos;
            if (!ts_.is_sym("@")) {
                ExprPtr p = ep_.parse();
                ts_.expect_sym(":");
                if (alt.prob) throw Error("SYNTAX", "an alternative carries at most one probability", pos);
                alt.prob = p;
            }
            ts_.expect_sym("@");
            PUpdate u;
            u.pos = pos;
            u.var = ident("module variable");
            ts_.expect_sym("=");
            u.value = ep_.parse();
            ts_.expect_sym(")");
            alt.updates.push_back(std::move(u));
        } while (ts_.accept_sym("&"));
        return alt;
    }

    // At '(' : is this an update `( [p :] @v = e )` rather than a parenthesised probability?
    bool update_follows() {
        std::size_t m = ts_.mark();
        ts_.next();
        bool yes = false;
        if (ts_.is_sym("@")) {
            yes = true;
        } else {
            try {
                ExprParser probe(ts_, Dialect::Spec);
                probe.parse();
                yes = ts_.is_sym(":");
            } catch (const Error&) {
                yes = false;
            }
        }
        ts_.reset(m);
        return yes;
    }

    // -- properties --------------------------------------------------------

    ProbProperty property() {
        ProbProperty p;
        p.pos = ts_.expect_kw("prob").pos;
        ts_.expect_kw("property");
        p.name = ident("property name");
        ts_.expect_sym(":");
        p.body = ep_.parse();
        while (ts_.is_kw("with")) {
            SourcePos pos = ts_.next().pos;
            if (ts_.accept_kw("constants")) {
                if (p.constants.present()) ts_.fail("duplicate 'with constants'");
                p.constants.pos = pos;
                if (at_const_entry(0)) {
                    p.constants.kind = WithClause<ConstantsConfig>::Kind::Inline;
                    p.constants.inline_value.name = p.name + "_constants";
                    p.constants.inline_value.pos = pos;
                    p.constants.inline_value.entries = const_entries();
                } else {
                    p.constants.kind = WithClause<ConstantsConfig>::Kind::Ref;
                    p.constants.ref = ident("configuration name");
                }
            } else if (ts_.accept_kw("definitions")) {
                if (p.definitions.present()) ts_.fail("duplicate 'with definitions'");
                p.definitions.pos = pos;
                if (ts_.is_kw("pfunction") || ts_.is_kw("poperation")) {
                    p.definitions.kind = WithClause<DefinitionsDecl>::Kind::Inline;
                    p.definitions.inline_value.name = p.name + "_definitions";
                    p.definitions.inline_value.pos = pos;
                    definitions_body(p.definitions.inline_value);
                } else {
                    p.definitions.kind = WithClause<DefinitionsDecl>::Kind::Ref;
                    p.definitions.ref = ident("definitions name");
                }
            } else if (ts_.accept_kw("modules")) {
                if (p.modules.present()) ts_.fail("duplicate 'with modules'");
                p.modules.pos = pos;
                if (ts_.is_kw("pmodule")) {
                    p.modules.kind = WithClause<PModulesDecl>::Kind::Inline;
                    p.modules.inline_value.name = p.name + "_modules";
                    p.modules.inline_value.pos = pos;
                    modules_body(p.modules.inline_value);
                } else {
                    p.modules.kind = WithClause<PModulesDecl>::Kind::Ref;
                    p.modules.ref = ident("modules name");
                }
            } else {
                ts_.fail("expected constants, definitions or modules after 'with'");
            }
        }
        return p;
    }

    TokenStream ts_;
    ExprParser ep_;
};

// ---------------------------------------------------------------------------
// Printer

void print_entries(std::ostream& os, const std::vector<ConstEntry>& es, const std::string& ind) {
    for (std::size_t i = 0; i < es.size(); ++i) {
        const auto& e = es[i];
        os << ind << e.name.str();
        switch (e.spec.kind) {
            case ValueSpec::Kind::Exactly: os << " set to " << to_text(e.spec.values[0]); break;
            case ValueSpec::Kind::FromSet:
                os << " from set {";
                for (std::size_t k = 0; k < e.spec.values.size(); ++k) os << (k ? ", " : "") << to_text(e.spec.values[k]);
                os << "}";
                break;
            case ValueSpec::Kind::Range:
                os << " from set {" << to_text(e.spec.lo) << " to " << to_text(e.spec.hi);
                if (e.spec.step_given) os << " by step " << to_text(e.spec.step);
                os << "}";
                break;
        }
        if (i + 1 < es.size()) os << (i + 2 == es.size() ? ", and\n" : ",\n");
    }
}

void print_defs_body(std::ostream& os, const DefinitionsDecl& d, const std::string& ind) {
    for (const auto& f : d.functions) {
        os << ind << "pfunction " << f.name << "(";
        for (std::size_t i = 0; i < f.params.size(); ++i) os << (i ? ", " : "") << f.params[i];
        os << ") = { return " << to_text(f.body) << " }\n";
    }
    for (const auto& o : d.operations) {
        os << ind << "poperation " << o.name << "(";
        for (std::size_t i = 0; i < o.params.size(); ++i) os << (i ? ", " : "") << o.params[i];
        os << ") = { ";
        for (std::size_t i = 0; i < o.body.size(); ++i) {
            os << (i ? " and " : "") << "(" << o.body[i].target.str() << " = " << to_text(o.body[i].value) << ")";
        }
        os << " }\n";
    }
}

void print_modules_body(std::ostream& os, const PModulesDecl& m, const std::string& ind) {
    for (const auto& mod : m.modules) {
        os << ind << "pmodule " << mod.name << " {\n";
        for (const auto& v : mod.vars) {
            os << ind << "  " << v.name << " : ";
            if (v.is_bool) os << "bool";
            else os << "[" << to_text(v.lo) << " to " << to_text(v.hi) << "]";
            if (v.init) os << " init " << to_text(v.init);
            os << ";\n";
        }
        for (const auto& c : mod.commands) {
            os << ind << "  [" << (c.sync ? c.sync->str() : "") << "] " << to_text(c.guard) << " -> ";
            for (std::size_t a = 0; a < c.alternatives.size(); ++a) {
                const auto& alt = c.alternatives[a];
                if (a) os << " + ";
                if (alt.prob) os << "(" << to_text(alt.prob) << ") : ";
                if (alt.updates.empty()) os << "skip";
                for (std::size_t u = 0; u < alt.updates.size(); ++u) {
                    os << (u ? " & " : "") << "(@" << alt.updates[u].var << " = " << to_text(alt.updates[u].value) << ")";
                }
            }
            os << ";\n";
        }
        os << ind << "}\n";
    }
}

}  // namespace

SpecAst parse_spec(const std::string& text) { return SpecParser(text).parse(); }

std::string print_spec(const SpecAst& s) {
    std::ostringstream os;
    for (const auto& st : s.statements) {
        if (auto* c = std::get_if<ConstantDecl>(&st)) {
            os << "const " << c->name << " = " << to_text(c->value) << "\n";
        } else if (auto* c = std::get_if<ConstantsConfig>(&st)) {
            os << "constants " << c->name << ":\n";
            print_entries(os, c->entries, "  ");
            os << "\n";
        } else if (auto* l = std::get_if<LabelDecl>(&st)) {
            os << "label " << l->name << " = " << to_text(l->body) << "\n";
        } else if (auto* f = std::get_if<FormulaDecl>(&st)) {
            os << "formula " << f->name << " = " << to_text(f->body) << "\n";
        } else if (auto* r = std::get_if<RewardsDecl>(&st)) {
            os << "rewards " << r->name << " =\n";
            for (const auto& it : r->items) {
                os << "  ";
                if (it.event) os << "[" << it.event->str() << "] ";
                os << to_text(it.guard) << " : " << to_text(it.value) << ";\n";
            }
            os << "endrewards\n";
        } else if (auto* d = std::get_if<DefinitionsDecl>(&st)) {
            os << "defs " << d->name << ":\n";
            print_defs_body(os, *d, "  ");
        } else if (auto* m = std::get_if<PModulesDecl>(&st)) {
            os << "pmodules " << m->name << ":\n";
            print_modules_body(os, *m, "  ");
        } else if (auto* p = std::get_if<ProbProperty>(&st)) {
            os << "prob property " << p->name << ":\n  " << to_text(p->body) << "\n";
            if (p->constants.kind == WithClause<ConstantsConfig>::Kind::Ref) {
                os << "  with constants " << p->constants.ref << "\n";
            } else if (p->constants.kind == WithClause<ConstantsConfig>::Kind::Inline) {
                os << "  with constants\n";
                print_entries(os, p->constants.inline_value.entries, "    ");
                os << "\n";
            }
            if (p->definitions.kind == WithClause<DefinitionsDecl>::Kind::Ref) {
                os << "  with definitions " << p->definitions.ref << "\n";
            } else if (p->definitions.kind == WithClause<DefinitionsDecl>::Kind::Inline) {
                os << "  with definitions\n";
                print_defs_body(os, p->definitions.inline_value, "    ");
            }
            if (p->modules.kind == WithClause<PModulesDecl>::Kind::Ref) {
                os << "  with modules " << p->modules.ref << "\n";
            } else if (p->modules.kind == WithClause<PModulesDecl>::Kind::Inline) {
                os << "  with modules\n";
                print_modules_body(os, p->modules.inline_value, "    ");
            }
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

template <typename T, typename F>
bool all_eq(const std::vector<T>& a, const std::vector<T>& b, F f) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!f(a[i], b[i])) return false;
    return true;
}

bool eq_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    return all_eq(a, b, [](const ExprPtr& x, const ExprPtr& y) { return structurally_equal(x, y); });
}

bool eq_entries(const std::vector<ConstEntry>& a, const std::vector<ConstEntry>& b) {
    return all_eq(a, b, [](const ConstEntry& x, const ConstEntry& y) {
        return x.name == y.name && x.spec.kind == y.spec.kind && eq_exprs(x.spec.values, y.spec.values) &&
               structurally_equal(x.spec.lo, y.spec.lo) && structurally_equal(x.spec.hi, y.spec.hi) &&
               structurally_equal(x.spec.step, y.spec.step) && x.spec.step_given == y.spec.step_given;
    });
}

bool eq_defs(const DefinitionsDecl& a, const DefinitionsDecl& b) {
    return all_eq(a.functions, b.functions,
                  [](const PFunction& x, const PFunction& y) {
                      return x.name == y.name && x.params == y.params && structurally_equal(x.body, y.body);
                  }) &&
           all_eq(a.operations, b.operations, [](const POperation& x, const POperation& y) {
               return x.name == y.name && x.params == y.params &&
                      all_eq(x.body, y.body, [](const PAssignment& u, const PAssignment& v) {
                          return u.target == v.target && structurally_equal(u.value, v.value);
                      });
           });
}

bool eq_mods(const PModulesDecl& a, const PModulesDecl& b) {
    return all_eq(a.modules, b.modules, [](const PModule& x, const PModule& y) {
        return x.name == y.name &&
               all_eq(x.vars, y.vars,
                      [](const PVar& u, const PVar& v) {
                          return u.name == v.name && u.is_bool == v.is_bool && structurally_equal(u.lo, v.lo) &&
                                 structurally_equal(u.hi, v.hi) && structurally_equal(u.init, v.init);
                      }) &&
               all_eq(x.commands, y.commands, [](const PCommand& u, const PCommand& v) {
                   return u.sync == v.sync && structurally_equal(u.guard, v.guard) &&
                          all_eq(u.alternatives, v.alternatives, [](const PAlternative& p, const PAlternative& q) {
                              return structurally_equal(p.prob, q.prob) &&
                                     all_eq(p.updates, q.updates, [](const PUpdate& r, const PUpdate& s) {
                                         return r.var == s.var && structurally_equal(r.value, s.value);
                                     });
                          });
               });
    });
}

template <typename T, typename F>
bool eq_with(const WithClause<T>& a, const WithClause<T>& b, F inner) {
    if (a.kind != b.kind) return false;
    if (a.kind == WithClause<T>::Kind::Ref) return a.ref == b.ref;
    if (a.kind == WithClause<T>::Kind::Inline) return inner(a.inline_value, b.inline_value);
    return true;
}

struct StmtEq {
    const Statement& other;
    bool operator()(const ConstantDecl& a) const {
        auto& b = std::get<ConstantDecl>(other);
        return a.name == b.name && structurally_equal(a.value, b.value);
    }
    bool operator()(const ConstantsConfig& a) const {
        auto& b = std::get<ConstantsConfig>(other);
        return a.name == b.name && eq_entries(a.entries, b.entries);
    }
    bool operator()(const LabelDecl& a) const {
        auto& b = std::get<LabelDecl>(other);
        return a.name == b.name && structurally_equal(a.body, b.body);
    }
    bool operator()(const FormulaDecl& a) const {
        auto& b = std::get<FormulaDecl>(other);
        return a.name == b.name && structurally_equal(a.body, b.body);
    }
    bool operator()(const RewardsDecl& a) const {
        auto& b = std::get<RewardsDecl>(other);
        return a.name == b.name && all_eq(a.items, b.items, [](const RewardItem& x, const RewardItem& y) {
                   return x.event == y.event && structurally_equal(x.guard, y.guard) &&
                          structurally_equal(x.value, y.value);
               });
    }
    bool operator()(const DefinitionsDecl& a) const {
        auto& b = std::get<DefinitionsDecl>(other);
        return a.name == b.name && eq_defs(a, b);
    }
    bool operator()(const PModulesDecl& a) const {
        auto& b = std::get<PModulesDecl>(other);
        return a.name == b.name && eq_mods(a, b);
    }
    bool operator()(const ProbProperty& a) const {
        auto& b = std::get<ProbProperty>(other);
        return a.name == b.name && structurally_equal(a.body, b.body) &&
               eq_with(a.constants, b.constants,
                       [](const ConstantsConfig& x, const ConstantsConfig& y) { return eq_entries(x.entries, y.entries); }) &&
               eq_with(a.definitions, b.definitions, eq_defs) && eq_with(a.modules, b.modules, eq_mods);
    }
};

}  // namespace

bool structurally_equal(const SpecAst& a, const SpecAst& b) {
    if (a.statements.size() != b.statements.size()) return false;
    for (std::size_t i = 0; i < a.statements.size(); ++i) {
        if (a.statements[i].index() != b.statements[i].index()) return false;
        if (!std::visit(StmtEq{b.statements[i]}, a.statements[i])) return false;
    }
    return true;
}

}  // namespace rcprob
