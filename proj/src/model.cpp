#include "rcprob/model.h"

#include <map>
#include <sstream>

#include "rcprob/expr_parser.h"

namespace rcprob {

std::string TypeRef::str() const {
    switch (kind) {
        case TypeKind::Int: return "int";
        case TypeKind::Nat: return "nat";
        case TypeKind::Bool: return "bool";
        case TypeKind::Real: return "real";
        case TypeKind::Enum: return enum_name;
    }
    return "?";
}

std::vector<ActionPtr> flatten_seq(const ActionPtr& a) {
    std::vector<ActionPtr> out;
    if (!a) return out;
    if (a->kind == ActionKind::Seq) {
        for (const auto& c : a->children) {
            auto sub = flatten_seq(c);
            out.insert(out.end(), sub.begin(), sub.end());
        }
    } else {
        out.push_back(a);
    }
    return out;
}

ActionPtr make_seq(std::vector<ActionPtr> parts, SourcePos pos) {
    std::vector<ActionPtr> flat;
    for (const auto& p : parts) {
        auto f = flatten_seq(p);
        flat.insert(flat.end(), f.begin(), f.end());
    }
    if (flat.size() == 1) return flat.front();
    auto s = std::make_shared<Action>();
    s->kind = ActionKind::Seq;
    s->pos = pos;
    s->children = std::move(flat);
    return s;
}

const Node* StateMachine::find_node(const std::string& n) const {
    for (const auto& x : nodes)
        if (x.name == n) return &x;
    return nullptr;
}

const EventDecl* StateMachine::find_event(const std::string& n) const {
    for (const auto& x : events)
        if (x.name == n) return &x;
    return nullptr;
}

const Node& StateMachine::initial() const {
    for (const auto& x : nodes)
        if (x.kind == NodeKind::Initial) return x;
    throw Error("STRUCTURE", "machine '" + name + "' has no initial junction", pos);
}

const EventDecl* Controller::find_event(const std::string& n) const {
    for (const auto& x : events)
        if (x.name == n) return &x;
    return nullptr;
}

const EnumDecl* ModelAst::find_enum(const std::string& n) const {
    for (const auto& x : enums)
        if (x.name == n) return &x;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class ModelParser {
   public:
    explicit ModelParser(const std::string& text) : ts_(tokenize(text)), ep_(ts_, Dialect::Model) {}

    ModelAst parse() {
        ModelAst m;
        m.pos = ts_.expect_kw("module").pos;
        m.name = ts_.expect_ident("module name").text;
        ts_.expect_sym("{");
        while (!ts_.accept_sym("}")) {
            if (ts_.is_kw("platform")) m.platforms.push_back(platform());
            else if (ts_.is_kw("controller")) m.controllers.push_back(controller());
            else if (ts_.is_kw("connection")) m.connections.push_back(connection());
            else if (ts_.is_kw("enum")) m.enums.push_back(enumeration());
            else ts_.fail("expected platform, controller, connection or enum");
        }
        if (!ts_.at_end()) ts_.fail("exactly one module per file");
        check(m);
        return m;
    }

   private:
    std::string ident(const char* what) { return ts_.expect_ident(what).text; }

    TypeRef type() {
        TypeRef t;
        const Token& tok = ts_.expect_ident("type");
        t.pos = tok.pos;
        if (tok.text == "int") t.kind = TypeKind::Int;
        else if (tok.text == "nat") t.kind = TypeKind::Nat;
        else if (tok.text == "bool" || tok.text == "boolean") t.kind = TypeKind::Bool;
        else if (tok.text == "real") t.kind = TypeKind::Real;
        else {
            t.kind = TypeKind::Enum;
            t.enum_name = tok.text;
        }
        return t;
    }

    ConstDecl const_decl() {
        ConstDecl c;
        c.pos = ts_.expect_kw("const").pos;
        c.name = ident("constant name");
        ts_.expect_sym(":");
        c.type = type();
        if (ts_.accept_sym("=")) c.value = ep_.parse();
        ts_.expect_sym(";");
        return c;
    }

    VarDecl var_decl() {
        VarDecl v;
        v.pos = ts_.expect_kw("var").pos;
        v.name = ident("variable name");
        ts_.expect_sym(":");
        v.type = type();
        if (ts_.accept_sym("=")) v.init = ep_.parse();
        ts_.expect_sym(";");
        return v;
    }

    EventDecl event_decl() {
        EventDecl e;
        e.pos = ts_.expect_kw("event").pos;
        e.name = ident("event name");
        if (ts_.accept_sym(":")) e.type = type();
        ts_.expect_sym(";");
        return e;
    }

    std::vector<Param> params() {
        std::vector<Param> ps;
        ts_.expect_sym("(");
        if (ts_.accept_sym(")")) return ps;
        do {
            Param p;
            p.name = ident("parameter name");
            ts_.expect_sym(":");
            p.type = type();
            ps.push_back(std::move(p));
        } while (ts_.accept_sym(","));
        ts_.expect_sym(")");
        return ps;
    }

    FunctionDecl function_decl() {
        FunctionDecl f;
        f.pos = ts_.expect_kw("function").pos;
        f.name = ident("function name");
        f.params = params();
        ts_.expect_sym(":");
        f.result = type();
        if (ts_.accept_sym("=")) f.body = ep_.parse();
        ts_.expect_sym(";");
        return f;
    }

    OperationDecl operation_decl() {
        OperationDecl o;
        o.pos = ts_.expect_kw("operation").pos;
        o.name = ident("operation name");
        o.params = params();
        ts_.expect_sym(";");
        return o;
    }

    Platform platform() {
        Platform p;
        p.pos = ts_.expect_kw("platform").pos;
        p.name = ident("platform name");
        ts_.expect_sym("{");
        while (!ts_.accept_sym("}")) {
            if (ts_.is_kw("const")) p.constants.push_back(const_decl());
            else if (ts_.is_kw("var")) p.variables.push_back(var_decl());
            else if (ts_.is_kw("event")) p.events.push_back(event_decl());
            else if (ts_.is_kw("function")) p.functions.push_back(function_decl());
            else if (ts_.is_kw("operation")) p.operations.push_back(operation_decl());
            else ts_.fail("expected const, var, event, function or operation");
        }
        return p;
    }

    Controller controller() {
        Controller c;
        c.pos = ts_.expect_kw("controller").pos;
        c.name = ident("controller name");
        ts_.expect_sym("{");
        while (!ts_.accept_sym("}")) {
            if (ts_.accept_kw("requires")) {
                c.requires_.push_back(ident("platform name"));
                ts_.expect_sym(";");
            } else if (ts_.is_kw("const")) c.constants.push_back(const_decl());
            else if (ts_.is_kw("var")) c.variables.push_back(var_decl());
            else if (ts_.is_kw("event")) c.events.push_back(event_decl());
            else if (ts_.is_kw("machine")) c.machines.push_back(machine());
            else if (ts_.is_kw("connection")) c.connections.push_back(connection());
            else ts_.fail("expected requires, const, var, event, machine or connection");
        }
        return c;
    }

    Endpoint endpoint() {
        Endpoint e;
        const Token& t = ts_.expect_ident("connection endpoint");
        e.pos = t.pos;
        e.node = t.text;
        ts_.expect_sym(".");
        e.event = ident("event name");
        return e;
    }

    Connection connection() {
        Connection c;
        c.pos = ts_.expect_kw("connection").pos;
        c.from = endpoint();
        ts_.expect_sym("->");
        c.to = endpoint();
        if (ts_.accept_kw("async")) c.async = true;
        ts_.expect_sym(";");
        return c;
    }

    EnumDecl enumeration() {
        EnumDecl e;
        e.pos = ts_.expect_kw("enum").pos;
        e.name = ident("enumeration name");
        ts_.expect_sym("{");
        do {
            e.literals.push_back(ident("enumeration literal"));
        } while (ts_.accept_sym(","));
        ts_.expect_sym("}");
        return e;
    }

    // -- actions -----------------------------------------------------------

    bool action_ends() const {
        return ts_.is_sym("}") || ts_.is_kw("exit") || ts_.is_kw("else") || ts_.is_kw("end") || ts_.is_sym(")");
    }

    ActionPtr action() {
        SourcePos pos = ts_.peek().pos;
        std::vector<ActionPtr> parts{atomic_action()};
        while (ts_.accept_sym(";")) {
            if (action_ends()) break;  // tolerate a trailing separator
            parts.push_back(atomic_action());
        }
        return make_seq(std::move(parts), pos);
    }

    ActionPtr atomic_action() {
        auto a = std::make_shared<Action>();
        const Token& t = ts_.peek();
        a->pos = t.pos;
        if (ts_.accept_sym("(")) {
            ActionPtr inner = action();
            ts_.expect_sym(")");
            return inner;
        }
        if (ts_.accept_kw("skip")) {
            a->kind = ActionKind::Skip;
            return a;
        }
        if (ts_.accept_kw("if")) {
            a->kind = ActionKind::If;
            a->value = ep_.parse();
            ts_.expect_kw("then");
            ActionPtr th = action();
            ActionPtr el;
            if (ts_.accept_kw("else")) el = action();
            else {
                auto sk = std::make_shared<Action>();
                sk->pos = a->pos;
                el = sk;
            }
            ts_.expect_kw("end");
            a->children = {th, el};
            return a;
        }
        const Token& name = ts_.expect_ident("action");
        a->target = name.text;
        if (ts_.accept_sym("=")) {
            a->kind = ActionKind::Assign;
            a->value = ep_.parse();
        } else if (ts_.accept_sym("!")) {
            a->kind = ActionKind::Comm;
            a->dir = EventDir::Out;
            a->value = ep_.parse();
        } else if (ts_.accept_sym("?")) {
            a->kind = ActionKind::Comm;
            a->dir = EventDir::In;
            a->input_var = ident("input variable");
        } else if (ts_.accept_sym("(")) {
            a->kind = ActionKind::Call;
            if (!ts_.accept_sym(")")) {
                do {
                    a->args.push_back(ep_.parse());
                } while (ts_.accept_sym(","));
                ts_.expect_sym(")");
            }
        } else {
            a->kind = ActionKind::Comm;
            a->dir = EventDir::Out;
        }
        return a;
    }

    // -- machines ----------------------------------------------------------

    Node state() {
        Node n;
        n.kind = NodeKind::State;
        n.pos = ts_.expect_kw("state").pos;
        n.name = ident("state name");
        while (ts_.accept_sym("{")) {
            while (!ts_.accept_sym("}")) {
                if (ts_.is_kw("state") || ts_.is_kw("initial") || ts_.is_kw("transition") ||
                    ts_.is_kw("pjunction")) {
                    throw Error("STRUCTURE", "nested states are not supported (one region per machine)",
                                ts_.peek().pos);
                }
                if (ts_.accept_kw("entry")) {
                    if (n.entry) ts_.fail("duplicate entry action");
                    n.entry = action();
                } else if (ts_.accept_kw("exit")) {
                    if (n.exit) ts_.fail("duplicate exit action");
                    n.exit = action();
                } else {
                    ts_.fail("expected entry or exit");
                }
            }
        }
        ts_.expect_sym(";");
        return n;
    }

    Transition transition() {
        Transition t;
        t.pos = ts_.expect_kw("transition").pos;
        t.id = ident("transition name");
        ts_.expect_sym("{");
        ts_.expect_kw("from");
        t.source = ident("source node");
        ts_.expect_kw("to");
        t.target = ident("target node");
        if (ts_.is_kw("trigger")) {
            Trigger tr;
            tr.pos = ts_.next().pos;
            tr.event = ident("trigger event");
            if (ts_.accept_sym("?")) {
                tr.dir = EventDir::In;
                tr.input_var = ident("input variable");
            } else if (ts_.accept_sym("!")) {
                tr.dir = EventDir::Out;
                tr.output = ep_.parse();
            } else {
                tr.dir = EventDir::In;
            }
            t.trigger = tr;
        }
        if (ts_.accept_kw("guard")) t.guard = ep_.parse();
        if (ts_.accept_kw("prob")) t.prob = ep_.parse();
        if (ts_.accept_kw("action")) t.action = action();
        ts_.expect_sym("}");
        return t;
    }

    StateMachine machine() {
        StateMachine sm;
        sm.pos = ts_.expect_kw("machine").pos;
        sm.name = ident("machine name");
        ts_.expect_sym("{");
        while (!ts_.accept_sym("}")) {
            if (ts_.is_kw("const")) sm.constants.push_back(const_decl());
            else if (ts_.is_kw("var")) sm.variables.push_back(var_decl());
            else if (ts_.is_kw("event")) sm.events.push_back(event_decl());
            else if (ts_.is_kw("function")) sm.functions.push_back(function_decl());
            else if (ts_.is_kw("operation")) sm.operations.push_back(operation_decl());
            else if (ts_.is_kw("initial") || ts_.is_kw("pjunction")) {
                Node n;
                n.kind = ts_.peek().text == "initial" ? NodeKind::Initial : NodeKind::ProbJunction;
                n.pos = ts_.next().pos;
                n.name = ident("node name");
                ts_.expect_sym(";");
                sm.nodes.push_back(std::move(n));
            } else if (ts_.is_kw("state")) sm.nodes.push_back(state());
            else if (ts_.is_kw("transition")) sm.transitions.push_back(transition());
            else ts_.fail("expected a machine member");
        }
        return sm;
    }

    // -- structural checks -------------------------------------------------

    template <typename Seq, typename Key>
    static void unique(const Seq& items, Key key, const std::string& container) {
        std::map<std::string, SourcePos> seen;
        for (const auto& it : items) {
            auto [name, pos] = key(it);
            if (!seen.emplace(name, pos).second) {
                throw Error("DUPLICATE", "duplicate name '" + name + "' in " + container, pos);
            }
        }
    }

    struct Named {
        std::string name;
        SourcePos pos;
    };

    template <typename T>
    static void collect(std::vector<Named>& out, const std::vector<T>& v) {
        for (const auto& x : v) out.push_back({x.name, x.pos});
    }

    static void check_unique(const std::vector<Named>& v, const std::string& container) {
        unique(v, [](const Named& n) { return std::make_pair(n.name, n.pos); }, container);
    }

    static void check_machine(const StateMachine& sm) {
        std::vector<Named> names;
        collect(names, sm.constants);
        collect(names, sm.variables);
        collect(names, sm.events);
        collect(names, sm.functions);
        collect(names, sm.operations);
        collect(names, sm.nodes);
        for (const auto& t : sm.transitions) names.push_back({t.id, t.pos});
        check_unique(names, "machine '" + sm.name + "'");

        int initials = 0;
        for (const auto& n : sm.nodes) initials += n.kind == NodeKind::Initial;
        if (initials != 1) {
            throw Error("STRUCTURE", "machine '" + sm.name + "' must have exactly one initial junction", sm.pos);
        }
        for (const auto& t : sm.transitions) {
            const Node* src = sm.find_node(t.source);
            const Node* dst = sm.find_node(t.target);
            if (!src) throw Error("REFERENCE", "transition '" + t.id + "' from unknown node '" + t.source + "'", t.pos);
            if (!dst) throw Error("REFERENCE", "transition '" + t.id + "' to unknown node '" + t.target + "'", t.pos);
            if (dst->kind == NodeKind::Initial) {
                throw Error("STRUCTURE", "transition '" + t.id + "' targets the initial junction", t.pos);
            }
            if (t.prob && src->kind != NodeKind::ProbJunction) {
                throw Error("STRUCTURE", "transition '" + t.id + "': probability on non-probabilistic source", t.pos);
            }
            if (src->kind == NodeKind::ProbJunction) {
                if (!t.prob) {
                    throw Error("STRUCTURE", "transition '" + t.id + "' leaves a probabilistic junction without a probability", t.pos);
                }
                if (t.trigger || t.guard) {
                    throw Error("STRUCTURE", "transition '" + t.id + "' leaves a probabilistic junction and may carry only a probability and an action", t.pos);
                }
            }
            if (t.trigger && !sm.find_event(t.trigger->event)) {
                throw Error("REFERENCE", "trigger of '" + t.id + "' names undeclared event '" + t.trigger->event + "'", t.pos);
            }
        }
        const Node& init = sm.initial();
        int outgoing = 0;
        for (const auto& t : sm.transitions) {
            if (t.source != init.name) continue;
            ++outgoing;
            if (t.guard || t.trigger) {
                throw Error("STRUCTURE", "the initial transition '" + t.id + "' must be unguarded and untriggered", t.pos);
            }
        }
        if (outgoing != 1) {
            throw Error("STRUCTURE", "initial junction of '" + sm.name + "' needs exactly one outgoing transition", init.pos);
        }
        for (const auto& n : sm.nodes) {
            if (n.kind == NodeKind::ProbJunction) {
                bool any = false;
                for (const auto& t : sm.transitions) any = any || t.source == n.name;
                if (!any) throw Error("STRUCTURE", "probabilistic junction '" + n.name + "' has no outgoing transitions", n.pos);
            }
        }
    }

    static void check_connection(const Connection& c, const std::map<std::string, std::vector<std::string>>& nodes) {
        for (const Endpoint* e : {&c.from, &c.to}) {
            auto it = nodes.find(e->node);
            if (it == nodes.end()) {
                throw Error("REFERENCE", "connection endpoint '" + e->str() + "' names an unknown node", e->pos);
            }
            bool found = false;
            for (const auto& ev : it->second) found = found || ev == e->event;
            if (!found) {
                throw Error("REFERENCE", "connection endpoint '" + e->str() + "' names an event not declared on '" + e->node + "'", e->pos);
            }
        }
    }

    template <typename T>
    static std::vector<std::string> event_names(const std::vector<T>& evs) {
        std::vector<std::string> out;
        for (const auto& e : evs) out.push_back(e.name);
        return out;
    }

    static void check(const ModelAst& m) {
        std::vector<Named> top;
        collect(top, m.platforms);
        collect(top, m.controllers);
        collect(top, m.enums);
        check_unique(top, "module '" + m.name + "'");
        for (const auto& e : m.enums) {
            std::vector<Named> lits;
            for (const auto& l : e.literals) lits.push_back({l, e.pos});
            check_unique(lits, "enumeration '" + e.name + "'");
        }

        std::map<std::string, std::vector<std::string>> top_nodes;
        for (const auto& p : m.platforms) {
            std::vector<Named> names;
            collect(names, p.constants);
            collect(names, p.variables);
            collect(names, p.events);
            collect(names, p.functions);
            collect(names, p.operations);
            check_unique(names, "platform '" + p.name + "'");
            top_nodes[p.name] = event_names(p.events);
        }
        for (const auto& c : m.controllers) {
            std::vector<Named> names;
            collect(names, c.constants);
            collect(names, c.variables);
            collect(names, c.events);
            collect(names, c.machines);
            check_unique(names, "controller '" + c.name + "'");
            for (const auto& r : c.requires_) {
                bool ok = false;
                for (const auto& p : m.platforms) ok = ok || p.name == r;
                if (!ok) throw Error("REFERENCE", "controller '" + c.name + "' requires unknown platform '" + r + "'", c.pos);
            }
            std::map<std::string, std::vector<std::string>> inner;
            inner[c.name] = event_names(c.events);
            for (const auto& sm : c.machines) {
                check_machine(sm);
                inner[sm.name] = event_names(sm.events);
            }
            for (const auto& conn : c.connections) check_connection(conn, inner);
            top_nodes[c.name] = event_names(c.events);
        }
        for (const auto& conn : m.connections) check_connection(conn, top_nodes);
    }

    TokenStream ts_;
    ExprParser ep_;
};

// ---------------------------------------------------------------------------
// Printer

void print_action_to(std::ostream& os, const Action& a);

void print_action_child(std::ostream& os, const ActionPtr& a) {
    if (a->kind == ActionKind::Seq) {
        os << "(";
        print_action_to(os, *a);
        os << ")";
    } else {
        print_action_to(os, *a);
    }
}

void print_action_to(std::ostream& os, const Action& a) {
    switch (a.kind) {
        case ActionKind::Skip: os << "skip"; return;
        case ActionKind::Assign: os << a.target << " = " << to_text(a.value); return;
        case ActionKind::Comm:
            os << a.target;
            if (a.dir == EventDir::In) os << "?" << a.input_var;
            else if (a.value) os << "!" << to_text(a.value);
            return;
        case ActionKind::Call:
            os << a.target << "(";
            for (std::size_t i = 0; i < a.args.size(); ++i) os << (i ? ", " : "") << to_text(a.args[i]);
            os << ")";
            return;
        case ActionKind::Seq:
            for (std::size_t i = 0; i < a.children.size(); ++i) {
                if (i) os << "; ";
                print_action_child(os, a.children[i]);
            }
            return;
        case ActionKind::If:
            os << "if " << to_text(a.value) << " then ";
            print_action_to(os, *a.children[0]);
            os << " else ";
            print_action_to(os, *a.children[1]);
            os << " end";
            return;
    }
}

void print_decls(std::ostream& os, const std::string& ind, const std::vector<ConstDecl>& cs,
                 const std::vector<VarDecl>& vs, const std::vector<EventDecl>& es) {
    for (const auto& c : cs) {
        os << ind << "const " << c.name << " : " << c.type.str();
        if (c.value) os << " = " << to_text(c.value);
        os << ";\n";
    }
    for (const auto& v : vs) {
        os << ind << "var " << v.name << " : " << v.type.str();
        if (v.init) os << " = " << to_text(v.init);
        os << ";\n";
    }
    for (const auto& e : es) {
        os << ind << "event " << e.name;
        if (e.type) os << " : " << e.type->str();
        os << ";\n";
    }
}

void print_params(std::ostream& os, const std::vector<Param>& ps) {
    os << "(";
    for (std::size_t i = 0; i < ps.size(); ++i) os << (i ? ", " : "") << ps[i].name << " : " << ps[i].type.str();
    os << ")";
}

void print_callables(std::ostream& os, const std::string& ind, const std::vector<FunctionDecl>& fs,
                     const std::vector<OperationDecl>& ops) {
    for (const auto& f : fs) {
        os << ind << "function " << f.name;
        print_params(os, f.params);
        os << " : " << f.result.str();
        if (f.body) os << " = " << to_text(f.body);
        os << ";\n";
    }
    for (const auto& o : ops) {
        os << ind << "operation " << o.name;
        print_params(os, o.params);
        os << ";\n";
    }
}

void print_connection(std::ostream& os, const std::string& ind, const Connection& c) {
    os << ind << "connection " << c.from.str() << " -> " << c.to.str() << (c.async ? " async" : "") << ";\n";
}

}  // namespace

ModelAst parse_model(const std::string& text) { return ModelParser(text).parse(); }

std::string print_action(const Action& a) {
    std::ostringstream os;
    print_action_to(os, a);
    return os.str();
}

std::string print_model(const ModelAst& m) {
    std::ostringstream os;
    os << "module " << m.name << " {\n";
    for (const auto& p : m.platforms) {
        os << "  platform " << p.name << " {\n";
        print_decls(os, "    ", p.constants, p.variables, p.events);
        print_callables(os, "    ", p.functions, p.operations);
        os << "  }\n";
    }
    for (const auto& c : m.controllers) {
        os << "  controller " << c.name << " {\n";
        for (const auto& r : c.requires_) os << "    requires " << r << ";\n";
        print_decls(os, "    ", c.constants, c.variables, c.events);
        for (const auto& sm : c.machines) {
            os << "    machine " << sm.name << " {\n";
            print_decls(os, "      ", sm.constants, sm.variables, sm.events);
            print_callables(os, "      ", sm.functions, sm.operations);
            for (const auto& n : sm.nodes) {
                switch (n.kind) {
                    case NodeKind::Initial: os << "      initial " << n.name << ";\n"; break;
                    case NodeKind::ProbJunction: os << "      pjunction " << n.name << ";\n"; break;
                    case NodeKind::State:
                        os << "      state " << n.name;
                        if (n.entry) os << " { entry " << print_action(*n.entry) << " }";
                        if (n.exit) os << " { exit " << print_action(*n.exit) << " }";
                        os << ";\n";
                        break;
                }
            }
            for (const auto& t : sm.transitions) {
                os << "      transition " << t.id << " { from " << t.source << " to " << t.target;
                if (t.trigger) {
                    os << " trigger " << t.trigger->event;
                    if (!t.trigger->input_var.empty()) os << "?" << t.trigger->input_var;
                    else if (t.trigger->output) os << "!" << to_text(t.trigger->output);
                }
                if (t.guard) os << " guard " << to_text(t.guard);
                if (t.prob) os << " prob " << to_text(t.prob);
                if (t.action) os << " action " << print_action(*t.action);
                os << " }\n";
            }
            os << "    }\n";
        }
        for (const auto& conn : c.connections) print_connection(os, "    ", conn);
        os << "  }\n";
    }
    for (const auto& conn : m.connections) print_connection(os, "  ", conn);
    for (const auto& e : m.enums) {
        os << "  enum " << e.name << " { ";
        for (std::size_t i = 0; i < e.literals.size(); ++i) os << (i ? ", " : "") << e.literals[i];
        os << " }\n";
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Structural equality (positions ignored)

namespace {

bool eq(const ActionPtr& a, const ActionPtr& b);

bool eq(const Action& a, const Action& b) {
    if (a.kind != b.kind || a.target != b.target || a.dir != b.dir || a.input_var != b.input_var) return false;
    if (!structurally_equal(a.value, b.value)) return false;
    if (a.args.size() != b.args.size() || a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(a.args[i], b.args[i])) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!eq(a.children[i], b.children[i])) return false;
    return true;
}

bool eq(const ActionPtr& a, const ActionPtr& b) {
    if (!a || !b) return !a && !b;
    return eq(*a, *b);
}

template <typename T, typename F>
bool all_eq(const std::vector<T>& a, const std::vector<T>& b, F f) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!f(a[i], b[i])) return false;
    return true;
}

bool eq_const(const ConstDecl& a, const ConstDecl& b) {
    return a.name == b.name && a.type == b.type && structurally_equal(a.value, b.value);
}
bool eq_var(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.type == b.type && structurally_equal(a.init, b.init);
}
bool eq_event(const EventDecl& a, const EventDecl& b) { return a.name == b.name && a.type == b.type; }
bool eq_param(const Param& a, const Param& b) { return a.name == b.name && a.type == b.type; }
bool eq_fun(const FunctionDecl& a, const FunctionDecl& b) {
    return a.name == b.name && all_eq(a.params, b.params, eq_param) && a.result == b.result &&
           structurally_equal(a.body, b.body);
}
bool eq_op(const OperationDecl& a, const OperationDecl& b) {
    return a.name == b.name && all_eq(a.params, b.params, eq_param);
}
bool eq_conn(const Connection& a, const Connection& b) {
    return a.from.node == b.from.node && a.from.event == b.from.event && a.to.node == b.to.node &&
           a.to.event == b.to.event && a.async == b.async;
}
bool eq_node(const Node& a, const Node& b) {
    return a.kind == b.kind && a.name == b.name && eq(a.entry, b.entry) && eq(a.exit, b.exit);
}
bool eq_trans(const Transition& a, const Transition& b) {
    if (a.id != b.id || a.source != b.source || a.target != b.target) return false;
    if (a.trigger.has_value() != b.trigger.has_value()) return false;
    if (a.trigger) {
        const auto &x = *a.trigger, &y = *b.trigger;
        if (x.event != y.event || x.dir != y.dir || x.input_var != y.input_var ||
            !structurally_equal(x.output, y.output))
            return false;
    }
    return structurally_equal(a.guard, b.guard) && structurally_equal(a.prob, b.prob) && eq(a.action, b.action);
}
bool eq_machine(const StateMachine& a, const StateMachine& b) {
    return a.name == b.name && all_eq(a.constants, b.constants, eq_const) &&
           all_eq(a.variables, b.variables, eq_var) && all_eq(a.events, b.events, eq_event) &&
           all_eq(a.functions, b.functions, eq_fun) && all_eq(a.operations, b.operations, eq_op) &&
           all_eq(a.nodes, b.nodes, eq_node) && all_eq(a.transitions, b.transitions, eq_trans);
}

}  // namespace

bool structurally_equal(const ModelAst& a, const ModelAst& b) {
    if (a.name != b.name) return false;
    bool ok = all_eq(a.platforms, b.platforms, [](const Platform& x, const Platform& y) {
        return x.name == y.name && all_eq(x.constants, y.constants, eq_const) &&
               all_eq(x.variables, y.variables, eq_var) && all_eq(x.events, y.events, eq_event) &&
               all_eq(x.functions, y.functions, eq_fun) && all_eq(x.operations, y.operations, eq_op);
    });
    ok = ok && all_eq(a.controllers, b.controllers, [](const Controller& x, const Controller& y) {
        return x.name == y.name && x.requires_ == y.requires_ && all_eq(x.constants, y.constants, eq_const) &&
               all_eq(x.variables, y.variables, eq_var) && all_eq(x.events, y.events, eq_event) &&
               all_eq(x.machines, y.machines, eq_machine) && all_eq(x.connections, y.connections, eq_conn);
    });
    ok = ok && all_eq(a.connections, b.connections, eq_conn);
    ok = ok && all_eq(a.enums, b.enums, [](const EnumDecl& x, const EnumDecl& y) {
        return x.name == y.name && x.literals == y.literals;
    });
    return ok;
}

LooseSymbols loose_symbols(const ModelAst& m) {
    LooseSymbols out;
    auto consts = [&](const std::string& prefix, const std::vector<ConstDecl>& cs) {
        for (const auto& c : cs)
            if (!c.value) out.constants.insert(prefix + "::" + c.name);
    };
    auto callables = [&](const std::vector<FunctionDecl>& fs, const std::vector<OperationDecl>& ops) {
        for (const auto& f : fs)
            if (!f.body) out.functions.insert(f.name);
        for (const auto& o : ops) out.operations.insert(o.name);
    };
    for (const auto& p : m.platforms) {
        consts(m.name + "::" + p.name, p.constants);
        callables(p.functions, p.operations);
    }
    for (const auto& c : m.controllers) {
        consts(m.name + "::" + c.name, c.constants);
        for (const auto& sm : c.machines) {
            consts(m.name + "::" + c.name + "::" + sm.name, sm.constants);
            callables(sm.functions, sm.operations);
        }
    }
    return out;
}

}  // namespace rcprob
