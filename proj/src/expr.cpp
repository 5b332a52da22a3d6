#include "rcprob/expr.h"

#include <sstream>

namespace rcprob {

std::string QualifiedName::str() const {
    std::string s;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) s += "::";
        s += segments[i];
    }
    return s;
}

const char* to_string(EventDir d) { return d == EventDir::In ? "in" : "out"; }

std::string EventRef::str() const {
    std::string s = name.str() + "." + to_string(dir);
    if (valued) s += ".val";
    return s;
}

const char* to_string(SimMethod m) {
    switch (m) {
        case SimMethod::CI: return "CI";
        case SimMethod::ACI: return "ACI";
        case SimMethod::APMC: return "APMC";
        case SimMethod::SPRT: return "SPRT";
    }
    return "?";
}

const char* op_symbol(Op op) {
    switch (op) {
        case Op::Not: return "not";
        case Op::Neg: return "-";
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Mod: return "%";
        case Op::Eq: return "==";
        case Op::Neq: return "!=";
        case Op::Lt: return "<";
        case Op::Le: return "<=";
        case Op::Gt: return ">";
        case Op::Ge: return ">=";
        case Op::And: return "/\\";
        case Op::Or: return "\\/";
        case Op::Implies: return "=>";
        case Op::Iff: return "iff";
        case Op::Next: return "Next";
        case Op::Until: return "Until";
        case Op::Finally: return "Finally";
        case Op::Globally: return "Globally";
        case Op::WeakUntil: return "Weak Until";
        case Op::Release: return "Release";
        case Op::Reachable: return "Reachable";
        case Op::Ltl: return "LTL";
        case Op::Cumul: return "Cumul";
        case Op::Total: return "Total";
        case Op::None: return "";
    }
    return "";
}

ExprPtr make_bool(bool v, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::BoolLit;
    e->bool_value = v;
    e->pos = pos;
    return e;
}

ExprPtr make_number(const Rational& v, bool is_int, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::NumLit;
    e->number = v;
    e->number_is_int = is_int && v.is_integer();
    e->pos = pos;
    return e;
}

ExprPtr make_name(QualifiedName qn) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Name;
    e->pos = qn.pos;
    e->name = std::move(qn);
    return e;
}

ExprPtr make_unary(Op op, ExprPtr a, SourcePos pos) { return make_node(ExprKind::Unary, op, {std::move(a)}, pos); }

ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b, SourcePos pos) {
    return make_node(ExprKind::Binary, op, {std::move(a), std::move(b)}, pos);
}

ExprPtr make_node(ExprKind kind, Op op, std::vector<ExprPtr> children, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->op = op;
    e->children = std::move(children);
    e->pos = pos;
    return e;
}

bool is_temporal_kind(const Expr& e) { return e.kind == ExprKind::Temporal; }

bool contains_temporal(const Expr& e) {
    if (e.kind == ExprKind::Temporal) return true;
    // State formulas encapsulate their own path formulas.
    if (e.kind == ExprKind::Prob || e.kind == ExprKind::Reward || e.kind == ExprKind::Forall ||
        e.kind == ExprKind::Exists)
        return false;
    for (const auto& c : e.children)
        if (c && contains_temporal(*c)) return true;
    return false;
}

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Temporal: return 1;
        case ExprKind::Binary:
            switch (e.op) {
                case Op::Iff: return 2;
                case Op::Implies: return 3;
                case Op::Or: return 4;
                case Op::And: return 5;
                case Op::Eq: case Op::Neq: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 7;
                case Op::Add: case Op::Sub: return 8;
                default: return 9;
            }
        case ExprKind::Unary: return e.op == Op::Not ? 6 : 10;
        case ExprKind::IsIn: return 7;
        case ExprKind::NumLit: return e.number < Rational(0) ? 10 : 11;
        default: return 11;
    }
}

namespace {

void print(std::ostream& os, const Expr& e);

void print_at(std::ostream& os, const ExprPtr& e, int min_prec) {
    if (!e) return;
    if (precedence(*e) < min_prec) {
        os << "(";
        print(os, *e);
        os << ")";
    } else {
        print(os, *e);
    }
}

void print_bound(std::ostream& os, const Bound& b) {
    os << op_symbol(b.cmp);
    print_at(os, b.value, 10);
}

void print_sim(std::ostream& os, const SimMethodSpec& s) {
    os << " using sim with " << to_string(s.method);
    std::vector<std::pair<const char*, ExprPtr>> params;
    if (s.method == SimMethod::CI || s.method == SimMethod::ACI) {
        params = {{"w", s.w}, {"alpha", s.alpha}, {"n", s.n}};
    } else if (s.method == SimMethod::APMC) {
        params = {{"epsilon", s.epsilon}, {"delta", s.delta}, {"n", s.n}};
    } else {
        params = {{"alpha", s.alpha}, {"delta", s.delta}};
    }
    bool first = true;
    for (auto& [k, v] : params) {
        if (!v) continue;
        os << (first ? " at " : ", ") << k << "=";
        print_at(os, v, 10);
        first = false;
    }
    if (s.pathlen) {
        os << ", and pathlen=";
        print_at(os, s.pathlen, 10);
    }
}

void print_query(std::ostream& os, QueryKind q) {
    if (q == QueryKind::Min) os << " min =?";
    else if (q == QueryKind::Max) os << " max =?";
    else os << "=?";
}

void print(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case ExprKind::BoolLit: os << (e.bool_value ? "true" : "false"); return;
        case ExprKind::NumLit: os << e.number.decimal_str(); return;
        case ExprKind::Name: os << e.name.str(); return;
        case ExprKind::Unary:
            if (e.op == Op::Not) {
                os << "not ";
                print_at(os, e.children[0], 6);
            } else {
                os << "-";
                print_at(os, e.children[0], 10);
            }
            return;
        case ExprKind::Binary: {
            int p = precedence(e);
            int lp = p, rp = p + 1;
            if (e.op == Op::Implies) { lp = p + 1; rp = p; }
            if (p == 7) { lp = rp = p + 1; }
            print_at(os, e.children[0], lp);
            os << " " << op_symbol(e.op) << " ";
            print_at(os, e.children[1], rp);
            return;
        }
        case ExprKind::Ite:
            os << "if ";
            print_at(os, e.children[0], 0);
            os << " then ";
            print_at(os, e.children[1], 0);
            os << " else ";
            print_at(os, e.children[2], 0);
            os << " end";
            return;
        case ExprKind::Call:
            if (e.op == Op::None && !e.bool_value) os << "&";  // spec-style call
            os << e.name.str() << "(";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) os << ", ";
                print_at(os, e.children[i], 0);
            }
            os << ")";
            return;
        case ExprKind::SetExt:
            os << "{";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) os << ", ";
                print_at(os, e.children[i], 0);
            }
            os << "}";
            return;
        case ExprKind::SetRange:
            os << "{";
            print_at(os, e.children[0], 0);
            os << " to ";
            print_at(os, e.children[1], 0);
            if (e.step_given) {
                os << " by step ";
                print_at(os, e.children[2], 0);
            }
            os << "}";
            return;
        case ExprKind::IsIn: os << e.name.str() << " is in " << e.name2.str(); return;
        case ExprKind::ModVar: os << "@" << e.name.str(); return;
        case ExprKind::LabelRef:
            if (e.name.str() == "deadlock" || e.name.str() == "init") os << e.name.str();
            else os << "#" << e.name.str();
            return;
        case ExprKind::FormulaRef: os << "`" << e.name.str(); return;
        case ExprKind::ParamRef: os << "$$" << e.name.str(); return;
        case ExprKind::EventVal: os << e.event.str(); return;
        case ExprKind::Index:
            print_at(os, e.children[0], 11);
            os << "[";
            for (std::size_t i = 1; i < e.children.size(); ++i) {
                if (i > 1) os << ", ";
                print_at(os, e.children[i], 0);
            }
            os << "]";
            return;
        case ExprKind::Prob:
        case ExprKind::Reward:
            os << (e.kind == ExprKind::Prob ? "Prob" : "Reward");
            if (e.kind == ExprKind::Reward && !e.name.empty()) os << " {" << e.name.str() << "} ";
            if (e.query) print_query(os, *e.query);
            else if (e.bound) print_bound(os, *e.bound);
            os << " of [";
            print_at(os, e.children[0], 0);
            os << "]";
            if (e.sim) print_sim(os, *e.sim);
            return;
        case ExprKind::Forall:
        case ExprKind::Exists:
            os << (e.kind == ExprKind::Forall ? "Forall [" : "Exists [");
            print_at(os, e.children[0], 0);
            os << "]";
            return;
        case ExprKind::Temporal:
            if (e.op == Op::Until || e.op == Op::WeakUntil || e.op == Op::Release) {
                print_at(os, e.children[0], 2);
                os << " " << op_symbol(e.op);
                if (e.bound) print_bound(os, *e.bound);
                os << " ";
                print_at(os, e.children[1], 1);
            } else {
                os << op_symbol(e.op);
                if (e.bound) print_bound(os, *e.bound);
                os << " ";
                print_at(os, e.children[0], 1);
            }
            return;
        case ExprKind::RewardPath:
            os << op_symbol(e.op);
            if (e.op != Op::Total) {
                os << " ";
                print_at(os, e.children[0], 1);
            }
            return;
    }
}

bool bound_equal(const std::optional<Bound>& a, const std::optional<Bound>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->cmp == b->cmp && structurally_equal(a->value, b->value);
}

bool sim_equal(const std::optional<SimMethodSpec>& a, const std::optional<SimMethodSpec>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->method == b->method && structurally_equal(a->w, b->w) && structurally_equal(a->alpha, b->alpha) &&
           structurally_equal(a->n, b->n) && structurally_equal(a->epsilon, b->epsilon) &&
           structurally_equal(a->delta, b->delta) && structurally_equal(a->pathlen, b->pathlen);
}

}  // namespace

std::string to_text(const Expr& e) {
    std::ostringstream os;
    print(os, e);
    return os.str();
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return structurally_equal(*a, *b);
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.op != b.op) return false;
    if (a.kind == ExprKind::BoolLit && a.bool_value != b.bool_value) return false;
    if (a.kind == ExprKind::NumLit && a.number != b.number) return false;
    if (a.kind == ExprKind::Call && a.bool_value != b.bool_value) return false;
    if (!(a.name == b.name) || !(a.name2 == b.name2)) return false;
    if (a.kind == ExprKind::EventVal && !(a.event == b.event)) return false;
    if (a.step_given != b.step_given) return false;
    if (a.query != b.query || !bound_equal(a.bound, b.bound) || !sim_equal(a.sim, b.sim)) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    return true;
}

}  // namespace rcprob
