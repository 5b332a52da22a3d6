#include "rcprob/expr_parser.h"

#include <set>

namespace rcprob {

namespace {

const std::set<std::string>& spec_keywords() {
    static const std::set<std::string> kw = {
        "Prob",     "Reward",    "Forall",  "Exists", "Next",  "Until", "Finally", "Globally", "Weak",
        "Release",  "Reachable", "LTL",     "Cumul",  "Total", "of",    "using",   "not",      "iff",
        "if",       "then",      "else",    "end",    "true",  "false", "deadlock", "init",    "is",
        "with",     "label",     "formula", "rewards", "endrewards", "defs", "pmodules", "pmodule",
        "constants", "prob",     "property", "to",    "by",    "step",  "set",     "from",     "and",
    };
    return kw;
}

const std::set<std::string>& model_keywords() {
    static const std::set<std::string> kw = {"if", "then", "else", "end", "not", "true", "false", "iff"};
    return kw;
}

std::optional<Op> rel_op(const Token& t) {
    if (t.kind != TokKind::Symbol) return std::nullopt;
    if (t.text == "==") return Op::Eq;
    if (t.text == "!=") return Op::Neq;
    if (t.text == "<") return Op::Lt;
    if (t.text == "<=") return Op::Le;
    if (t.text == ">") return Op::Gt;
    if (t.text == ">=") return Op::Ge;
    return std::nullopt;
}

Rational number_value(const Token& t) { return Rational::parse_decimal(t.text); }

bool number_is_int(const Token& t) {
    return t.text.find_first_of(".eE") == std::string::npos;
}

}  // namespace

ExprPtr ExprParser::parse() {
    ExprPtr e = parse_temporal();
    return e;
}

bool ExprParser::at_temporal_keyword() const {
    return ts_.is_kw("Next") || ts_.is_kw("Finally") || ts_.is_kw("Globally") || ts_.is_kw("Until") ||
           ts_.is_kw("Release") || (ts_.is_kw("Weak") && ts_.is_kw("Until", 1));
}

ExprPtr ExprParser::parse_temporal() {
    if (dialect_ == Dialect::Spec && at_temporal_keyword()) {
        if (path_depth_ == 0) ts_.fail("temporal operator outside a formula bracket");
        const Token& t = ts_.peek();
        SourcePos pos = t.pos;
        if (ts_.accept_kw("Next")) {
            if (rel_op(ts_.peek())) ts_.fail("bounded Next is not supported");
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Temporal;
            e->op = Op::Next;
            e->pos = pos;
            e->children = {parse_temporal()};
            return e;
        }
        if (ts_.is_kw("Finally") || ts_.is_kw("Globally")) {
            Op op = ts_.next().text == "Finally" ? Op::Finally : Op::Globally;
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Temporal;
            e->op = op;
            e->pos = pos;
            e->bound = parse_opt_bound();
            e->children = {parse_temporal()};
            return e;
        }
        ts_.fail("expected an expression before binary temporal operator");
    }
    ExprPtr lhs = parse_iff();
    if (dialect_ == Dialect::Spec && (ts_.is_kw("Until") || ts_.is_kw("Release") ||
                                      (ts_.is_kw("Weak") && ts_.is_kw("Until", 1)))) {
        if (path_depth_ == 0) ts_.fail("temporal operator outside a formula bracket");
        SourcePos pos = ts_.peek().pos;
        Op op;
        if (ts_.accept_kw("Until")) op = Op::Until;
        else if (ts_.accept_kw("Release")) op = Op::Release;
        else {
            ts_.next();
            ts_.next();
            op = Op::WeakUntil;
        }
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Temporal;
        e->op = op;
        e->pos = pos;
        e->bound = parse_opt_bound();
        e->children = {lhs, parse_temporal()};
        return e;
    }
    return lhs;
}

std::optional<Bound> ExprParser::parse_opt_bound() {
    auto op = rel_op(ts_.peek());
    if (!op) return std::nullopt;
    if (*op == Op::Eq || *op == Op::Neq) ts_.fail("expected one of > >= < <= in a bound");
    ts_.next();
    Bound b;
    b.cmp = *op;
    b.value = parse_operand();
    return b;
}

ExprPtr ExprParser::parse_iff() {
    ExprPtr lhs = parse_implies();
    while (ts_.is_kw("iff")) {
        SourcePos pos = ts_.next().pos;
        lhs = make_binary(Op::Iff, lhs, parse_implies(), pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_implies() {
    ExprPtr lhs = parse_or();
    if (ts_.is_sym("=>")) {
        SourcePos pos = ts_.next().pos;
        return make_binary(Op::Implies, lhs, parse_implies(), pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_or() {
    ExprPtr lhs = parse_and();
    while (ts_.is_sym("\\/")) {
        SourcePos pos = ts_.next().pos;
        lhs = make_binary(Op::Or, lhs, parse_and(), pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_and() {
    ExprPtr lhs = parse_not();
    while (ts_.is_sym("/\\")) {
        SourcePos pos = ts_.next().pos;
        lhs = make_binary(Op::And, lhs, parse_not(), pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_not() {
    if (ts_.is_kw("not")) {
        SourcePos pos = ts_.next().pos;
        return make_unary(Op::Not, parse_not(), pos);
    }
    return parse_rel();
}

ExprPtr ExprParser::parse_rel() {
    ExprPtr lhs = parse_add();
    if (auto op = rel_op(ts_.peek())) {
        SourcePos pos = ts_.next().pos;
        ExprPtr rhs = parse_add();
        if (rel_op(ts_.peek())) ts_.fail("relational operators do not chain");
        return make_binary(*op, lhs, rhs, pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_add() {
    ExprPtr lhs = parse_mul();
    while (ts_.is_sym("+") || ts_.is_sym("-")) {
        const Token& t = ts_.next();
        Op op = t.text == "+" ? Op::Add : Op::Sub;
        lhs = make_binary(op, lhs, parse_mul(), t.pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_mul() {
    ExprPtr lhs = parse_unary();
    while (ts_.is_sym("*") || ts_.is_sym("/") || ts_.is_sym("%")) {
        const Token& t = ts_.next();
        Op op = t.text == "*" ? Op::Mul : t.text == "/" ? Op::Div : Op::Mod;
        lhs = make_binary(op, lhs, parse_unary(), t.pos);
    }
    return lhs;
}

ExprPtr ExprParser::parse_unary() {
    if (ts_.is_sym("-")) {
        SourcePos pos = ts_.next().pos;
        return make_unary(Op::Neg, parse_unary(), pos);
    }
    return parse_postfix();
}

ExprPtr ExprParser::parse_operand() { return parse_unary(); }

ExprPtr ExprParser::parse_postfix() {
    ExprPtr e = parse_primary();
    while (dialect_ == Dialect::Spec && ts_.is_sym("[")) {
        SourcePos pos = ts_.next().pos;
        std::vector<ExprPtr> kids{e};
        for (auto& a : parse_args("]")) kids.push_back(a);
        if (kids.size() < 2) ts_.fail("expected an index expression");
        e = make_node(ExprKind::Index, Op::None, std::move(kids), pos);
    }
    return e;
}

std::vector<ExprPtr> ExprParser::parse_args(const char* close) {
    std::vector<ExprPtr> args;
    if (ts_.accept_sym(close)) return args;
    // Arguments and indices never carry path formulas, but nested brackets reset the context.
    int saved = path_depth_;
    path_depth_ = 0;
    do {
        args.push_back(parse());
    } while (ts_.accept_sym(","));
    path_depth_ = saved;
    ts_.expect_sym(close);
    return args;
}

QualifiedName ExprParser::parse_qualified_name() {
    QualifiedName qn;
    const Token& first = ts_.expect_ident("name");
    qn.pos = first.pos;
    qn.segments.push_back(first.text);
    while (ts_.is_sym("::") && ts_.is_ident(1)) {
        ts_.next();
        qn.segments.push_back(ts_.next().text);
    }
    return qn;
}

EventRef ExprParser::parse_event_ref() {
    EventRef ev;
    ev.name = parse_qualified_name();
    ts_.expect_sym(".");
    if (ts_.accept_kw("in")) ev.dir = EventDir::In;
    else if (ts_.accept_kw("out")) ev.dir = EventDir::Out;
    else ts_.fail("expected 'in' or 'out' after event name");
    if (ts_.is_sym(".") && ts_.is_kw("val", 1)) {
        ts_.next();
        ts_.next();
        ev.valued = true;
    }
    return ev;
}

ExprPtr ExprParser::parse_primary() {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::Number) {
        ts_.next();
        return make_number(number_value(t), number_is_int(t), t.pos);
    }
    if (ts_.is_kw("true") || ts_.is_kw("false")) {
        ts_.next();
        return make_bool(t.text == "true", t.pos);
    }
    if (ts_.accept_sym("(")) {
        ExprPtr e = parse_temporal();
        ts_.expect_sym(")");
        return e;
    }
    if (ts_.is_kw("if")) {
        ts_.next();
        // Conditionals are state-level; a path formula inside is meaningless.
        int saved = path_depth_;
        path_depth_ = 0;
        ExprPtr c = parse();
        ts_.expect_kw("then");
        ExprPtr a = parse();
        ts_.expect_kw("else");
        ExprPtr b = parse();
        ts_.expect_kw("end");
        path_depth_ = saved;
        return make_node(ExprKind::Ite, Op::None, {c, a, b}, t.pos);
    }
    return dialect_ == Dialect::Spec ? parse_spec_primary() : parse_model_primary();
}

ExprPtr ExprParser::parse_model_primary() {
    const Token& t = ts_.peek();
    if (t.kind != TokKind::Ident || model_keywords().count(t.text)) ts_.fail("expected an expression");
    QualifiedName qn = parse_qualified_name();
    if (qn.segments.size() > 2) ts_.fail_at(t, "qualified names in models have at most two segments");
    if (qn.segments.size() == 1 && ts_.accept_sym("(")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Call;
        e->name = qn;
        e->pos = qn.pos;
        e->bool_value = true;
        e->children = parse_args(")");
        return e;
    }
    return make_name(std::move(qn));
}

ExprPtr ExprParser::parse_spec_primary() {
    const Token& t = ts_.peek();
    SourcePos pos = t.pos;
    if (ts_.is_kw("Prob") || ts_.is_kw("Reward") || ts_.is_kw("Forall") || ts_.is_kw("Exists")) {
        return parse_state_formula();
    }
    if (at_temporal_keyword()) {
        if (path_depth_ == 0 || !(ts_.is_kw("Next") || ts_.is_kw("Finally") || ts_.is_kw("Globally"))) {
            ts_.fail("temporal operator outside a formula bracket");
        }
        return parse_temporal();  // e.g. the right operand of `p => Finally q`
    }
    if (ts_.is_kw("Reachable") || ts_.is_kw("LTL") || ts_.is_kw("Cumul") || ts_.is_kw("Total")) {
        ts_.fail("reward path formula outside a Reward operator");
    }
    if (ts_.is_kw("deadlock") || ts_.is_kw("init")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::LabelRef;
        e->name.segments = {ts_.next().text};
        e->name.pos = pos;
        e->pos = pos;
        return e;
    }
    auto ref = [&](ExprKind kind) {
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->pos = pos;
        const Token& n = ts_.expect_ident("name");
        e->name.segments = {n.text};
        e->name.pos = n.pos;
        return e;
    };
    if (ts_.accept_sym("#")) return ref(ExprKind::LabelRef);
    if (ts_.accept_sym("``") || ts_.accept_sym("$$")) return ref(ExprKind::ParamRef);
    if (ts_.accept_sym("`") || ts_.accept_sym("$")) return ref(ExprKind::FormulaRef);
    if (ts_.accept_sym("@")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::ModVar;
        e->pos = pos;
        e->name = parse_qualified_name();
        if (e->name.segments.size() != 1 && e->name.segments.size() != 3) {
            ts_.fail_at(t, "module variable reference must be @v or @Mods::Mod::v");
        }
        return e;
    }
    if (ts_.accept_sym("&")) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Call;
        e->pos = pos;
        const Token& n = ts_.expect_ident("function name");
        e->name.segments = {n.text};
        e->name.pos = n.pos;
        ts_.expect_sym("(");
        e->children = parse_args(")");
        return e;
    }
    if (ts_.accept_sym("{")) {
        int saved = path_depth_;
        path_depth_ = 0;
        ExprPtr first = parse();
        if (ts_.accept_kw("to")) {
            ExprPtr hi = parse();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::SetRange;
            e->pos = pos;
            e->children = {first, hi};
            if (ts_.accept_kw("by")) {
                ts_.expect_kw("step");
                e->children.push_back(parse());
                e->step_given = true;
            } else {
                e->children.push_back(make_number(Rational(1), true, pos));
            }
            ts_.expect_sym("}");
            path_depth_ = saved;
            return e;
        }
        std::vector<ExprPtr> items{first};
        while (ts_.accept_sym(",")) items.push_back(parse());
        ts_.expect_sym("}");
        path_depth_ = saved;
        return make_node(ExprKind::SetExt, Op::None, std::move(items), pos);
    }
    if (t.kind == TokKind::Ident) {
        if (spec_keywords().count(t.text)) ts_.fail("expected an expression");
        QualifiedName qn = parse_qualified_name();
        if (ts_.is_sym(".") && (ts_.is_kw("in", 1) || ts_.is_kw("out", 1))) {
            EventRef ev;
            ev.name = qn;
            ts_.next();
            ev.dir = ts_.next().text == "in" ? EventDir::In : EventDir::Out;
            if (!(ts_.is_sym(".") && ts_.is_kw("val", 1))) {
                ts_.fail("event reference in an expression needs '.val'");
            }
            ts_.next();
            ts_.next();
            ev.valued = true;
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::EventVal;
            e->pos = pos;
            e->event = ev;
            return e;
        }
        if (ts_.is_kw("is") && ts_.is_kw("in", 1)) {
            ts_.next();
            ts_.next();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::IsIn;
            e->pos = pos;
            e->name = qn;
            e->name2 = parse_qualified_name();
            return e;
        }
        if (ts_.is_sym("(")) ts_.fail("function calls in specifications are written '&F(...)'");
        return make_name(std::move(qn));
    }
    ts_.fail("expected an expression");
}

ExprPtr ExprParser::parse_bracket_path() {
    ts_.expect_sym("[");
    ++path_depth_;
    ExprPtr body = parse_temporal();
    --path_depth_;
    ts_.expect_sym("]");
    return body;
}

ExprPtr ExprParser::parse_reward_path() {
    ts_.expect_sym("[");
    const Token& t = ts_.peek();
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::RewardPath;
    e->pos = t.pos;
    if (ts_.accept_kw("Reachable")) {
        e->op = Op::Reachable;
        e->children = {parse()};
    } else if (ts_.accept_kw("LTL")) {
        e->op = Op::Ltl;
        ++path_depth_;
        e->children = {parse_temporal()};
        --path_depth_;
    } else if (ts_.accept_kw("Cumul")) {
        e->op = Op::Cumul;
        e->children = {parse()};
    } else if (ts_.accept_kw("Total")) {
        e->op = Op::Total;
    } else {
        ts_.fail("expected Reachable, LTL, Cumul or Total");
    }
    ts_.expect_sym("]");
    return e;
}

ExprPtr ExprParser::parse_state_formula() {
    const Token& t = ts_.next();
    auto e = std::make_shared<Expr>();
    e->pos = t.pos;
    if (t.text == "Forall" || t.text == "Exists") {
        e->kind = t.text == "Forall" ? ExprKind::Forall : ExprKind::Exists;
        e->children = {parse_bracket_path()};
        return e;
    }
    e->kind = t.text == "Prob" ? ExprKind::Prob : ExprKind::Reward;
    if (e->kind == ExprKind::Reward && ts_.accept_sym("{")) {
        const Token& n = ts_.expect_ident("rewards name");
        e->name.segments = {n.text};
        e->name.pos = n.pos;
        ts_.expect_sym("}");
    }
    if (ts_.accept_sym("?=") || ts_.accept_sym("=?")) {
        e->query = QueryKind::Plain;
    } else if (ts_.is_kw("min") || ts_.is_kw("max")) {
        e->query = ts_.next().text == "min" ? QueryKind::Min : QueryKind::Max;
        if (!ts_.accept_sym("?=") && !ts_.accept_sym("=?")) ts_.fail("expected '?=' after min/max");
    } else {
        e->bound = parse_opt_bound();
        if (!e->bound) ts_.fail("expected a bound or a query");
    }
    ts_.expect_kw("of");
    e->children = {e->kind == ExprKind::Prob ? parse_bracket_path() : parse_reward_path()};
    if (ts_.is_kw("using")) e->sim = parse_use_method();
    return e;
}

SimMethodSpec ExprParser::parse_use_method() {
    SimMethodSpec s;
    s.pos = ts_.expect_kw("using").pos;
    ts_.expect_kw("sim");
    ts_.expect_kw("with");
    const Token& m = ts_.expect_ident("simulation method");
    if (m.text == "CI") s.method = SimMethod::CI;
    else if (m.text == "ACI") s.method = SimMethod::ACI;
    else if (m.text == "APMC") s.method = SimMethod::APMC;
    else if (m.text == "SPRT") s.method = SimMethod::SPRT;
    else ts_.fail_at(m, "expected CI, ACI, APMC or SPRT");

    auto allowed = [&](const std::string& p) {
        switch (s.method) {
            case SimMethod::CI:
            case SimMethod::ACI: return p == "w" || p == "alpha" || p == "n";
            case SimMethod::APMC: return p == "epsilon" || p == "delta" || p == "n";
            case SimMethod::SPRT: return p == "alpha" || p == "delta";
        }
        return false;
    };
    auto slot = [&](const std::string& p) -> ExprPtr& {
        if (p == "w") return s.w;
        if (p == "alpha") return s.alpha;
        if (p == "n") return s.n;
        if (p == "epsilon") return s.epsilon;
        if (p == "delta") return s.delta;
        return s.pathlen;
    };
    static const std::set<std::string> params = {"w", "alpha", "n", "epsilon", "delta", "pathlen"};

    bool at_seen = ts_.accept_kw("at");
    bool first = true;
    for (;;) {
        // Separators: optional ',' and optional 'and' before each parameter.
        std::size_t k = 0;
        if (!first || !at_seen) {
            if (ts_.is_sym(",", k)) ++k;
            if (ts_.is_kw("and", k)) ++k;
        }
        const Token& p = ts_.peek(k);
        if (p.kind != TokKind::Ident || !params.count(p.text) || !ts_.is_sym("=", k + 1)) break;
        for (std::size_t i = 0; i < k; ++i) ts_.next();
        ts_.next();
        ts_.next();
        if (p.text != "pathlen" && !at_seen) ts_.fail_at(p, "simulation parameters follow 'at'");
        if (p.text != "pathlen" && !allowed(p.text)) {
            throw Error("SYNTAX",
                        "parameter '" + p.text + "' is not valid for method " + to_string(s.method), p.pos);
        }
        ExprPtr& dst = slot(p.text);
        if (dst) throw Error("SYNTAX", "duplicate simulation parameter '" + p.text + "'", p.pos);
        dst = parse_operand();
        first = false;
    }
    return s;
}

ExprPtr parse_expression(const std::string& text) {
    TokenStream ts(tokenize(text));
    ExprParser p(ts, Dialect::Spec);
    ExprPtr e = p.parse();
    if (!ts.at_end()) ts.fail("unexpected trailing input");
    return e;
}

SimMethodSpec parse_sim_method(const std::string& text) {
    TokenStream ts(tokenize(text));
    ExprParser p(ts, Dialect::Spec);
    SimMethodSpec s = p.parse_use_method();
    if (!ts.at_end()) ts.fail("unexpected trailing input");
    return s;
}

}  // namespace rcprob
