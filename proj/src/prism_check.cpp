// Recursive-descent checker for the PRISM subset written by the emitter: syntax, declaration before
// use, one declaration per name, and updates only to variables the module may write.

#include <cctype>
#include <set>

#include "rcprob/prism.h"

namespace rcprob {

namespace {

struct Tok {
    enum K { Ident, Num, Str, Sym, End } k = End;
    std::string text;
    int line = 0;
};

std::vector<Tok> lex(const std::string& s, std::vector<std::string>& errs) {
    static const char* syms[] = {"<=>", "->", "=>", "<=", ">=", "!=", "..", "=", "<", ">", "!", "&", "|", "+",
                                 "-",   "*",  "/",  "?",  ":",  ";",  ",",  "(", ")", "[", "]", "{", "}", "'"};
    std::vector<Tok> out;
    int line = 1;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), line});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    j = k;
                    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                }
            }
            out.push_back({Tok::Num, s.substr(i, j - i), line});
            i = j;
        } else if (c == '"') {
            std::size_t j = s.find('"', i + 1);
            if (j == std::string::npos) {
                errs.push_back("line " + std::to_string(line) + ": unterminated string");
                break;
            }
            out.push_back({Tok::Str, s.substr(i + 1, j - i - 1), line});
            i = j + 1;
        } else {
            bool ok = false;
            for (const char* sym : syms) {
                std::size_t n = std::char_traits<char>::length(sym);
                if (s.compare(i, n, sym) == 0) {
                    out.push_back({Tok::Sym, sym, line});
                    i += n;
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                errs.push_back("line " + std::to_string(line) + ": unexpected character '" + std::string(1, c) + "'");
                ++i;
            }
        }
    }
    out.push_back({Tok::End, "", line});
    return out;
}

struct Fail {
    std::string msg;
};

const std::set<std::string> kFunctions = {"floor", "ceil", "mod", "min", "max", "pow", "log"};

class Checker {
   public:
    Checker(std::vector<Tok> toks, std::vector<std::string>& errs, bool props) : t_(std::move(toks)), errs_(errs), props_(props) {}

    // Names visible to expressions.
    std::set<std::string> consts, vars, formulas, labels{"deadlock", "init"};
    std::map<std::string, std::string> var_owner;  // var -> module ("" for globals)

    void model() {
        try {
            if (!accept("dtmc") && !accept("mdp")) fail("expected 'dtmc' or 'mdp'");
            while (!at_end()) {
                if (accept("const")) const_decl();
                else if (accept("global")) var_decl("");
                else if (accept("formula")) formula_decl();
                else if (accept("label")) label_decl();
                else if (accept("module")) module();
                else if (accept("rewards")) rewards();
                else fail("unexpected '" + peek().text + "'");
            }
        } catch (const Fail& f) {
            errs_.push_back(f.msg);
        }
    }

    void properties() {
        try {
            while (!at_end()) {
                if (accept("const")) const_decl();
                else if (accept("formula")) formula_decl();
                else if (accept("label")) label_decl();
                else {
                    if (peek().k == Tok::Str && peek(1).text == ":") {
                        next();
                        next();
                    }
                    path();
                    expect(";");
                }
            }
        } catch (const Fail& f) {
            errs_.push_back(f.msg);
        }
    }

   private:
    const Tok& peek(std::size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
    const Tok& next() { return t_[std::min(pos_++, t_.size() - 1)]; }
    bool at_end() const { return peek().k == Tok::End; }
    bool is(const std::string& s, std::size_t k = 0) const {
        const Tok& t = peek(k);
        return (t.k == Tok::Sym || t.k == Tok::Ident) && t.text == s;
    }
    bool accept(const std::string& s) {
        if (!is(s)) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& m) const {
        throw Fail{"line " + std::to_string(peek().line) + ": " + m};
    }
    void expect(const std::string& s) {
        if (!accept(s)) fail("expected '" + s + "' but found '" + peek().text + "'");
    }
    std::string ident() {
        if (peek().k != Tok::Ident) fail("expected an identifier but found '" + peek().text + "'");
        return next().text;
    }
    void declare(const std::string& name) {
        if (consts.count(name) || vars.count(name) || formulas.count(name))
            errs_.push_back("line " + std::to_string(peek().line) + ": '" + name + "' is declared twice");
    }

    void const_decl() {
        if (!accept("int") && !accept("double")) accept("bool");
        std::string n = ident();
        declare(n);
        if (accept("=")) expr();
        expect(";");
        consts.insert(n);
    }
    void formula_decl() {
        std::string n = ident();
        declare(n);
        expect("=");
        if (props_) path();
        else expr();
        expect(";");
        formulas.insert(n);
    }
    void label_decl() {
        if (peek().k != Tok::Str) fail("expected a quoted label name");
        std::string n = next().text;
        if (labels.count(n) && n != "deadlock" && n != "init") errs_.push_back("label '" + n + "' is declared twice");
        if (n == "deadlock" || n == "init") errs_.push_back("label '" + n + "' is built in");
        expect("=");
        expr();
        expect(";");
        labels.insert(n);
    }
    void var_decl(const std::string& module) {
        std::string n = ident();
        declare(n);
        expect(":");
        if (accept("[")) {
            expr();
            expect("..");
            expr();
            expect("]");
        } else if (!accept("bool")) {
            fail("expected a range or 'bool' for '" + n + "'");
        }
        if (accept("init")) expr();
        expect(";");
        vars.insert(n);
        var_owner[n] = module;
    }
    void module() {
        std::string m = ident();
        if (modules_.count(m)) errs_.push_back("module '" + m + "' is declared twice");
        modules_.insert(m);
        while (peek().k == Tok::Ident && is(":", 1)) var_decl(m);
        while (accept("[")) {
            if (peek().k == Tok::Ident) next();
            expect("]");
            expr();
            expect("->");
            do {
                if (!update_starts()) {
                    expr();
                    expect(":");
                }
                update(m);
            } while (accept("+"));
            expect(";");
        }
        expect("endmodule");
    }
    bool update_starts() const {
        if (is("true") && (is(";", 1) || is("+", 1))) return true;
        return is("(") && peek(1).k == Tok::Ident && is("'", 2);
    }
    void update(const std::string& module) {
        if (accept("true")) return;
        do {
            expect("(");
            std::string v = ident();
            auto it = var_owner.find(v);
            if (it == var_owner.end())
                errs_.push_back("line " + std::to_string(peek().line) + ": update of undeclared variable '" + v + "'");
            else if (!it->second.empty() && it->second != module)
                errs_.push_back("line " + std::to_string(peek().line) + ": module '" + module + "' updates '" + v +
                                "' owned by '" + it->second + "'");
            expect("'");
            expect("=");
            expr();
            expect(")");
        } while (accept("&"));
    }
    void rewards() {
        if (peek().k == Tok::Str) next();
        while (!accept("endrewards")) {
            if (at_end()) fail("missing 'endrewards'");
            if (accept("[")) {
                if (peek().k == Tok::Ident) next();
                expect("]");
            }
            expr();
            expect(":");
            expr();
            expect(";");
        }
    }

    // Expressions, loosest first.
    void expr() {
        implies();
        if (accept("?")) {
            expr();
            expect(":");
            expr();
        }
    }
    void implies() {
        iff();
        if (accept("=>")) implies();
    }
    void iff() {
        disj();
        while (accept("<=>")) disj();
    }
    void disj() {
        conj();
        while (accept("|")) conj();
    }
    void conj() {
        neg();
        while (accept("&")) neg();
    }
    void neg() {
        if (accept("!")) return neg();
        eq();
    }
    void eq() {
        rel();
        while (accept("=") || accept("!=")) rel();
    }
    void rel() {
        add();
        while (accept("<") || accept("<=") || accept(">") || accept(">=")) add();
    }
    void add() {
        mul();
        while (accept("+") || accept("-")) mul();
    }
    void mul() {
        unary();
        while (accept("*") || accept("/")) unary();
    }
    void unary() {
        if (accept("-")) return unary();
        prim();
    }
    void bound_op() {
        if (accept("<=") || accept("<") || accept(">=") || accept(">")) {
            unary();
            return;
        }
        fail("expected a bound");
    }
    void query_or_bound() {
        if (accept("=")) {
            expect("?");
            return;
        }
        bound_op();
    }
    void prim() {
        const Tok& t = peek();
        if (t.k == Tok::Num) {
            next();
            return;
        }
        if (t.k == Tok::Str) {
            if (!props_) fail("labels cannot be used in a model file");
            if (!labels.count(t.text)) errs_.push_back("line " + std::to_string(t.line) + ": unknown label \"" + t.text + "\"");
            next();
            return;
        }
        if (accept("(")) {
            if (props_) path();
            else expr();
            expect(")");
            return;
        }
        if (t.k != Tok::Ident) fail("unexpected '" + t.text + "'");
        const std::string n = next().text;
        if (n == "true" || n == "false") return;
        if (props_ && (n == "P" || n == "Pmin" || n == "Pmax")) {
            query_or_bound();
            bracket_path();
            return;
        }
        if (props_ && (n == "R" || n == "Rmin" || n == "Rmax")) {
            if (accept("{")) {
                if (peek().k != Tok::Str) fail("expected a reward structure name");
                next();
                expect("}");
            }
            if (n == "R" && (is("min") || is("max"))) next();
            query_or_bound();
            expect("[");
            if (accept("C")) {
                if (accept("<=")) unary();
            } else {
                path();
            }
            expect("]");
            return;
        }
        if (props_ && (n == "A" || n == "E")) {
            bracket_path();
            return;
        }
        if (kFunctions.count(n) && is("(")) {
            next();
            expr();
            while (accept(",")) expr();
            expect(")");
            return;
        }
        if (!consts.count(n) && !vars.count(n) && !formulas.count(n))
            errs_.push_back("line " + std::to_string(t.line) + ": undeclared identifier '" + n + "'");
    }
    void bracket_path() {
        expect("[");
        path();
        expect("]");
    }
    // Path formulas: temporal operators bind loosest.
    void path() {
        if (is("F") || is("G") || is("X")) {
            next();
            if (is("<=") || is("<") || is(">=") || is(">")) bound_op();
            path();
            return;
        }
        expr();
        if (is("U") || is("W") || is("R")) {
            next();
            if (is("<=") || is("<") || is(">=") || is(">")) bound_op();
            path();
        }
    }

    std::vector<Tok> t_;
    std::size_t pos_ = 0;
    std::vector<std::string>& errs_;
    bool props_;
    std::set<std::string> modules_;
};

}  // namespace

std::vector<std::string> validate_prism_model(const std::string& text) {
    std::vector<std::string> errs;
    Checker c(lex(text, errs), errs, false);
    c.model();
    return errs;
}

std::vector<std::string> validate_prism_props(const std::string& text, const std::string& model_text) {
    std::vector<std::string> errs, model_errs;
    Checker m(lex(model_text, model_errs), model_errs, false);
    m.model();
    Checker c(lex(text, errs), errs, true);
    c.consts = m.consts;
    c.vars = m.vars;
    c.formulas = m.formulas;
    c.labels.insert(m.labels.begin(), m.labels.end());
    c.properties();
    return errs;
}

}  // namespace rcprob
