#include "rcprob/lexer.h"

#include <array>
#include <cctype>

namespace rcprob {

namespace {

// Longest match first.
constexpr std::array<std::string_view, 20> kMultiSymbols = {
    "``", "$$", "::", "==", "!=", "<=", ">=", "/\\", "\\/", "->", "=>", "?=", "=?", "..",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            SourcePos start{line, col};
            advance(2);
            while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) advance(1);
            if (i + 1 >= text.size()) throw Error("SYNTAX", "unterminated comment", start);
            advance(2);
            continue;
        }
        Token t;
        t.pos = {line, col};
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            t.kind = TokKind::Ident;
            t.text = std::string(text.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '-' || text[k] == '+')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    j = k;
                    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                }
            }
            t.kind = TokKind::Number;
            t.text = std::string(text.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        bool matched = false;
        for (auto sym : kMultiSymbols) {
            if (!sym.empty() && text.substr(i, sym.size()) == sym) {
                // `=?` only as a query marker, never in `x =? ...` style arithmetic; `?=` likewise.
                t.kind = TokKind::Symbol;
                t.text = std::string(sym);
                advance(sym.size());
                matched = true;
                break;
            }
        }
        if (!matched) {
            static constexpr std::string_view singles = "{}()[],;:=<>+-*/%?!.@#&`$|^\\";
            if (singles.find(c) == std::string_view::npos) {
                throw Error("SYNTAX", std::string("unexpected character '") + c + "'", t.pos);
            }
            t.kind = TokKind::Symbol;
            t.text = std::string(1, c);
            advance(1);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = TokKind::End;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t k = i_ + ahead;
    if (k >= toks_.size()) return toks_.back();
    return toks_[k];
}

const Token& TokenStream::next() {
    const Token& t = peek();
    if (i_ < toks_.size() - 1) ++i_;
    return t;
}

bool TokenStream::is_sym(std::string_view s, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Symbol && t.text == s;
}

bool TokenStream::is_kw(std::string_view s, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Ident && t.text == s;
}

bool TokenStream::accept_sym(std::string_view s) {
    if (!is_sym(s)) return false;
    next();
    return true;
}

bool TokenStream::accept_kw(std::string_view s) {
    if (!is_kw(s)) return false;
    next();
    return true;
}

const Token& TokenStream::expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "'");
    return next();
}

const Token& TokenStream::expect_kw(std::string_view s) {
    if (!is_kw(s)) fail("expected '" + std::string(s) + "'");
    return next();
}

const Token& TokenStream::expect_ident(std::string_view what) {
    if (!is_ident()) fail("expected " + std::string(what));
    return next();
}

void TokenStream::fail(const std::string& msg) const { fail_at(peek(), msg); }

void TokenStream::fail_at(const Token& t, const std::string& msg) const {
    std::string found = t.kind == TokKind::End ? "end of input" : "'" + t.text + "'";
    throw Error("SYNTAX", msg + ", found " + found, t.pos);
}

}  // namespace rcprob
