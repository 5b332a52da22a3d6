#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rcprob/common.h"

namespace rcprob {

enum class TokKind { Ident, Number, Symbol, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    SourcePos pos;
};

/// Splits `.rcm`/`.rcp` text into tokens. `//` and `/* */` comments are skipped.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the usual lookahead helpers.
class TokenStream {
   public:
    explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at_end() const { return peek().kind == TokKind::End; }

    bool is_sym(std::string_view s, std::size_t ahead = 0) const;
    bool is_kw(std::string_view s, std::size_t ahead = 0) const;
    bool is_ident(std::size_t ahead = 0) const { return peek(ahead).kind == TokKind::Ident; }

    bool accept_sym(std::string_view s);
    bool accept_kw(std::string_view s);
    const Token& expect_sym(std::string_view s);
    const Token& expect_kw(std::string_view s);
    const Token& expect_ident(std::string_view what = "identifier");

    [[noreturn]] void fail(const std::string& msg) const;
    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

    std::size_t mark() const { return i_; }
    void reset(std::size_t m) { i_ = m; }

   private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

}  // namespace rcprob
