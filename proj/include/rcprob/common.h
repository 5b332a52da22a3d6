#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rcprob {

struct SourcePos {
    int line = 0;
    int col = 0;

    bool valid() const { return line > 0; }
    std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

/// Thrown for malformed input (syntax errors, structural violations, evaluation errors).
/// `code` is a short machine-readable tag such as "SYNTAX" or "DUPLICATE".
class Error : public std::runtime_error {
   public:
    Error(std::string code, const std::string& message, SourcePos pos = {})
        : std::runtime_error(pos.valid() ? pos.str() + ": " + message : message),
          code_(std::move(code)),
          message_(message),
          pos_(pos) {}

    const std::string& code() const { return code_; }
    const std::string& message() const { return message_; }
    SourcePos pos() const { return pos_; }

   private:
    std::string code_;
    std::string message_;
    SourcePos pos_;
};

/// Exact rational over 64-bit integers; arithmetic throws on overflow instead of wrapping.
class Rational {
   public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit from integers is intended
    Rational(std::int64_t n, std::int64_t d);

    /// Parses "12", "-3", "0.25", "1e-3" style decimal literals exactly.
    static Rational parse_decimal(const std::string& text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;
    /// Shortest decimal rendering when the denominator divides a power of ten, else "n/d".
    std::string decimal_str() const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

   private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace rcprob
