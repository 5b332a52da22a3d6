#pragma once

#include <string>

#include "rcprob/common.h"
#include "rcprob/model.h"

namespace rcprob {

/// A runtime value: booleans as 0/1, enumeration literals as ordinals, numbers exactly.
struct Value {
    enum class Kind { Bool, Int, Real, Enum };
    Kind kind = Kind::Int;
    Rational r;

    static Value boolean(bool b) { return Value{Kind::Bool, Rational(b ? 1 : 0)}; }
    static Value integer(std::int64_t v) { return Value{Kind::Int, Rational(v)}; }
    static Value real(const Rational& v) { return Value{Kind::Real, v}; }
    static Value enumeration(std::int64_t ord) { return Value{Kind::Enum, Rational(ord)}; }

    bool truthy() const { return r != Rational(0); }
    double to_double() const { return r.to_double(); }
    std::string str() const;

    friend bool operator==(const Value& a, const Value& b) { return a.kind == b.kind && a.r == b.r; }
};

/// Converts `v` to the representation of a slot of type `t`; throws Error("TYPE"/"RANGE").
Value coerce(const Value& v, const TypeRef& t, const std::string& what);

/// Integer division truncating toward zero; remainder with the sign of the dividend.
std::int64_t trunc_div(std::int64_t a, std::int64_t b);
std::int64_t trunc_mod(std::int64_t a, std::int64_t b);

Value apply_binary(Op op, const Value& a, const Value& b);
Value apply_unary(Op op, const Value& a);

}  // namespace rcprob
