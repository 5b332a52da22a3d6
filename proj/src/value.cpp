#include "rcprob/value.h"

namespace rcprob {

std::string Value::str() const {
    switch (kind) {
        case Kind::Bool: return truthy() ? "true" : "false";
        case Kind::Int:
        case Kind::Enum: return r.str();
        case Kind::Real: return r.decimal_str();
    }
    return r.str();
}

Value coerce(const Value& v, const TypeRef& t, const std::string& what) {
    switch (t.kind) {
        case TypeKind::Bool:
            if (v.kind != Value::Kind::Bool) throw Error("TYPE", what + ": expected a boolean, got " + v.str());
            return v;
        case TypeKind::Enum:
            if (v.kind != Value::Kind::Enum) throw Error("TYPE", what + ": expected an enumeration literal");
            return v;
        case TypeKind::Real:
            if (v.kind == Value::Kind::Bool || v.kind == Value::Kind::Enum)
                throw Error("TYPE", what + ": expected a number, got " + v.str());
            return Value::real(v.r);
        case TypeKind::Int:
        case TypeKind::Nat:
            if (v.kind == Value::Kind::Bool || v.kind == Value::Kind::Enum)
                throw Error("TYPE", what + ": expected a number, got " + v.str());
            if (!v.r.is_integer()) throw Error("TYPE", what + ": expected an integer, got " + v.r.decimal_str());
            if (t.kind == TypeKind::Nat && v.r < Rational(0))
                throw Error("RANGE", what + ": nat value " + v.r.str() + " is negative");
            return Value::integer(v.r.num());
    }
    return v;
}

std::int64_t trunc_div(std::int64_t a, std::int64_t b) {
    if (b == 0) throw Error("EVAL", "division by zero");
    return a / b;  // C++ division truncates toward zero
}

std::int64_t trunc_mod(std::int64_t a, std::int64_t b) {
    if (b == 0) throw Error("EVAL", "modulo by zero");
    return a % b;
}

namespace {

bool is_num(const Value& v) { return v.kind == Value::Kind::Int || v.kind == Value::Kind::Real; }

void need_num(const Value& a, const Value& b, Op op) {
    if (!is_num(a) || !is_num(b))
        throw Error("TYPE", std::string("operands of '") + op_symbol(op) + "' must be numeric");
}

}  // namespace

Value apply_unary(Op op, const Value& a) {
    if (op == Op::Not) return Value::boolean(!a.truthy());
    if (!is_num(a)) throw Error("TYPE", "operand of unary '-' must be numeric");
    return Value{a.kind, -a.r};
}

Value apply_binary(Op op, const Value& a, const Value& b) {
    const bool ints = a.kind == Value::Kind::Int && b.kind == Value::Kind::Int;
    const Value::Kind nk = ints ? Value::Kind::Int : Value::Kind::Real;
    switch (op) {
        case Op::Add: need_num(a, b, op); return Value{nk, a.r + b.r};
        case Op::Sub: need_num(a, b, op); return Value{nk, a.r - b.r};
        case Op::Mul: need_num(a, b, op); return Value{nk, a.r * b.r};
        case Op::Div:
            need_num(a, b, op);
            if (b.r == Rational(0)) throw Error("EVAL", "division by zero");
            if (ints) return Value::integer(trunc_div(a.r.num(), b.r.num()));
            return Value::real(a.r / b.r);
        case Op::Mod:
            need_num(a, b, op);
            if (!ints) throw Error("TYPE", "operands of '%' must be integers");
            return Value::integer(trunc_mod(a.r.num(), b.r.num()));
        case Op::Eq: return Value::boolean(a.r == b.r);
        case Op::Neq: return Value::boolean(a.r != b.r);
        case Op::Lt: need_num(a, b, op); return Value::boolean(a.r < b.r);
        case Op::Le: need_num(a, b, op); return Value::boolean(a.r <= b.r);
        case Op::Gt: need_num(a, b, op); return Value::boolean(a.r > b.r);
        case Op::Ge: need_num(a, b, op); return Value::boolean(a.r >= b.r);
        case Op::And: return Value::boolean(a.truthy() && b.truthy());
        case Op::Or: return Value::boolean(a.truthy() || b.truthy());
        case Op::Implies: return Value::boolean(!a.truthy() || b.truthy());
        case Op::Iff: return Value::boolean(a.truthy() == b.truthy());
        default: throw Error("EVAL", std::string("operator '") + op_symbol(op) + "' is not a value operator");
    }
}

}  // namespace rcprob
