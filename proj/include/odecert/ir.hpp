#pragma once

#include <memory>
#include <string>
#include <vector>

#include "expr.hpp"

namespace odecert {

// CAS-agnostic intermediate representation for arithmetic expressions.
// Operator names are drawn from a fixed bidirectional translation table, so
// from_ir(to_ir(e)) is the structural identity.

enum class IRKind { NConst, UOp, BOp, NNat, NInt, NReal, CVar, SVar, IVar };

class IRNode;
using IRExpr = std::shared_ptr<const IRNode>;

class IRNode {
public:
    IRKind kind;
    std::string name;  // constant, operator or variable name
    long long ival = 0;
    Rat rval;
    IRExpr a, b;

    explicit IRNode(IRKind k) : kind(k) {}
};

inline IRExpr ir_node(IRKind k) { return std::make_shared<IRNode>(k); }

inline IRExpr ir_nconst(std::string name) {
    auto n = std::make_shared<IRNode>(IRKind::NConst);
    n->name = std::move(name);
    return n;
}
inline IRExpr ir_uop(std::string name, IRExpr a) {
    auto n = std::make_shared<IRNode>(IRKind::UOp);
    n->name = std::move(name);
    n->a = std::move(a);
    return n;
}
inline IRExpr ir_bop(std::string name, IRExpr a, IRExpr b) {
    auto n = std::make_shared<IRNode>(IRKind::BOp);
    n->name = std::move(name);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline IRExpr ir_nnat(long long v) {
    auto n = std::make_shared<IRNode>(IRKind::NNat);
    n->ival = v;
    return n;
}
inline IRExpr ir_nint(long long v) {
    auto n = std::make_shared<IRNode>(IRKind::NInt);
    n->ival = v;
    return n;
}
inline IRExpr ir_nreal(Rat v) {
    auto n = std::make_shared<IRNode>(IRKind::NReal);
    n->rval = std::move(v);
    return n;
}
inline IRExpr ir_cvar(std::string name) {
    auto n = std::make_shared<IRNode>(IRKind::CVar);
    n->name = std::move(name);
    return n;
}
inline IRExpr ir_svar(std::string name) {
    auto n = std::make_shared<IRNode>(IRKind::SVar);
    n->name = std::move(name);
    return n;
}
inline IRExpr ir_ivar() { return std::make_shared<IRNode>(IRKind::IVar); }

inline bool ir_equal(const IRExpr& x, const IRExpr& y) {
    if (x->kind != y->kind || x->name != y->name || x->ival != y->ival || x->rval != y->rval)
        return false;
    if (!!x->a != !!y->a || !!x->b != !!y->b) return false;
    if (x->a && !ir_equal(x->a, y->a)) return false;
    if (x->b && !ir_equal(x->b, y->b)) return false;
    return true;
}

// ---------------------------------------------------------------------------

inline IRExpr to_ir(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Num: {
            if (is_integer(e->value)) {
                long long v = numerator(e->value).convert_to<long long>();
                return v >= 0 ? ir_nnat(v) : ir_nint(v);
            }
            return ir_nreal(e->value);
        }
        case ExprKind::NamedConst: return ir_nconst(e->name);
        case ExprKind::Param: return ir_cvar(e->name);
        case ExprKind::StateVar: return ir_svar(e->name);
        case ExprKind::TimeVar: return ir_ivar();
        case ExprKind::Neg: return ir_uop("uminus", to_ir(e->a));
        case ExprKind::Add: return ir_bop("plus", to_ir(e->a), to_ir(e->b));
        case ExprKind::Sub: return ir_bop("minus", to_ir(e->a), to_ir(e->b));
        case ExprKind::Mul: return ir_bop("times", to_ir(e->a), to_ir(e->b));
        case ExprKind::Div: return ir_bop("divide", to_ir(e->a), to_ir(e->b));
        case ExprKind::Pow: return ir_bop("power", to_ir(e->a), ir_nnat(e->exponent));
        case ExprKind::Sin: return ir_uop("sin", to_ir(e->a));
        case ExprKind::Cos: return ir_uop("cos", to_ir(e->a));
        case ExprKind::Tan: return ir_uop("tan", to_ir(e->a));
        case ExprKind::Exp: return ir_uop("exp", to_ir(e->a));
        case ExprKind::Sqrt: return ir_uop("sqrt", to_ir(e->a));
        case ExprKind::Ln: return ir_uop("ln", to_ir(e->a));
    }
    throw Error(ErrKind::Internal, "to_ir: bad node");
}

inline Expr from_ir(const IRExpr& ir) {
    switch (ir->kind) {
        case IRKind::NConst: return named_const(ir->name);
        case IRKind::CVar: return param(ir->name);
        case IRKind::SVar: return state_var(ir->name);
        case IRKind::IVar: return time_var();
        case IRKind::NNat:
        case IRKind::NInt:
            return num(ir->ival);
        case IRKind::NReal: return num(ir->rval);
        case IRKind::UOp: {
            Expr a = from_ir(ir->a);
            if (ir->name == "uminus") return neg(a);
            if (ir->name == "sin") return sin(a);
            if (ir->name == "cos") return cos(a);
            if (ir->name == "tan") return tan(a);
            if (ir->name == "exp") return exp(a);
            if (ir->name == "sqrt") return sqrt(a);
            if (ir->name == "ln") return ln(a);
            throw Error(ErrKind::UnknownOperator, "unary '" + ir->name + "'");
        }
        case IRKind::BOp: {
            if (ir->name == "power") {
                if (ir->b->kind != IRKind::NNat)
                    throw Error(ErrKind::UnknownOperator, "power with non-natural exponent");
                return pow(from_ir(ir->a), static_cast<int>(ir->b->ival));
            }
            Expr a = from_ir(ir->a), b = from_ir(ir->b);
            if (ir->name == "plus") return add(a, b);
            if (ir->name == "minus") return sub(a, b);
            if (ir->name == "times") return mul(a, b);
            if (ir->name == "divide") return div(a, b);
            throw Error(ErrKind::UnknownOperator, "binary '" + ir->name + "'");
        }
    }
    throw Error(ErrKind::Internal, "from_ir: bad node");
}

}  // namespace odecert
