#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flows.hpp"
#include "ir.hpp"

namespace odecert {

// Wolfram-language bridge: expression datatype with parser and printer,
// DSolve request generation, and reply translation back into flow candidates.

enum class CASKind { Int, Real, Id, Fun, CurryFun };

class CASNode;
using CASExpr = std::shared_ptr<const CASNode>;

class CASNode {
public:
    CASKind kind;
    long long ival = 0;
    double rval = 0;
    std::string name;
    std::vector<CASExpr> args;                // Fun
    std::vector<std::vector<CASExpr>> argss;  // CurryFun

    explicit CASNode(CASKind k) : kind(k) {}
};

inline CASExpr cas_int(long long v) {
    auto n = std::make_shared<CASNode>(CASKind::Int);
    n->ival = v;
    return n;
}
inline CASExpr cas_real(double v) {
    auto n = std::make_shared<CASNode>(CASKind::Real);
    n->rval = v;
    return n;
}
inline CASExpr cas_id(std::string name) {
    auto n = std::make_shared<CASNode>(CASKind::Id);
    n->name = std::move(name);
    return n;
}
inline CASExpr cas_fun(std::string name, std::vector<CASExpr> args) {
    auto n = std::make_shared<CASNode>(CASKind::Fun);
    n->name = std::move(name);
    n->args = std::move(args);
    return n;
}
inline CASExpr cas_curry(std::string name, std::vector<std::vector<CASExpr>> argss) {
    auto n = std::make_shared<CASNode>(CASKind::CurryFun);
    n->name = std::move(name);
    n->argss = std::move(argss);
    return n;
}

inline bool cas_equal(const CASExpr& x, const CASExpr& y) {
    if (x->kind != y->kind || x->ival != y->ival || x->rval != y->rval || x->name != y->name)
        return false;
    if (x->args.size() != y->args.size() || x->argss.size() != y->argss.size()) return false;
    for (size_t i = 0; i < x->args.size(); ++i)
        if (!cas_equal(x->args[i], y->args[i])) return false;
    for (size_t i = 0; i < x->argss.size(); ++i) {
        if (x->argss[i].size() != y->argss[i].size()) return false;
        for (size_t j = 0; j < x->argss[i].size(); ++j)
            if (!cas_equal(x->argss[i][j], y->argss[i][j])) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Printing (InputForm-like, fully determined by precedence)

namespace detail {

// precedence: 1 Rule, 2 Plus/Subtract, 3 Times/Divide, 4 unary minus,
// 5 Power, 6 postfix/atoms
inline void print_cas_rec(const CASExpr& e, std::string& out, int parent_prec) {
    auto paren = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    auto infix = [&](int prec, const char* op, int lp, int rp) {
        paren(prec, [&] {
            print_cas_rec(e->args[0], out, lp);
            out += op;
            print_cas_rec(e->args[1], out, rp);
        });
    };
    switch (e->kind) {
        case CASKind::Int:
            if (e->ival < 0) {
                paren(4, [&] { out += std::to_string(e->ival); });
            } else {
                out += std::to_string(e->ival);
            }
            return;
        case CASKind::Real: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", e->rval);
            std::string s = buf;
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".";
            if (e->rval < 0) {
                paren(4, [&] { out += s; });
            } else {
                out += s;
            }
            return;
        }
        case CASKind::Id: out += e->name; return;
        case CASKind::Fun: {
            if (e->name == "Rule" && e->args.size() == 2) return infix(1, " -> ", 2, 1);
            if (e->name == "Plus" && e->args.size() == 2) return infix(2, " + ", 2, 3);
            if (e->name == "Subtract" && e->args.size() == 2) return infix(2, " - ", 2, 3);
            if (e->name == "Times" && e->args.size() == 2) return infix(3, "*", 3, 4);
            if (e->name == "Divide" && e->args.size() == 2) return infix(3, "/", 3, 4);
            if (e->name == "Power" && e->args.size() == 2) return infix(5, "^", 6, 5);
            if (e->name == "Minus" && e->args.size() == 1) {
                paren(4, [&] {
                    out += "-";
                    print_cas_rec(e->args[0], out, 4);
                });
                return;
            }
            if (e->name == "List") {
                out += "{";
                for (size_t i = 0; i < e->args.size(); ++i) {
                    if (i) out += ", ";
                    print_cas_rec(e->args[i], out, 0);
                }
                out += "}";
                return;
            }
            out += e->name + "[";
            for (size_t i = 0; i < e->args.size(); ++i) {
                if (i) out += ", ";
                print_cas_rec(e->args[i], out, 0);
            }
            out += "]";
            return;
        }
        case CASKind::CurryFun: {
            out += e->name;
            for (const auto& args : e->argss) {
                out += "[";
                for (size_t i = 0; i < args.size(); ++i) {
                    if (i) out += ", ";
                    print_cas_rec(args[i], out, 0);
                }
                out += "]";
            }
            return;
        }
    }
}

}  // namespace detail

inline std::string to_string(const CASExpr& e) {
    std::string out;
    detail::print_cas_rec(e, out, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class CASParser {
public:
    explicit CASParser(const std::string& src) : src_(src) { skip(); }

    CASExpr parse_all() {
        CASExpr e = parse_rule();
        skip();
        if (pos_ < src_.size()) fail("trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrKind::ParseError, msg + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(const std::string& s) {
        skip();
        if (src_.compare(pos_, s.size(), s) == 0) {
            // `-` must not swallow the arrow
            if (s == "-" && src_.compare(pos_, 2, "->") == 0) return false;
            pos_ += s.size();
            return true;
        }
        return false;
    }

    char peek() {
        skip();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    CASExpr parse_rule() {
        CASExpr lhs = parse_sum();
        if (eat("->")) return cas_fun("Rule", {lhs, parse_rule()});
        return lhs;
    }

    CASExpr parse_sum() {
        CASExpr lhs = parse_prod();
        while (true) {
            if (eat("+")) {
                lhs = cas_fun("Plus", {lhs, parse_prod()});
            } else if (eat("-")) {
                lhs = cas_fun("Subtract", {lhs, parse_prod()});
            } else {
                break;
            }
        }
        return lhs;
    }

    CASExpr parse_prod() {
        CASExpr lhs = parse_unary();
        while (true) {
            if (eat("*")) {
                lhs = cas_fun("Times", {lhs, parse_unary()});
            } else if (eat("/")) {
                lhs = cas_fun("Divide", {lhs, parse_unary()});
            } else {
                break;
            }
        }
        return lhs;
    }

    CASExpr parse_unary() {
        if (eat("-")) {
            CASExpr e = parse_unary();
            if (e->kind == CASKind::Int) return cas_int(-e->ival);    // fold literals
            if (e->kind == CASKind::Real) return cas_real(-e->rval);
            return cas_fun("Minus", {e});
        }
        return parse_power();
    }

    CASExpr parse_power() {
        CASExpr base = parse_postfix();
        if (eat("^")) return cas_fun("Power", {base, parse_unary()});
        return base;
    }

    CASExpr parse_postfix() {
        CASExpr e = parse_primary();
        while (peek() == '[') {
            ++pos_;
            std::vector<CASExpr> args = parse_args(']');
            if (e->kind == CASKind::Id) {
                e = cas_fun(e->name, std::move(args));
            } else if (e->kind == CASKind::Fun && e->name != "List") {
                e = cas_curry(e->name, {e->args, std::move(args)});
            } else if (e->kind == CASKind::CurryFun) {
                auto argss = e->argss;
                argss.push_back(std::move(args));
                e = cas_curry(e->name, std::move(argss));
            } else {
                fail("cannot apply arguments here");
            }
        }
        return e;
    }

    std::vector<CASExpr> parse_args(char close) {
        std::vector<CASExpr> args;
        skip();
        if (peek() == close) {
            ++pos_;
            return args;
        }
        while (true) {
            args.push_back(parse_rule());
            if (eat(",")) continue;
            skip();
            if (peek() == close) {
                ++pos_;
                return args;
            }
            fail(std::string("expected ',' or '") + close + "'");
        }
    }

    CASExpr parse_primary() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            CASExpr e = parse_rule();
            skip();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return e;
        }
        if (c == '{') {
            ++pos_;
            return cas_fun("List", parse_args('}'));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            bool real = false;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                real = true;
                ++pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E') &&
                pos_ + 1 < src_.size() &&
                (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
                 src_[pos_ + 1] == '-' || src_[pos_ + 1] == '+')) {
                real = true;
                pos_ += 2;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
            std::string text = src_.substr(start, pos_ - start);
            if (real) return cas_real(std::stod(text));
            return cas_int(std::stoll(text));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '$') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '$'))
                ++pos_;
            return cas_id(src_.substr(start, pos_ - start));
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& src_;
    size_t pos_ = 0;
};

}  // namespace detail

inline CASExpr parse_cas(const std::string& text) {
    detail::CASParser p(text);
    return p.parse_all();
}

// ---------------------------------------------------------------------------
// DSolve requests

struct CASRequest {
    std::string text;
    std::map<std::string, std::string> mapping;  // source var -> wire letter
};

namespace detail {

inline std::string wolfram_name(const std::string& op) {
    if (op == "sin") return "Sin";
    if (op == "cos") return "Cos";
    if (op == "tan") return "Tan";
    if (op == "exp") return "Exp";
    if (op == "sqrt") return "Sqrt";
    if (op == "ln") return "Log";
    throw Error(ErrKind::UnknownOperator, "no Wolfram form for '" + op + "'");
}

// precedence mirror of the CAS printer
inline void ir_to_wolfram_rec(const IRExpr& ir, const std::map<std::string, std::string>& mapping,
                              std::string& out, int parent_prec) {
    auto paren = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    switch (ir->kind) {
        case IRKind::NConst:
            if (ir->name == "pi") {
                out += "Pi";
            } else if (ir->name == "euler") {
                out += "E";
            } else {
                throw Error(ErrKind::UnknownOperator, "constant '" + ir->name + "'");
            }
            return;
        case IRKind::NNat: out += std::to_string(ir->ival); return;
        case IRKind::NInt:
            paren(4, [&] { out += std::to_string(ir->ival); });
            return;
        case IRKind::NReal:
            paren(3, [&] {
                out += numerator(ir->rval).str() + "/" + denominator(ir->rval).str();
            });
            return;
        case IRKind::CVar: out += ir->name; return;
        case IRKind::SVar: {
            auto it = mapping.find(ir->name);
            if (it == mapping.end())
                throw Error(ErrKind::UnknownOperator, "unmapped state '" + ir->name + "'");
            out += it->second + "[t]";
            return;
        }
        case IRKind::IVar: out += "t"; return;
        case IRKind::UOp:
            if (ir->name == "uminus") {
                paren(4, [&] {
                    out += "-";
                    ir_to_wolfram_rec(ir->a, mapping, out, 4);
                });
                return;
            }
            out += wolfram_name(ir->name) + "[";
            ir_to_wolfram_rec(ir->a, mapping, out, 0);
            out += "]";
            return;
        case IRKind::BOp: {
            const char* op;
            int prec, lp, rp;
            if (ir->name == "plus") {
                op = " + ", prec = 2, lp = 2, rp = 3;
            } else if (ir->name == "minus") {
                op = " - ", prec = 2, lp = 2, rp = 3;
            } else if (ir->name == "times") {
                op = "*", prec = 3, lp = 3, rp = 4;
            } else if (ir->name == "divide") {
                op = "/", prec = 3, lp = 3, rp = 4;
            } else if (ir->name == "power") {
                op = "^", prec = 5, lp = 6, rp = 5;
            } else {
                throw Error(ErrKind::UnknownOperator, "binary '" + ir->name + "'");
            }
            paren(prec, [&] {
                ir_to_wolfram_rec(ir->a, mapping, out, lp);
                out += op;
                ir_to_wolfram_rec(ir->b, mapping, out, rp);
            });
            return;
        }
    }
}

}  // namespace detail

/// Builds the DSolve request for a system of ODEs given in IR form. State
/// variables are renamed a, b, c, ... alphabetically by source name, skipping
/// letters that collide with parameter names or `t`.
inline CASRequest ir_to_cas_request(const std::vector<std::pair<std::string, IRExpr>>& field_ir,
                                    const std::vector<std::string>& frame,
                                    const std::set<std::string>& avoid = {}) {
    CASRequest req;
    std::vector<std::string> sorted = frame;
    std::sort(sorted.begin(), sorted.end());
    char letter = 'a';
    for (const auto& v : sorted) {
        while (letter == 't' || avoid.count(std::string(1, letter))) ++letter;
        if (letter > 'z') throw Error(ErrKind::Internal, "too many variables for the wire format");
        req.mapping[v] = std::string(1, letter);
        ++letter;
    }

    std::string eqs;
    for (const auto& [v, rhs] : field_ir) {
        std::string r;
        detail::ir_to_wolfram_rec(rhs, req.mapping, r, 0);
        eqs += req.mapping.at(v) + "'[t] == " + r + ", ";
    }
    for (const auto& v : sorted)
        eqs += req.mapping.at(v) + "[0] == " + req.mapping.at(v) + "0, ";
    eqs.erase(eqs.size() - 2);

    std::string vars;
    for (const auto& v : sorted) {
        if (!vars.empty()) vars += ", ";
        vars += req.mapping.at(v);
    }
    req.text = "DSolve[{" + eqs + "}, {" + vars + "}, t]";
    return req;
}

// ---------------------------------------------------------------------------
// Reply translation

namespace detail {

inline IRExpr cas_to_ir(const CASExpr& e, const std::map<std::string, std::string>& inverse,
                        const std::set<std::string>& params, const std::string& time_name) {
    switch (e->kind) {
        case CASKind::Int:
            return e->ival >= 0 ? ir_nnat(e->ival) : ir_nint(e->ival);
        case CASKind::Real: {
            // decimals arrive as doubles; keep them as exact binary rationals
            double v = e->rval;
            Rat r;
            long long scaled = static_cast<long long>(v * (1LL << 30));
            r = Rat(BigInt(scaled), BigInt(1LL << 30));
            return ir_nreal(r);
        }
        case CASKind::Id: {
            const std::string& n = e->name;
            if (n == time_name) return ir_ivar();
            if (n == "Pi") return ir_nconst("pi");
            if (n == "E") return ir_nconst("euler");
            // a0-style identifiers are initial values of mapped variables
            if (n.size() >= 2 && n.back() == '0') {
                auto it = inverse.find(n.substr(0, n.size() - 1));
                if (it != inverse.end()) return ir_svar(it->second);
            }
            if (params.count(n)) return ir_cvar(n);
            throw Error(ErrKind::ParseError, "unknown identifier '" + n + "' in CAS reply");
        }
        case CASKind::Fun: {
            const std::string& n = e->name;
            auto arg = [&](size_t i) { return cas_to_ir(e->args[i], inverse, params, time_name); };
            if (n == "Plus" || n == "Subtract" || n == "Times" || n == "Divide") {
                if (e->args.size() != 2) throw Error(ErrKind::ParseError, n + " arity");
                const char* op = n == "Plus"     ? "plus"
                                 : n == "Subtract" ? "minus"
                                 : n == "Times"    ? "times"
                                                   : "divide";
                return ir_bop(op, arg(0), arg(1));
            }
            if (n == "Minus" && e->args.size() == 1) return ir_uop("uminus", arg(0));
            if (n == "Power" && e->args.size() == 2) {
                // E^x is the exponential; integer powers map to our power op
                if (e->args[0]->kind == CASKind::Id && e->args[0]->name == "E")
                    return ir_uop("exp", arg(1));
                IRExpr ex = arg(1);
                if (ex->kind == IRKind::NNat) return ir_bop("power", arg(0), ex);
                throw Error(ErrKind::UnknownOperator, "Power with non-natural exponent");
            }
            if (n == "Rational" && e->args.size() == 2 && e->args[0]->kind == CASKind::Int &&
                e->args[1]->kind == CASKind::Int)
                return ir_nreal(rat(e->args[0]->ival, e->args[1]->ival));
            if (n == "Sin") return ir_uop("sin", arg(0));
            if (n == "Cos") return ir_uop("cos", arg(0));
            if (n == "Tan") return ir_uop("tan", arg(0));
            if (n == "Exp") return ir_uop("exp", arg(0));
            if (n == "Sqrt") return ir_uop("sqrt", arg(0));
            if (n == "Log" && e->args.size() == 1) return ir_uop("ln", arg(0));
            if (n == "C")
                throw Error(ErrKind::ParseError, "free constant C[...] in CAS reply");
            throw Error(ErrKind::UnknownOperator, "function '" + n + "' in CAS reply");
        }
        case CASKind::CurryFun:
            if (e->name == "C")
                throw Error(ErrKind::ParseError, "free constant C[...] in CAS reply");
            throw Error(ErrKind::UnknownOperator, "curried '" + e->name + "' in CAS reply");
    }
    throw Error(ErrKind::Internal, "cas_to_ir");
}

}  // namespace detail

/// Parses a DSolve reply of the form {{a -> Function[{t}, body], ...}} and
/// reconstructs a flow candidate via the inverse variable mapping.
inline FlowCandidate parse_cas_solution(const std::string& text,
                                        const std::map<std::string, std::string>& mapping,
                                        const std::vector<std::string>& frame,
                                        const std::set<std::string>& params) {
    CASExpr e = parse_cas(text);
    if (e->kind != CASKind::Fun || e->name != "List")
        throw Error(ErrKind::ParseError, "expected a rule list");
    if (e->args.empty()) throw Error(ErrKind::ParseError, "no solution");
    CASExpr sol = e->args[0];
    if (sol->kind != CASKind::Fun || sol->name != "List")
        throw Error(ErrKind::ParseError, "expected a solution list");

    std::map<std::string, std::string> inverse;
    for (const auto& [src, wire] : mapping) inverse[wire] = src;

    FlowCandidate out;
    out.frame = frame;
    for (const auto& rule : sol->args) {
        if (rule->kind != CASKind::Fun || rule->name != "Rule" || rule->args.size() != 2)
            throw Error(ErrKind::ParseError, "expected a Rule");
        const CASExpr& lhs = rule->args[0];
        std::string wire;
        if (lhs->kind == CASKind::Id) {
            wire = lhs->name;
        } else if (lhs->kind == CASKind::Fun && lhs->args.size() == 1 &&
                   lhs->args[0]->kind == CASKind::Id) {
            wire = lhs->name;  // a[t] -> ... form
        } else {
            throw Error(ErrKind::ParseError, "unsupported rule head");
        }
        auto inv = inverse.find(wire);
        if (inv == inverse.end()) throw Error(ErrKind::ParseError, "unmapped rule '" + wire + "'");

        const CASExpr& rhs = rule->args[1];
        CASExpr body;
        std::string time_name = "t";
        if (rhs->kind == CASKind::Fun && rhs->name == "Function" && rhs->args.size() == 2) {
            const CASExpr& binder = rhs->args[0];
            if (binder->kind == CASKind::Fun && binder->name == "List" &&
                binder->args.size() == 1 && binder->args[0]->kind == CASKind::Id)
                time_name = binder->args[0]->name;
            else if (binder->kind == CASKind::Id)
                time_name = binder->name;
            else
                throw Error(ErrKind::ParseError, "unsupported Function binder");
            body = rhs->args[1];
        } else {
            body = rhs;  // a[t] -> expr form
        }
        IRExpr ir = detail::cas_to_ir(body, inverse, params, time_name);
        out.body = out.body.update(inv->second, from_ir(ir));
    }
    for (const auto& v : frame)
        if (!out.body.contains(v))
            throw Error(ErrKind::ParseError, "solution misses variable '" + v + "'");
    return out;
}

// ---------------------------------------------------------------------------
// Subprocess runner (wolframscript). One request per process; the binary is
// configurable through ODECERT_WOLFRAMSCRIPT.

inline std::optional<std::string> run_wolframscript(const std::string& request,
                                                    int timeout_sec = 30) {
    const char* wsenv = std::getenv("ODECERT_WOLFRAMSCRIPT");
    std::string binary = wsenv ? wsenv : "wolframscript";

    char tmpl[] = "/tmp/odecert-cas-XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) return std::nullopt;
    {
        FILE* f = fdopen(fd, "w");
        if (!f) return std::nullopt;
        std::fputs("Print[InputForm[", f);
        std::fputs(request.c_str(), f);
        std::fputs("]]\n", f);
        std::fclose(f);
    }
    std::string cmd = "timeout " + std::to_string(timeout_sec) + " " + binary + " -file " + tmpl +
                      " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(tmpl);
        return std::nullopt;
    }
    std::string out;
    char buf[4096];
    while (size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int rc = pclose(pipe);
    std::remove(tmpl);
    if (rc != 0) return std::nullopt;
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out;
}

}  // namespace odecert
