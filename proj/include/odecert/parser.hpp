#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hprog.hpp"

namespace odecert {

// Recursive-descent parser for the problem DSL, with entry points for
// standalone expressions, predicates and flow bodies (CLI inputs).

namespace detail {

enum class Tok {
    End,
    Ident,
    Number,
    Punct,  // operators and punctuation, text carries which
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Rat value;  // Number
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    struct State {
        size_t pos;
        int line, col;
        Token tok;
    };

    State save() const { return {pos_, line_, col_, tok_}; }
    void restore(const State& s) {
        pos_ = s.pos;
        line_ = s.line;
        col_ = s.col;
        tok_ = s.tok;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, tok_.line, tok_.col);
    }

private:
    void advance() {
        skip_ws();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.kind = Tok::End;
            tok_.text = "<end>";
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            tok_.kind = Tok::Ident;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                bump();
            std::string intpart = src_.substr(start, pos_ - start);
            Rat v{BigInt(intpart)};
            if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                bump();
                size_t fstart = pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    bump();
                std::string frac = src_.substr(fstart, pos_ - fstart);
                BigInt den = 1;
                for (size_t i = 0; i < frac.size(); ++i) den *= 10;
                v += Rat(BigInt(frac), den);
            }
            tok_.kind = Tok::Number;
            tok_.value = v;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        // multi-char punctuation first
        static const char* puncts[] = {"|_|", ":=", "~>", "->", "<=", ">=", "!=", nullptr};
        for (int i = 0; puncts[i]; ++i) {
            std::string p = puncts[i];
            if (src_.compare(pos_, p.size(), p) == 0) {
                tok_.kind = Tok::Punct;
                tok_.text = p;
                for (size_t k = 0; k < p.size(); ++k) bump();
                return;
            }
        }
        static const std::string singles = "{}()[];:,'=<>!&|+-*/^?$.";
        if (singles.find(c) != std::string::npos) {
            tok_.kind = Tok::Punct;
            tok_.text = std::string(1, c);
            bump();
            return;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {  // line comment
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

}  // namespace detail

/// Name resolution context for expression parsing.
struct ExprScope {
    std::set<std::string> state;
    std::set<std::string> params;
    bool allow_time = false;     // bare `t` (when not declared) is the time variable
    bool dollar_mode = false;    // `$x` initial-value references allowed; bare state names rejected
    std::set<std::string> dollar_frame;  // valid $ names (empty = any state name)

    bool classifies(const std::string& n) const { return state.count(n) || params.count(n); }
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    // ----- standalone entry points -----

    Expr parse_expr_all(const ExprScope& scope) {
        Expr e = parse_expr(scope);
        expect_end();
        return e;
    }

    Pred parse_pred_all(const ExprScope& scope) {
        Pred p = parse_pred(scope);
        expect_end();
        return p;
    }

    Subst parse_flow_all(const ExprScope& scope) {
        Subst s = parse_flow_literal(scope);
        expect_end();
        return s;
    }

    Problem parse_problem_file() {
        Problem prob;
        expect_ident("problem");
        prob.name = expect_any_ident("problem name");
        expect_punct("{");
        while (!at_punct("}")) parse_section(prob);
        expect_punct("}");
        expect_end();
        return prob;
    }

    // ----- expressions -----

    Expr parse_expr(const ExprScope& scope) {
        Expr lhs = parse_term(scope);
        while (at_punct("+") || at_punct("-")) {
            bool plus = lex_.next().text == "+";
            Expr rhs = parse_term(scope);
            lhs = plus ? add(lhs, rhs) : sub(lhs, rhs);
        }
        return lhs;
    }

    Pred parse_pred(const ExprScope& scope) { return parse_implies(scope); }

private:
    // ----- problem structure -----

    void parse_section(Problem& prob) {
        const detail::Token t = lex_.peek();
        std::string kw = t.kind == detail::Tok::Ident ? t.text : "";
        if (kw == "constants") {
            lex_.next();
            expect_punct("{");
            while (!at_punct("}")) {
                auto tok = lex_.peek();
                std::string n = expect_any_ident("constant name");
                declare(prob, n, /*is_state=*/false, tok);
                expect_punct(":");
                expect_ident("real");
                expect_punct(";");
            }
            expect_punct("}");
        } else if (kw == "assumes") {
            lex_.next();
            expect_punct("{");
            ExprScope scope = param_scope(prob);
            while (!at_punct("}")) {
                Pred p = parse_pred(scope);
                prob.assumptions.emplace_back("", p);
                expect_punct(";");
            }
            expect_punct("}");
        } else if (kw == "variables") {
            lex_.next();
            expect_punct("{");
            while (!at_punct("}")) {
                auto tok = lex_.peek();
                std::string n = expect_any_ident("variable name");
                declare(prob, n, /*is_state=*/true, tok);
                expect_punct(";");
            }
            expect_punct("}");
        } else if (kw == "def") {
            lex_.next();
            auto tok = lex_.peek();
            std::string n = expect_any_ident("definition name");
            if (prob.is_declared(n) || prob.prog_defs.count(n) || prob.flow_defs.count(n))
                throw_at(ErrKind::DuplicateName, "'" + n + "' already defined", tok);
            expect_punct("=");
            if (at_punct("[")) {
                prob.flow_defs[n] = parse_flow_literal(flow_scope(prob));
            } else {
                prob.prog_defs[n] = parse_prog(prob);
            }
            expect_punct(";");
        } else if (kw == "goal") {
            lex_.next();
            Goal g;
            auto tok = lex_.peek();
            g.name = expect_any_ident("goal name");
            for (const auto& other : prob.goals)
                if (other.name == g.name)
                    throw_at(ErrKind::DuplicateName, "goal '" + g.name + "' already defined", tok);
            expect_punct(":");
            std::string kind = expect_any_ident("goal kind");
            if (kind == "hoare") {
                g.kind = GoalKind::Hoare;
            } else if (kind == "diamond") {
                g.kind = GoalKind::Diamond;
            } else {
                lex_.fail("expected 'hoare' or 'diamond'");
            }
            ExprScope scope = full_scope(prob);
            expect_punct("{");
            g.pre = parse_pred(scope);
            expect_punct("}");
            g.prog = parse_prog(prob);
            expect_punct("{");
            g.post = parse_pred(scope);
            expect_punct("}");
            if (at_ident("witness")) {
                if (g.kind != GoalKind::Diamond) lex_.fail("witness only applies to diamond goals");
                lex_.next();
                expect_punct("(");
                g.witness = parse_expr(scope);
                expect_punct(")");
            }
            if (at_ident("using")) {
                lex_.next();
                g.strategy = parse_hint(prob);
            } else {
                g.strategy = hint_auto();
            }
            expect_punct(";");
            prob.goals.push_back(std::move(g));
        } else {
            lex_.fail("expected a section (constants/assumes/variables/def/goal)");
        }
    }

    void declare(Problem& prob, const std::string& n, bool is_state, const detail::Token& tok) {
        if (prob.is_declared(n))
            throw_at(ErrKind::DuplicateName, "'" + n + "' already declared", tok);
        if (is_reserved(n))
            throw_at(ErrKind::DuplicateName, "'" + n + "' is reserved", tok);
        if (is_state)
            prob.state_vars.push_back(n);
        else
            prob.param_names.push_back(n);
    }

    static bool is_reserved(const std::string& n) {
        static const std::set<std::string> kw = {
            "sin", "cos",  "tan",   "exp",  "sqrt", "ln",      "pi",    "euler", "true",
            "false", "skip", "abort", "loop", "inv",  "if",      "else",  "while", "using",
            "flow",  "dinduct", "darboux", "ghost", "solve", "witness", "hoare", "diamond",
            "problem", "constants", "assumes", "variables", "def", "goal", "real", "evol"};
        return kw.count(n) != 0;
    }

    ExprScope param_scope(const Problem& prob) const {
        ExprScope s;
        for (const auto& p : prob.param_names) s.params.insert(p);
        return s;
    }

    ExprScope full_scope(const Problem& prob) const {
        ExprScope s = param_scope(prob);
        for (const auto& v : prob.state_vars) s.state.insert(v);
        return s;
    }

    ExprScope ode_scope(const Problem& prob) const {
        ExprScope s = full_scope(prob);
        s.allow_time = true;
        return s;
    }

    ExprScope flow_scope(const Problem& prob) const {
        ExprScope s = param_scope(prob);
        s.allow_time = true;
        s.dollar_mode = true;
        for (const auto& v : prob.state_vars) s.dollar_frame.insert(v);
        return s;
    }

    // ----- programs -----

    HProg parse_prog(const Problem& prob) {
        HProg lhs = parse_seq(prob);
        while (at_punct("|_|")) {
            lex_.next();
            lhs = prog_choice(lhs, parse_seq(prob));
        }
        return lhs;
    }

    HProg parse_seq(const Problem& prob) {
        HProg lhs = parse_prog_atom(prob);
        while (at_punct(";")) {
            // `;` also terminates defs/goals; treat `; }` or `; <section>` as a stop
            auto save = lex_.save();
            lex_.next();
            if (!starts_prog_atom()) {
                lex_.restore(save);
                break;
            }
            lhs = prog_seq(lhs, parse_prog_atom(prob));
        }
        return lhs;
    }

    bool starts_prog_atom() {
        const auto& t = lex_.peek();
        if (t.kind == detail::Tok::Punct)
            return t.text == "?" || t.text == "{" || t.text == "(";
        if (t.kind != detail::Tok::Ident) return false;
        return t.text != "inv" && t.text != "using" && t.text != "witness" && t.text != "goal" &&
               t.text != "def" && t.text != "constants" && t.text != "assumes" &&
               t.text != "variables" && t.text != "else";
    }

    HProg parse_prog_atom(const Problem& prob) {
        ExprScope scope = full_scope(prob);
        if (at_ident("skip")) {
            lex_.next();
            return prog_skip();
        }
        if (at_ident("abort")) {
            lex_.next();
            return prog_abort();
        }
        if (at_punct("?")) {
            lex_.next();
            return prog_test(parse_pred(scope));
        }
        if (at_ident("loop")) {
            lex_.next();
            expect_punct("(");
            HProg body = parse_prog(prob);
            expect_punct(")");
            std::optional<Pred> inv;
            if (at_ident("inv")) {
                lex_.next();
                expect_punct("(");
                inv = parse_pred(scope);
                expect_punct(")");
            }
            return prog_star(body, inv);
        }
        if (at_ident("if")) {
            lex_.next();
            Pred c = parse_pred(scope);
            expect_punct("{");
            HProg a = parse_prog(prob);
            expect_punct("}");
            expect_ident("else");
            expect_punct("{");
            HProg b = parse_prog(prob);
            expect_punct("}");
            return prog_if(c, a, b);
        }
        if (at_ident("while")) {
            lex_.next();
            Pred c = parse_pred(scope);
            std::optional<Pred> inv;
            if (at_ident("inv")) {
                lex_.next();
                expect_punct("(");
                inv = parse_pred(scope);
                expect_punct(")");
            }
            expect_punct("{");
            HProg body = parse_prog(prob);
            expect_punct("}");
            return prog_while(c, body, inv);
        }
        if (at_ident("evol")) {
            lex_.next();
            Subst flow;
            if (at_punct("[")) {
                flow = parse_flow_literal(flow_scope(prob));
            } else {
                auto tok = lex_.peek();
                std::string n = expect_any_ident("flow definition name");
                auto it = prob.flow_defs.find(n);
                if (it == prob.flow_defs.end())
                    throw_at(ErrKind::UndeclaredName, "'" + n + "' is not a flow definition", tok);
                flow = it->second;
            }
            Pred guard = ptrue();
            if (at_punct("|")) {
                lex_.next();
                guard = parse_pred(scope);
            }
            return prog_evol_flow(std::move(flow), guard);
        }
        if (at_punct("{")) return parse_evolve(prob);
        if (at_punct("(")) {
            lex_.next();
            HProg p = parse_prog(prob);
            expect_punct(")");
            return p;
        }
        auto tok = lex_.peek();
        std::string n = expect_any_ident("program");
        if (at_punct(":=")) {
            lex_.next();
            if (!prob.is_state(n))
                throw_at(ErrKind::UndeclaredName, "'" + n + "' is not a state variable", tok);
            Expr e = parse_expr(scope);
            return prog_assign(n, e);
        }
        auto it = prob.prog_defs.find(n);
        if (it == prob.prog_defs.end())
            throw_at(ErrKind::UndeclaredName, "'" + n + "' is not a program definition", tok);
        return it->second;
    }

    HProg parse_evolve(const Problem& prob) {
        expect_punct("{");
        EvolutionCmd evo;
        ExprScope scope = ode_scope(prob);
        while (true) {
            auto tok = lex_.peek();
            std::string v = expect_any_ident("ODE variable");
            if (!prob.is_state(v))
                throw_at(ErrKind::UndeclaredName, "'" + v + "' is not a state variable", tok);
            expect_punct("'");
            expect_punct("=");
            Expr rhs = parse_expr(scope);
            if (evo.field.contains(v))
                throw_at(ErrKind::DuplicateName, "duplicate derivative for '" + v + "'", tok);
            evo.frame.push_back(v);
            evo.field = evo.field.update(v, rhs);
            if (at_punct(",")) {
                lex_.next();
                continue;
            }
            break;
        }
        if (at_punct("|")) {
            lex_.next();
            evo.guard = parse_pred(full_scope(prob));
        }
        expect_punct("}");
        HintPtr hint;
        if (at_ident("using")) {
            lex_.next();
            hint = parse_hint(prob);
        }
        return prog_evolve(std::move(evo), hint);
    }

    HintPtr parse_hint(const Problem& prob) {
        ExprScope scope = full_scope(prob);
        if (at_ident("flow")) {
            lex_.next();
            return hint_flow(parse_flow_literal(flow_scope(prob)));
        }
        if (at_ident("dinduct")) {
            lex_.next();
            return hint_dinduct();
        }
        if (at_ident("solve")) {
            lex_.next();
            return hint_solve();
        }
        if (at_ident("darboux")) {
            lex_.next();
            expect_punct("(");
            Expr e = parse_expr(scope);
            expect_punct(",");
            Expr c = parse_expr(scope);
            expect_punct(",");
            std::string rel = expect_any_ident("darboux relation");
            CmpOp op;
            if (rel == "eq")
                op = CmpOp::Eq;
            else if (rel == "ge")
                op = CmpOp::Ge;
            else if (rel == "gt")
                op = CmpOp::Gt;
            else
                lex_.fail("expected eq, ge or gt");
            expect_punct(")");
            return hint_darboux(e, c, op);
        }
        if (at_ident("ghost")) {
            lex_.next();
            expect_punct("(");
            std::string fresh = expect_any_ident("ghost variable");
            expect_punct(",");
            Expr a = parse_expr(scope);
            expect_punct(",");
            Expr b = parse_expr(scope);
            expect_punct(")");
            HintPtr inner = parse_hint(prob);
            return hint_ghost(GhostSpec{fresh, a, b}, inner);
        }
        lex_.fail("expected a proof hint (flow/dinduct/solve/darboux/ghost)");
    }

    // ----- predicates -----

    Pred parse_implies(const ExprScope& scope) {
        Pred lhs = parse_or(scope);
        if (at_punct("->")) {
            lex_.next();
            return pimplies(lhs, parse_implies(scope));
        }
        return lhs;
    }

    Pred parse_or(const ExprScope& scope) {
        Pred lhs = parse_and(scope);
        while (at_punct("|")) {
            lex_.next();
            lhs = por(lhs, parse_and(scope));
        }
        return lhs;
    }

    Pred parse_and(const ExprScope& scope) {
        Pred lhs = parse_not(scope);
        while (at_punct("&")) {
            lex_.next();
            lhs = pand(lhs, parse_not(scope));
        }
        return lhs;
    }

    Pred parse_not(const ExprScope& scope) {
        if (at_punct("!")) {
            lex_.next();
            return pnot(parse_not(scope));
        }
        return parse_pred_atom(scope);
    }

    Pred parse_pred_atom(const ExprScope& scope) {
        if (at_ident("true")) {
            lex_.next();
            return ptrue();
        }
        if (at_ident("false")) {
            lex_.next();
            return pfalse();
        }
        if (at_punct("(")) {
            // try a parenthesized comparison first, fall back to pred parens
            auto save = lex_.save();
            try {
                return parse_cmp(scope);
            } catch (const SyntaxError&) {
                lex_.restore(save);
            }
            expect_punct("(");
            Pred p = parse_pred(scope);
            expect_punct(")");
            return p;
        }
        return parse_cmp(scope);
    }

    Pred parse_cmp(const ExprScope& scope) {
        Expr lhs = parse_expr(scope);
        CmpOp op;
        if (at_punct("=")) {
            op = CmpOp::Eq;
        } else if (at_punct("<=")) {
            op = CmpOp::Le;
        } else if (at_punct("<")) {
            op = CmpOp::Lt;
        } else if (at_punct(">=")) {
            op = CmpOp::Ge;
        } else if (at_punct(">")) {
            op = CmpOp::Gt;
        } else if (at_punct("!=")) {
            op = CmpOp::Ne;
        } else {
            lex_.fail("expected comparison operator");
        }
        lex_.next();
        Expr rhs = parse_expr(scope);
        return cmp(op, lhs, rhs);
    }

    // ----- expressions -----

    Expr parse_term(const ExprScope& scope) {
        if (at_punct("-")) {
            lex_.next();
            Expr e = parse_term(scope);
            if (is_num(e)) return num(-e->value);  // fold negative literals
            return neg(e);
        }
        return parse_mulchain(scope);
    }

    Expr parse_mulchain(const ExprScope& scope) {
        Expr lhs = parse_factor(scope);
        while (at_punct("*") || at_punct("/")) {
            bool times = lex_.next().text == "*";
            Expr rhs = parse_factor(scope);
            if (times) {
                lhs = mul(lhs, rhs);
            } else if (is_num(lhs) && is_num(rhs) && rhs->value != 0) {
                lhs = num(lhs->value / rhs->value);  // fold rational literals
            } else {
                lhs = div(lhs, rhs);
            }
        }
        return lhs;
    }

    Expr parse_factor(const ExprScope& scope) {
        Expr base = parse_primary(scope);
        if (at_punct("^")) {
            lex_.next();
            auto t = lex_.peek();
            if (t.kind != detail::Tok::Number || !is_integer(t.value) || t.value < 0)
                lex_.fail("expected a nonnegative integer exponent");
            if (t.value > 100000) lex_.fail("exponent too large");
            lex_.next();
            return pow(base, static_cast<int>(numerator(t.value).convert_to<long long>()));
        }
        return base;
    }

    Expr parse_primary(const ExprScope& scope) {
        const auto t = lex_.peek();
        if (t.kind == detail::Tok::Number) {
            lex_.next();
            return num(t.value);
        }
        if (at_punct("(")) {
            lex_.next();
            Expr e = parse_expr(scope);
            expect_punct(")");
            return e;
        }
        if (at_punct("$")) {
            lex_.next();
            auto vt = lex_.peek();
            std::string n = expect_any_ident("initial-value name");
            if (!scope.dollar_mode)
                throw_at(ErrKind::UndeclaredName, "$-references only apply inside flows", vt);
            if (!scope.dollar_frame.empty() && !scope.dollar_frame.count(n))
                throw_at(ErrKind::UndeclaredName, "'$" + n + "' is not a frame variable", vt);
            return state_var(n);
        }
        if (t.kind == detail::Tok::Ident) {
            lex_.next();
            const std::string& n = t.text;
            if (n == "sin" || n == "cos" || n == "tan" || n == "exp" || n == "sqrt" || n == "ln") {
                expect_punct("(");
                Expr arg = parse_expr(scope);
                expect_punct(")");
                if (n == "sin") return sin(arg);
                if (n == "cos") return cos(arg);
                if (n == "tan") return tan(arg);
                if (n == "exp") return exp(arg);
                if (n == "sqrt") return sqrt(arg);
                return ln(arg);
            }
            if (scope.state.count(n)) {
                if (scope.dollar_mode)
                    throw_at(ErrKind::UndeclaredName,
                             "state '" + n + "' must be written $" + n + " inside flows", t);
                return state_var(n);
            }
            if (scope.params.count(n)) return param(n);
            if (n == "t" && (scope.allow_time || scope.dollar_mode)) return time_var();
            if (n == "pi") return named_const("pi");
            if (n == "euler") return named_const("euler");
            throw_at(ErrKind::UndeclaredName, "unknown name '" + n + "'", t);
        }
        lex_.fail("expected an expression");
    }

    Subst parse_flow_literal(const ExprScope& scope) {
        expect_punct("[");
        Subst s;
        while (true) {
            auto tok = lex_.peek();
            std::string v = expect_any_ident("flow variable");
            if (!scope.dollar_frame.empty() && !scope.dollar_frame.count(v))
                throw_at(ErrKind::UndeclaredName, "'" + v + "' is not a state variable", tok);
            expect_punct("~>");
            Expr e = parse_expr(scope);
            if (s.contains(v))
                throw_at(ErrKind::DuplicateName, "duplicate flow entry for '" + v + "'", tok);
            s = s.update(v, e);
            if (at_punct(",")) {
                lex_.next();
                continue;
            }
            break;
        }
        expect_punct("]");
        return s;
    }

    // ----- token helpers -----

    bool at_punct(const std::string& p) const {
        return lex_.peek().kind == detail::Tok::Punct && lex_.peek().text == p;
    }
    bool at_ident(const std::string& n) const {
        return lex_.peek().kind == detail::Tok::Ident && lex_.peek().text == n;
    }
    void expect_punct(const std::string& p) {
        if (!at_punct(p)) lex_.fail("expected '" + p + "'");
        lex_.next();
    }
    void expect_ident(const std::string& n) {
        if (!at_ident(n)) lex_.fail("expected '" + n + "'");
        lex_.next();
    }
    std::string expect_any_ident(const std::string& what) {
        if (lex_.peek().kind != detail::Tok::Ident) lex_.fail("expected " + what);
        return lex_.next().text;
    }
    void expect_end() {
        if (lex_.peek().kind != detail::Tok::End) lex_.fail("trailing input");
    }

    [[noreturn]] void throw_at(ErrKind kind, const std::string& msg, const detail::Token& tok) {
        throw Error(kind, msg + " at line " + std::to_string(tok.line) + ", column " +
                              std::to_string(tok.col));
    }

    detail::Lexer lex_;
};

// ---------------------------------------------------------------------------
// Public entry points

inline Problem parse_problem(const std::string& text) {
    Parser p(text);
    return p.parse_problem_file();
}

inline Expr parse_expr_text(const std::string& text, const ExprScope& scope) {
    Parser p(text);
    return p.parse_expr_all(scope);
}

inline Pred parse_pred_text(const std::string& text, const ExprScope& scope) {
    Parser p(text);
    return p.parse_pred_all(scope);
}

inline Subst parse_flow_text(const std::string& text, const ExprScope& scope) {
    Parser p(text);
    return p.parse_flow_all(scope);
}

/// Scope for a flow body over the given frame (used by the CLI).
inline ExprScope make_flow_scope(const std::set<std::string>& frame,
                                 const std::set<std::string>& params) {
    ExprScope s;
    s.params = params;
    s.allow_time = true;
    s.dollar_mode = true;
    s.dollar_frame = frame;
    return s;
}

}  // namespace odecert
