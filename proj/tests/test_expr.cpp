#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;
using testutil::Gen;

namespace {

ExprScope scope_xy() {
    ExprScope s;
    s.state = {"x", "y", "g"};
    s.params = {"a", "b", "c", "k"};
    s.allow_time = true;
    return s;
}

Expr parse(const std::string& text) { return parse_expr_text(text, scope_xy()); }

}  // namespace

TEST_CASE("free variables partition state, params and time") {
    auto fv = free_vars(parse("x + y"));
    CHECK(fv.state == std::set<std::string>{"x", "y"});
    CHECK(fv.params.empty());
    CHECK_FALSE(fv.uses_time);

    auto fv2 = free_vars(parse("g*exp(-t)"));
    CHECK(fv2.state == std::set<std::string>{"g"});
    CHECK(fv2.uses_time);

    auto fv3 = free_vars(num(3));
    CHECK(fv3.state.empty());
    CHECK(fv3.params.empty());
    CHECK_FALSE(fv3.uses_time);
}

TEST_CASE("substitution replaces state variables simultaneously") {
    std::map<std::string, Expr> sigma{{"g", param("gM")}};
    CHECK(expr_equal(substitute(state_var("g"), sigma), param("gM")));

    Expr e = parse("x^2 + y");
    std::map<std::string, Expr> identity{{"x", state_var("x")}};
    CHECK(expr_equal(substitute(e, identity), e));

    // (x^2 + y)[x -> t+1] agrees with direct evaluation at random points
    std::map<std::string, Expr> sx{{"x", parse("t + 1")}};
    Expr subbed = substitute(e, sx);
    Gen gen(42);
    for (int i = 0; i < 20; ++i) {
        DEnv env = gen.denv({"x", "y"});
        DEnv shifted = env;
        shifted.vars["x"] = *env.time + 1;
        CHECK(testutil::approx_rel(eval_double(subbed, env), eval_double(e, shifted), 1e-12));
    }
}

TEST_CASE("substitution distributes over every constructor") {
    Gen gen(7);
    std::vector<std::string> vars{"x", "y"};
    std::map<std::string, Expr> sigma{{"x", parse("y + 1")}, {"y", parse("2*x")}};
    for (int i = 0; i < 100; ++i) {
        Expr a = gen.expr(vars, 3), b = gen.expr(vars, 3);
        CHECK(expr_equal(substitute(add(a, b), sigma),
                         add(substitute(a, sigma), substitute(b, sigma))));
        CHECK(expr_equal(substitute(mul(a, b), sigma),
                         mul(substitute(a, sigma), substitute(b, sigma))));
        CHECK(expr_equal(substitute(neg(a), sigma), neg(substitute(a, sigma))));
        CHECK(expr_equal(substitute(sin(a), sigma), sin(substitute(a, sigma))));
        CHECK(expr_equal(substitute(pow(a, 3), sigma), pow(substitute(a, sigma), 3)));
    }
}

TEST_CASE("exact evaluation") {
    Env env;
    env.vars["x"] = rat(2);
    CHECK(eval_exact(parse("x^2 + 1"), env) == rat(5));

    Env zero;
    zero.vars["x"] = rat(0);
    CHECK_THROWS_MATCHES(eval_exact(parse("1/x"), zero), Error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("DivisionByZero")));

    CHECK_THROWS_AS(eval_exact(parse("sin(x)"), env), Error);
    CHECK_THROWS_AS(eval_exact(parse("y"), env), Error);  // unbound
}

TEST_CASE("float evaluation matches the affine solution value") {
    // b/a*e^(a*t) + c*e^(a*t) - b/a at a=1, b=0, c=3, t=0 evaluates to 3
    ExprScope s;
    s.params = {"a", "b", "c"};
    s.allow_time = true;
    Expr e = parse_expr_text("b/a*exp(a*t) + c*exp(a*t) - b/a", s);
    DEnv env;
    env.vars = {{"a", 1.0}, {"b", 0.0}, {"c", 3.0}};
    env.time = 0.0;
    CHECK(eval_double(e, env) == Catch::Approx(3.0));
}

TEST_CASE("float evaluation domain errors") {
    DEnv env;
    env.vars["x"] = -1.0;
    CHECK_THROWS_AS(eval_double(parse("sqrt(x)"), env), Error);
    CHECK_THROWS_AS(eval_double(parse("ln(x)"), env), Error);
    env.vars["x"] = 0.0;
    CHECK_THROWS_AS(eval_double(parse("1/x"), env), Error);
}

TEST_CASE("canonical rendering round-trips through the parser") {
    // the parser folds literal negations/quotients, so the guarantee is the
    // print-parse fixpoint: parsed trees and their text are stable
    Gen gen(2024);
    std::vector<std::string> vars{"x", "y", "g"};
    for (int i = 0; i < 500; ++i) {
        Expr e = gen.expr(vars, 4);
        std::string text = to_string(e);
        Expr once = parse_expr_text(text, scope_xy());
        INFO(text);
        CHECK(to_string(once) == to_string(parse_expr_text(to_string(once), scope_xy())));
        CHECK(expr_equal(once, parse_expr_text(to_string(once), scope_xy())));
    }
    // representative fixed forms
    for (const char* text : {"x^2/2 + y", "-x", "1/2", "-1/6*k*x^3", "g*exp(-t)",
                             "(x + 1)^2", "x - (y - 1)", "x/(2*y)", "sin(t)^2 + cos(t)^2"}) {
        Expr e = parse(text);
        CHECK(expr_equal(parse(to_string(e)), e));
    }
}

TEST_CASE("simultaneous rational literals fold at parse time") {
    CHECK(is_num(parse("1/2"), rat(1, 2)));
    CHECK(is_num(parse("-5"), Rat(-5)));
    CHECK(is_num(parse("2.5"), rat(5, 2)));
    CHECK(parse("x/2")->kind == ExprKind::Div);
}

TEST_CASE("pow exponents are literal nonnegative integers") {
    CHECK_THROWS_AS(parse("x^y"), SyntaxError);
    CHECK_THROWS_AS(parse("x^(2)"), SyntaxError);
    CHECK(parse("x^0")->kind == ExprKind::Pow);
}
