#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;
using testutil::Gen;

namespace {

ExprScope scope_poly() {
    ExprScope s;
    s.state = {"x", "y", "u", "x1", "x2"};
    s.params = {"a", "b", "c", "w"};
    s.allow_time = true;
    return s;
}

Expr parse(const std::string& text) { return parse_expr_text(text, scope_poly()); }

}  // namespace

TEST_CASE("commuted products normalize identically") {
    CHECK(poly_is_zero(poly_normalize(parse("x*y - y*x")).poly));
    CHECK(poly_is_zero(poly_normalize(parse("(x + y)^2 - x^2 - 2*x*y - y^2")).poly));
}

TEST_CASE("the quartic cancellation collapses to the zero polynomial") {
    // the expanded directional derivative of the conserved quantity
    Expr e = parse(
        "8*x1^7*x2^3 + 16*x1^5*x2^5 - 24*x1^5*x2^3 - 8*x1^7*x2^3 - 4*x1^5*x2^5"
        " + 12*x1^5*x2^3 + 4*x1^5*x2^5 + 8*x1^3*x2^7 - 12*x1^3*x2^5 - 16*x1^5*x2^5"
        " - 8*x1^3*x2^7 + 24*x1^3*x2^5 - 12*x1^5*x2^3 - 24*x1^3*x2^5 + 36*x1^3*x2^3"
        " + 24*x1^5*x2^3 + 12*x1^3*x2^5 - 36*x1^3*x2^3");
    CHECK(poly_is_zero(poly_normalize(e).poly));
}

TEST_CASE("transcendental applications stay opaque") {
    auto n = poly_normalize(parse("sin(t)^2 + cos(t)^2"));
    CHECK(n.poly.size() == 2);  // two opaque-atom monomials, not the constant 1
    CHECK(equal_poly(parse("sin(t)^2 + cos(t)^2"), num(1)).status == EqStatus::Unknown);
    // arguments are normalized, so sin(w*t) and sin(t*w) share an atom
    CHECK(poly_is_zero(poly_normalize(parse("sin(w*t) - sin(t*w)")).poly));
}

TEST_CASE("normalization is a ring homomorphism") {
    Gen gen(5);
    std::vector<std::string> vars{"x", "y"};
    for (int i = 0; i < 200; ++i) {
        Expr a = gen.expr(vars, 4, /*full=*/false);
        Expr b = gen.expr(vars, 4, /*full=*/false);
        Poly pa = poly_normalize(a).poly, pb = poly_normalize(b).poly;
        CHECK(poly_equal(poly_normalize(add(a, b)).poly, poly_add(pa, pb)));
        CHECK(poly_equal(poly_normalize(mul(a, b)).poly, poly_mul(pa, pb)));
        CHECK(poly_equal(poly_normalize(neg(a)).poly, poly_neg(pa)));
        CHECK(poly_equal(poly_normalize(pow(a, 3)).poly, poly_pow(pa, 3)));
    }
}

TEST_CASE("equality decision") {
    CHECK(equal_poly(parse("x"), parse("x + 1")).status == EqStatus::NotEqual);
    CHECK(equal_poly(parse("(x + 1)^2"), parse("x^2 + 2*x + 1")).status == EqStatus::Equal);

    // guarded identity: 1/u * u = 1 only holds when u != 0
    EqResult guarded = equal_poly(parse("1/u*u"), num(1));
    CHECK(guarded.status == EqStatus::Unknown);
    CHECK(guarded.cond_equal);
    REQUIRE(guarded.side_conds.size() == 1);
    CHECK(expr_equal(guarded.side_conds[0].divisor, state_var("u")));

    // field laws: a*(b/a) = b modulo a != 0
    EqResult field = equal_poly(parse("a*(b/a)"), parse("b"));
    CHECK(field.status == EqStatus::Unknown);
    CHECK(field.cond_equal);
}

TEST_CASE("division by a nonzero rational constant is transparent") {
    CHECK(equal_poly(parse("x/2"), parse("1/2*x")).equal());
    auto n = poly_normalize(parse("x/2"));
    CHECK(n.conds.empty());
}

TEST_CASE("poly to expr round trip preserves meaning") {
    Gen gen(17);
    std::vector<std::string> vars{"x", "y"};
    for (int i = 0; i < 100; ++i) {
        Expr e = gen.expr(vars, 4, /*full=*/false);
        Expr back = poly_to_expr(poly_normalize(e).poly);
        for (int j = 0; j < 20; ++j) {
            DEnv env = gen.denv(vars);
            CHECK_FALSE(testutil::eval_mismatch(e, back, env, 1e-7));
        }
    }
}

TEST_CASE("equal expressions evaluate equally (sampled)") {
    Gen gen(23);
    std::vector<std::string> vars{"x", "y"};
    for (int i = 0; i < 25; ++i) {
        Expr a = gen.expr(vars, 4, /*full=*/false);
        Expr b = sub(add(a, parse("x*y")), parse("x*y"));  // equal by construction
        REQUIRE(equal_poly(a, b).equal());
        for (int j = 0; j < 40; ++j) {
            DEnv env = gen.denv(vars);
            CHECK_FALSE(testutil::eval_mismatch(a, b, env, 1e-9));
        }
    }
}

TEST_CASE("the optional rewrite pack closes trig and exponential identities") {
    // off by default: atoms stay opaque
    CHECK(equal_poly(parse("sin(t)^2 + cos(t)^2"), num(1)).status == EqStatus::Unknown);

    // enabled: the Pythagorean identity and exponent sums close
    CHECK(equal_poly_rw(parse("sin(t)^2 + cos(t)^2"), num(1), true).equal());
    CHECK(equal_poly_rw(parse("exp(x)*exp(y)"), parse("exp(x + y)"), true).equal());
    CHECK(equal_poly_rw(parse("exp(x)*exp(-x)"), num(1), true).equal());
    CHECK(equal_poly_rw(parse("sin(w*t)^4"), parse("(1 - cos(w*t)^2)^2"), true).equal());
    CHECK(equal_poly_rw(parse("sin(t)^2"), num(1), true).status != EqStatus::Equal);

    // and the discharge pipeline can opt in per attempt
    VC vc;
    vc.label = "pythagoras";
    vc.goal = qleaf(cmp(CmpOp::Eq, parse("sin(t)^2 + cos(t)^2"), num(1)));
    SamplerConfig cfg;
    CHECK(discharge_vc(vc, cfg).status != DischargeStatus::Proved);
    cfg.rewrite_pack = true;
    auto r = discharge_vc(vc, cfg);
    CHECK(r.status == DischargeStatus::Proved);
    CHECK(r.method == ProofMethod::PolyIdentity);
}
