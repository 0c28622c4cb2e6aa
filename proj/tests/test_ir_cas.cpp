#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;
using testutil::Gen;

namespace {

Expr parse(const std::string& text) {
    return parse_expr_text(text, make_flow_scope({"x", "y"}, {"a", "w"}));
}

CASExpr random_cas(Gen& gen, int depth) {
    if (depth <= 0 || gen.upto(4) == 0) {
        switch (gen.upto(2)) {
            case 0: return cas_int(gen.upto(40) - 20);
            case 1: return cas_id(std::string(1, char('a' + gen.upto(5))) +
                                  (gen.upto(1) ? "0" : ""));
            default: return cas_real(gen.real(-4, 4));
        }
    }
    switch (gen.upto(6)) {
        case 0: return cas_fun("Plus", {random_cas(gen, depth - 1), random_cas(gen, depth - 1)});
        case 1:
            return cas_fun("Subtract", {random_cas(gen, depth - 1), random_cas(gen, depth - 1)});
        case 2: return cas_fun("Times", {random_cas(gen, depth - 1), random_cas(gen, depth - 1)});
        case 3: return cas_fun("Minus", {random_cas(gen, depth - 1)});
        case 4: return cas_fun("Sin", {random_cas(gen, depth - 1)});
        case 5: return cas_fun("List", {random_cas(gen, depth - 1), random_cas(gen, depth - 1)});
        default:
            return cas_fun("Rule", {cas_id("a"), cas_fun("Function", {cas_fun("List", {cas_id("t")}),
                                                                      random_cas(gen, depth - 1)})});
    }
}

}  // namespace

TEST_CASE("IR translation table") {
    // t + $x maps to a binary plus over the independent variable and state
    IRExpr ir = to_ir(parse("t + $x"));
    REQUIRE(ir->kind == IRKind::BOp);
    CHECK(ir->name == "plus");
    CHECK(ir->a->kind == IRKind::IVar);
    CHECK(ir->b->kind == IRKind::SVar);
    CHECK(ir->b->name == "x");

    IRExpr r = to_ir(num(3, 2));
    CHECK(r->kind == IRKind::NReal);
    CHECK(r->rval == rat(3, 2));

    CHECK(to_ir(named_const("pi"))->kind == IRKind::NConst);
    CHECK(to_ir(num(-4))->kind == IRKind::NInt);
    CHECK(to_ir(num(4))->kind == IRKind::NNat);
}

TEST_CASE("IR round trips structurally") {
    Gen gen(71);
    std::vector<std::string> vars{"x", "y"};
    for (int i = 0; i < 500; ++i) {
        Expr e = gen.expr(vars, 4);
        CHECK(expr_equal(from_ir(to_ir(e)), e));
    }
}

TEST_CASE("CAS expressions print and parse exactly") {
    // negative literals fold at parse time, so the guarantee is again the
    // print-parse fixpoint
    Gen gen(73);
    for (int i = 0; i < 500; ++i) {
        CASExpr e = random_cas(gen, 4);
        CASExpr once = parse_cas(to_string(e));
        std::string text = to_string(once);
        INFO(text);
        CASExpr back = parse_cas(text);
        CHECK(cas_equal(once, back));
        CHECK(to_string(back) == text);
    }
}

TEST_CASE("DSolve request for the clock") {
    std::vector<std::pair<std::string, IRExpr>> field{{"x", to_ir(num(1))}};
    CASRequest req = ir_to_cas_request(field, {"x"});
    CHECK(req.text == "DSolve[{a'[t] == 1, a[0] == a0}, {a}, t]");
    CHECK(req.mapping.at("x") == "a");
}

TEST_CASE("the variable mapping is alphabetical by source name") {
    std::vector<std::pair<std::string, IRExpr>> field{{"y", to_ir(num(1))},
                                                      {"x", to_ir(num(2))}};
    CASRequest req = ir_to_cas_request(field, {"y", "x"});
    CHECK(req.mapping.at("x") == "a");
    CHECK(req.mapping.at("y") == "b");
    // letters colliding with parameter names are skipped
    CASRequest req2 = ir_to_cas_request(field, {"y", "x"}, {"a"});
    CHECK(req2.mapping.at("x") == "b");
    CHECK(req2.mapping.at("y") == "c");
}

TEST_CASE("requests reject unsupported operators") {
    IRExpr bogus = ir_bop("frobnicate", ir_nnat(1), ir_nnat(2));
    std::vector<std::pair<std::string, IRExpr>> field{{"x", bogus}};
    CHECK_THROWS_AS(ir_to_cas_request(field, {"x"}), Error);
}

TEST_CASE("parsing the clock solution") {
    std::map<std::string, std::string> mapping{{"x", "a"}};
    FlowCandidate flow =
        parse_cas_solution("{{a -> Function[{t}, t + a0]}}", mapping, {"x"}, {});
    CHECK(expr_equal(flow.body.lookup("x"), add(time_var(), state_var("x"))));
}

TEST_CASE("an empty rule list is a parse error") {
    std::map<std::string, std::string> mapping{{"x", "a"}};
    CHECK_THROWS_AS(parse_cas_solution("{}", mapping, {"x"}, {}), Error);
}

TEST_CASE("nested function forms translate through the tables") {
    std::map<std::string, std::string> mapping{{"x", "a"}};
    FlowCandidate flow = parse_cas_solution("{{a -> Function[{t}, a0*E^(-t) + Sin[w*t]/w]}}",
                                            mapping, {"x"}, {"w"});
    Expr want = parse_expr_text("$x*exp(-t) + sin(w*t)/w", make_flow_scope({"x"}, {"w"}));
    CHECK(equal_poly(flow.body.lookup("x"), want).status != EqStatus::NotEqual);

    // curried heads survive the expression parser
    CASExpr curry = parse_cas("C[1][t]");
    REQUIRE(curry->kind == CASKind::CurryFun);
    CHECK(curry->name == "C");
    // ... but free constants cannot become flows
    CHECK_THROWS_AS(
        parse_cas_solution("{{a -> Function[{t}, C[1]*E^t]}}", mapping, {"x"}, {}), Error);
}

TEST_CASE("affine request text is deterministic") {
    ExprScope s;
    s.state = {"y"};
    s.params = {"a", "b"};
    Expr rhs = parse_expr_text("a*y + b", s);
    std::vector<std::pair<std::string, IRExpr>> field{{"y", to_ir(rhs)}};
    CASRequest req = ir_to_cas_request(field, {"y"}, {"a", "b"});
    CHECK(req.text == "DSolve[{c'[t] == a*c[t] + b, c[0] == c0}, {c}, t]");
}
