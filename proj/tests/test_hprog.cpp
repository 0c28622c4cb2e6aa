#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;

namespace {

Problem blood_sugar() { return parse_problem(testutil::read_problem("blood_sugar.hprog")); }

}  // namespace

TEST_CASE("substitution maps: update, lookup, rendering") {
    Subst s;
    Expr e1 = param("a"), e2 = param("b");
    Subst s2 = s.update("x", e1).update("y", e2);
    CHECK(s2.size() == 2);
    CHECK(expr_equal(s2.lookup("x"), e1));
    CHECK(expr_equal(s2.lookup("y"), e2));

    // later updates overwrite
    Subst s3 = Subst().update("x", num(1)).update("x", num(2));
    CHECK(is_num(s3.lookup("x"), Rat(2)));

    // identity default
    CHECK(expr_equal(Subst().lookup("z"), state_var("z")));

    // rendering is alphabetical regardless of insertion order
    Subst s4 = Subst().update("y", e2).update("x", e1);
    CHECK(to_string(s4) == "[x ~> a, y ~> b]");
}

TEST_CASE("update commutes for distinct names and satisfies the lens laws") {
    Expr u = num(1), v = num(2);
    Subst base = Subst().update("z", num(9));
    CHECK(base.update("x", u).update("y", v) == base.update("y", v).update("x", u));
    // get-put
    CHECK(expr_equal(base.update("x", u).lookup("x"), u));
    // put-get
    CHECK(base.update("z", base.lookup("z")) == base);
}

TEST_CASE("sequential composition applies the first substitution pointwise") {
    Subst first = Subst().update("x", add(state_var("x"), num(1)));
    Subst second = Subst().update("y", mul(state_var("x"), num(2)));
    Subst seq = first.compose(second);
    CHECK(expr_equal(seq.lookup("y"), mul(add(state_var("x"), num(1)), num(2))));
    CHECK(expr_equal(seq.lookup("x"), add(state_var("x"), num(1))));
}

TEST_CASE("parsing the insulin controller") {
    Problem prob = blood_sugar();
    CHECK(prob.name == "blood_sugar");
    CHECK(prob.param_names == std::vector<std::string>{"g_m", "g_M"});
    CHECK(prob.state_vars == std::vector<std::string>{"g"});
    REQUIRE(prob.prog_defs.count("dyn"));
    const HProg& dyn = prob.prog_defs.at("dyn");
    REQUIRE(dyn->kind == ProgKind::Evolve);
    CHECK(dyn->evo.frame == std::vector<std::string>{"g"});
    CHECK(is_true(dyn->evo.guard));
    CHECK(expr_equal(dyn->evo.field.lookup("g"), neg(state_var("g"))));
    REQUIRE(prob.goals.size() == 1);
    CHECK(prob.goals[0].strategy->kind == HintKind::Flow);
}

TEST_CASE("parse errors") {
    CHECK_NOTHROW(parse_problem("problem p { variables { } goal g: hoare {true} skip {true}; }"));
    CHECK_THROWS_AS(parse_problem("problem p { variables { x; } def d = { x' = 1, x' = 2 }; }"),
                    Error);
    try {
        parse_problem("problem p { variables { x; } def d = { x' = 1, x' = 2 }; }");
        FAIL("expected DuplicateName");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::DuplicateName);
    }
    try {
        parse_problem("problem p { variables { x; } goal g: hoare {true} y := 1 {true}; }");
        FAIL("expected UndeclaredName");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::UndeclaredName);
    }
    // syntax errors carry positions
    try {
        parse_problem("problem p {\n  variables { x; }\n  def d = ;\n}");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("a loop without an invariant parses but fails at verification time") {
    Problem prob = parse_problem(
        "problem p { variables { x; } goal g: hoare {true} loop (x := x) {true}; }");
    REQUIRE(prob.goals.size() == 1);
    try {
        hoare_vcs(prob.goals[0], prob);
        FAIL("expected MissingLoopInvariant");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::MissingLoopInvariant);
    }
}

TEST_CASE("mutated frames are syntactic over-approximations") {
    Problem prob = blood_sugar();
    HProg assign = prog_assign("x", add(state_var("x"), num(1)));
    CHECK(mutated_frame(assign) == std::set<std::string>{"x"});

    // the controller loop body only touches g
    HProg body = prog_seq(prob.prog_defs.at("ctrl"), prob.prog_defs.at("dyn"));
    CHECK(mutated_frame(body) == std::set<std::string>{"g"});

    // an ODE leaves variables without assigned derivatives untouched
    Problem multi = parse_problem(
        "problem p { variables { p1; v1; rs; } def ode = { p1' = v1, v1' = 1 }; }");
    auto fr = mutated_frame(multi.prog_defs.at("ode"));
    CHECK(fr.count("p1"));
    CHECK(fr.count("v1"));
    CHECK_FALSE(fr.count("rs"));
}

TEST_CASE("nmods and unrestriction") {
    HProg assign = prog_assign("x", add(state_var("x"), num(1)));
    CHECK(nmods_check(assign, {"y", "z"}));
    CHECK_FALSE(nmods_check(assign, {"x"}));

    Problem prob = blood_sugar();
    CHECK_FALSE(nmods_check(prob.prog_defs.at("dyn"), {"g"}));

    CHECK(unrestricted_check({"x"}, add(state_var("y"), num(1))));
    CHECK_FALSE(unrestricted_check({"g"}, cmp(CmpOp::Ge, state_var("g"), num(0))));
    // a predicate over rs only is unrestricted by everything else
    CHECK(unrestricted_check({"p1", "v1"}, cmp(CmpOp::Gt, state_var("rs"), num(0))));
}

TEST_CASE("frame rule applies exactly when nothing mutated is mentioned") {
    Problem prob = blood_sugar();
    const HProg& dyn = prob.prog_defs.at("dyn");
    Pred param_inv = cmp(CmpOp::Gt, param("k"), num(1));
    Pred pre = cmp(CmpOp::Ge, state_var("g"), num(0));

    auto applied = frame_rule_apply(dyn, param_inv, pre, pre);
    REQUIRE(applied);
    CHECK(pred_equal(applied->first, pand(pre, param_inv)));

    // rs > 0 frames around an ODE not mentioning rs
    Problem multi = parse_problem(
        "problem p { variables { p1; v1; rs; } def ode = { p1' = v1, v1' = 1 }; }");
    Pred rs_pos = cmp(CmpOp::Gt, state_var("rs"), num(0));
    CHECK(frame_rule_apply(multi.prog_defs.at("ode"), rs_pos, ptrue(), ptrue()).has_value());

    // g := g_M does modify g
    HProg set_g = prog_assign("g", param("g_M"));
    CHECK_FALSE(frame_rule_apply(set_g, pre, ptrue(), ptrue()).has_value());
}

TEST_CASE("simulated runs leave unmodified variables at their initial value") {
    Problem multi = parse_problem(
        "problem p { variables { p1; v1; rs; } def ode = { p1' = v1, v1' = 1 }; "
        "def prog = (rs := rs; ode); }");
    const HProg& prog = multi.prog_defs.at("prog");
    auto frame = mutated_frame(prog);

    FlowTable flows;
    SamplerConfig cfg;
    cfg.samples = 50;
    cfg.seed = 9;
    DEnv init;
    init.vars = {{"p1", 1.0}, {"v1", 2.0}, {"rs", 7.5}};
    auto finals = simulate(prog, init, flows, cfg);
    REQUIRE_FALSE(finals.empty());
    for (const auto& f : finals) {
        for (const auto& [k, v0] : init.vars) {
            if (!frame.count(k)) CHECK(f.vars.at(k) == v0);
        }
    }
}

TEST_CASE("pretty printer reaches a fixpoint on the bundled corpus") {
    for (const char* name :
         {"blood_sugar.hprog", "blood_sugar_darboux.hprog", "blood_sugar_diamond.hprog",
          "diffinduct.hprog", "rotational3.hprog", "conserved.hprog", "rocket.hprog",
          "planar_flight.hprog", "sode_example.hprog", "odes_affine.hprog",
          "simple_flow.hprog", "refutable.hprog"}) {
        Problem p1 = parse_problem(testutil::read_problem(name));
        std::string printed = print_problem(p1);
        INFO(name << "\n" << printed);
        Problem p2 = parse_problem(printed);
        CHECK(print_problem(p2) == printed);
    }
}
