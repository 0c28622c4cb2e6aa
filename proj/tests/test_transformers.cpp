#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;
using testutil::Gen;

namespace {

Problem blood_sugar() { return parse_problem(testutil::read_problem("blood_sugar.hprog")); }

ExprScope scope_bs() {
    ExprScope s;
    s.state = {"g", "x", "y"};
    s.params = {"g_m", "g_M", "c"};
    return s;
}

Pred parse_p(const std::string& text) { return parse_pred_text(text, scope_bs()); }

QPred run_wlp(const HProg& p, const Pred& post, FlowTable& flows) {
    NameGen names({"g", "x", "y", "g_m", "g_M"});
    return qsimplify(wlp(p, qleaf(post), flows, names));
}

QPred run_fdia(const HProg& p, const Pred& post, FlowTable& flows) {
    NameGen names({"g", "x", "y", "g_m", "g_M"});
    return qsimplify(fdia(p, qleaf(post), flows, names));
}

}  // namespace

TEST_CASE("wlp laws on discrete programs") {
    FlowTable flows;
    Pred q = parse_p("g >= 0");

    CHECK(pred_equal(qpred_to_pred(run_wlp(prog_skip(), q, flows)), q));
    CHECK(is_qleaf_true(run_wlp(prog_abort(), q, flows)));

    Pred p = parse_p("g <= g_m");
    QPred test = run_wlp(prog_test(p), q, flows);
    CHECK(pred_equal(qpred_to_pred(test), pimplies(p, q)));

    // assignment substitutes
    QPred asg = run_wlp(prog_assign("g", param("g_M")), q, flows);
    CHECK(pred_equal(qpred_to_pred(asg), parse_p("g_M >= 0")));

    // sequencing composes by construction
    HProg a = prog_assign("g", add(state_var("g"), num(1)));
    HProg b = prog_assign("g", mul(state_var("g"), num(2)));
    QPred seq = run_wlp(prog_seq(a, b), q, flows);
    QPred nested = run_wlp(a, qpred_to_pred(run_wlp(b, q, flows)), flows);
    CHECK(pred_equal(qpred_to_pred(seq), qpred_to_pred(nested)));
}

TEST_CASE("wlp of the controller produces both conditional branches") {
    Problem prob = blood_sugar();
    FlowTable flows;
    Pred r = parse_p("g >= 0");
    QPred w = run_wlp(prob.prog_defs.at("ctrl"), r, flows);
    Pred expected = pand(pimplies(parse_p("g <= g_m"), parse_p("g_M >= 0")),
                         pimplies(pnot(parse_p("g <= g_m")), r));
    CHECK(pred_equal(qpred_to_pred(w), expected));
}

TEST_CASE("wlp of the decay dynamics quantifies over time") {
    Problem prob = blood_sugar();
    const HProg& dyn = prob.prog_defs.at("dyn");

    FlowTable flows;
    FlowCandidate flow{{"g"},
                       parse_flow_text("[g ~> $g*exp(-t)]", make_flow_scope({"g"}, {})),
                       TimeDomain::AllReals};
    flows.add(dyn->evo, flow);

    QPred w = run_wlp(dyn, parse_p("g >= 0"), flows);
    REQUIRE(w->kind == QKind::Forall);
    CHECK(w->binder.kind == BoundKind::NonNeg);
    CHECK(to_string(w) == "forall t >= 0. g*exp(-t) >= 0");

    // a missing flow is an error
    FlowTable empty;
    CHECK_THROWS_AS(run_wlp(dyn, parse_p("g >= 0"), empty), Error);
}

TEST_CASE("fdia laws") {
    Problem prob = blood_sugar();
    FlowTable flows;
    Pred q = parse_p("g >= 0");

    CHECK(is_qleaf_false(run_fdia(prog_abort(), q, flows)));

    QPred asg = run_fdia(prog_assign("g", param("g_M")), q, flows);
    CHECK(pred_equal(qpred_to_pred(asg), parse_p("g_M >= 0")));

    const HProg& dyn = prob.prog_defs.at("dyn");
    FlowCandidate flow{{"g"},
                       parse_flow_text("[g ~> $g*exp(-t)]", make_flow_scope({"g"}, {})),
                       TimeDomain::AllReals};
    flows.add(dyn->evo, flow);
    QPred d = run_fdia(dyn, q, flows);
    REQUIRE(d->kind == QKind::Exists);
    CHECK(to_string(d) == "exists t >= 0. g*exp(-t) >= 0");
}

TEST_CASE("loops and evolution turn into guarded quantified goals") {
    // a nontrivial guard shows up as the inner bounded quantifier
    Problem prob = parse_problem(
        "problem p { variables { x; } def dyn = { x' = 1 | x <= 10 }; }");
    const HProg& dyn = prob.prog_defs.at("dyn");
    FlowTable flows;
    FlowCandidate flow{{"x"}, parse_flow_text("[x ~> t + $x]", make_flow_scope({"x"}, {})),
                       TimeDomain::AllReals};
    flows.add(dyn->evo, flow);
    NameGen names({"x"});
    QPred w = qsimplify(wlp(dyn, qleaf(parse_pred_text("x <= 10", [] {
                                ExprScope s;
                                s.state = {"x"};
                                return s;
                            }())),
                            flows, names));
    CHECK(to_string(w) == "forall t >= 0. (forall tau in [0, t]. tau + x <= 10) -> t + x <= 10");
}

TEST_CASE("duality of wlp and fdia on loop-free programs") {
    Gen gen(83);
    FlowTable flows;
    std::vector<std::string> vars{"x", "y"};

    auto random_prog = [&](auto&& self, int depth) -> HProg {
        if (depth <= 0 || gen.upto(3) == 0) {
            switch (gen.upto(2)) {
                case 0: return prog_skip();
                case 1:
                    return prog_assign(vars[gen.upto(1)], gen.expr(vars, 2, false));
                default:
                    return prog_test(cmp(CmpOp::Le, gen.expr(vars, 2, false),
                                         gen.expr(vars, 2, false)));
            }
        }
        switch (gen.upto(2)) {
            case 0: return prog_seq(self(self, depth - 1), self(self, depth - 1));
            case 1: return prog_choice(self(self, depth - 1), self(self, depth - 1));
            default:
                return prog_if(cmp(CmpOp::Lt, gen.expr(vars, 1, false),
                                   gen.expr(vars, 1, false)),
                               self(self, depth - 1), self(self, depth - 1));
        }
    };

    int mismatches = 0;
    for (int i = 0; i < 40; ++i) {
        HProg p = random_prog(random_prog, 3);
        Pred q = cmp(CmpOp::Ge, gen.expr(vars, 2, false), num(0));
        NameGen n1({"x", "y"}), n2({"x", "y"});
        Pred dia = qpred_to_pred(qsimplify(fdia(p, qleaf(q), flows, n1)));
        Pred box_not = qpred_to_pred(qsimplify(wlp(p, qleaf(pnot(q)), flows, n2)));
        REQUIRE(dia);
        REQUIRE(box_not);
        for (int j = 0; j < 200; ++j) {
            DEnv env = gen.denv(vars);
            if (eval_pred(dia, env) != !eval_pred(box_not, env)) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("the glucose loop generates three conditions via the loop rule") {
    Problem prob = blood_sugar();
    auto vcs = hoare_vcs(prob.goals[0], prob);
    REQUIRE(vcs.size() == 3);
    CHECK(vcs[0].label.find("init") != std::string::npos);
    CHECK(vcs[1].label.find("post") != std::string::npos);

    // the body condition embeds the flow-rewritten dynamics
    std::string body = to_string(vcs[2].goal);
    CHECK(body.find("exp(-t)") != std::string::npos);
    CHECK(body.find("g_M") != std::string::npos);

    for (const auto& vc : vcs) {
        auto r = discharge_vc(vc);
        INFO(vc.label << ": " << to_string(vc.goal));
        CHECK(r.status == DischargeStatus::Proved);
    }
}

TEST_CASE("dinduct goals emit exactly the literal obligations") {
    Problem prob = parse_problem(testutil::read_problem("diffinduct.hprog"));
    auto vcs = hoare_vcs(prob.goals[0], prob);
    REQUIRE(vcs.size() == 2);
    CHECK(pred_equal(qpred_to_pred(vcs[0].goal), cmp(CmpOp::Le, num(0), num(1))));
    CHECK(pred_equal(qpred_to_pred(vcs[1].goal), cmp(CmpOp::Le, num(1), num(2))));
}

TEST_CASE("diamond witnesses instantiate the existential") {
    Problem prob = parse_problem(testutil::read_problem("rocket.hprog"));
    const Goal* liftoff = nullptr;
    for (const auto& g : prob.goals)
        if (g.name == "liftoff") liftoff = &g;
    REQUIRE(liftoff);
    auto vcs = hoare_vcs(*liftoff, prob);
    REQUIRE(vcs.size() == 1);
    std::string goal = to_string(vcs[0].goal);
    // no existential remains; the witness value appears in the goal
    CHECK(goal.find("exists") == std::string::npos);
    CHECK(goal.find("2*m0/k") != std::string::npos);
    // and the altitude component got substituted in
    CHECK(goal.find("h <= ") != std::string::npos);
}

TEST_CASE("simulation agrees with proved triples") {
    Problem prob = blood_sugar();
    FlowTable flows;
    auto vcs = hoare_vcs(prob.goals[0], prob, &flows);
    for (const auto& vc : vcs) REQUIRE(discharge_vc(vc).status == DischargeStatus::Proved);

    SamplerConfig cfg;
    cfg.seed = 5;
    int violations = hoare_simulation_check(prob.goals[0], prob, flows, cfg, 1000);
    CHECK(violations == 0);
}

TEST_CASE("flow-specified evolution commands reduce directly") {
    Problem prob = parse_problem(
        "problem p { variables { x; } def f = [x ~> t + $x]; "
        "goal fwd: hoare {x >= 0} evol f {x >= 0}; }");
    auto vcs = hoare_vcs(prob.goals[0], prob);
    REQUIRE(vcs.size() == 1);
    CHECK(discharge_vc(vcs[0]).status == DischargeStatus::Proved);

    // guarded variant: the guard appears as the inner bounded quantifier
    Problem guarded = parse_problem(
        "problem p { variables { x; } def f = [x ~> t + $x]; "
        "goal fwd: hoare {x >= 0} evol f | x <= 100 {x >= 0}; }");
    auto gvcs = hoare_vcs(guarded.goals[0], guarded);
    REQUIRE(gvcs.size() == 1);
    CHECK(to_string(gvcs[0].goal).find("forall tau") != std::string::npos);
}

TEST_CASE("while loops route through their invariant") {
    Problem prob = parse_problem(
        "problem p { variables { x; } "
        "goal count: hoare {x >= 0} while (x < 10) inv (x >= 0) { x := x + 1 } {x >= 10}; }");
    auto vcs = hoare_vcs(prob.goals[0], prob);
    REQUIRE(vcs.size() == 3);
    for (const auto& vc : vcs) {
        INFO(vc.label << ": " << to_string(vc.goal));
        CHECK(discharge_vc(vc).status == DischargeStatus::Proved);
    }
}

TEST_CASE("ghost hints augment and defer to the inner strategy") {
    Problem prob = parse_problem(
        "problem p { constants { g_m: real; } variables { g; } def dyn = { g' = -g }; "
        "goal inv: hoare {g >= 0} dyn {g >= 0} using ghost(yg, -1, 0) darboux(g, -1, ge); }");
    auto vcs = hoare_vcs(prob.goals[0], prob);
    REQUIRE_FALSE(vcs.empty());
    for (const auto& vc : vcs) {
        INFO(vc.label << ": " << to_string(vc.goal));
        CHECK(discharge_vc(vc).status == DischargeStatus::Proved);
    }
}

TEST_CASE("conjunction invariants split into the union of literal obligations") {
    Problem prob = parse_problem(testutil::read_problem("diffinduct.hprog"));
    const EvolutionCmd& evo = prob.prog_defs.at("dyn")->evo;
    ExprScope s;
    s.state = {"x", "y"};
    s.params = {"c"};
    Pred i = parse_pred_text("x > c", s);
    Pred j = parse_pred_text("y >= x", s);

    auto both = diff_induct(pand(i, j), evo);
    auto only_i = diff_induct(i, evo);
    auto only_j = diff_induct(j, evo);
    REQUIRE(both.size() == only_i.size() + only_j.size());
    CHECK(pred_equal(qpred_to_pred(both[0].goal), qpred_to_pred(only_i[0].goal)));
    CHECK(pred_equal(qpred_to_pred(both[1].goal), qpred_to_pred(only_j[0].goal)));

    // disjunction splits the same way
    auto disj = diff_induct(por(i, j), evo);
    REQUIRE(disj.size() == 2);
}
