#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;

namespace {

ExprScope scope_d() {
    ExprScope s;
    s.state = {"g", "x", "y"};
    // binder variables occur in goals as parameters (wlp substitutes the
    // flow bodies, so no raw time variable remains)
    s.params = {"g_m", "g_M", "k", "m0", "t", "tau"};
    return s;
}

Pred parse_p(const std::string& text) { return parse_pred_text(text, scope_d()); }

VC make_vc(const std::string& label, std::vector<Pred> context, QPred goal,
           std::vector<Binder> binders = {}) {
    VC vc;
    vc.label = label;
    vc.context = std::move(context);
    vc.binders = std::move(binders);
    vc.goal = std::move(goal);
    return vc;
}

}  // namespace

TEST_CASE("reflexive inequalities and literal facts prove directly") {
    auto r1 = discharge_vc(make_vc("refl", {}, qleaf(parse_p("-g >= -g"))));
    CHECK(r1.status == DischargeStatus::Proved);

    auto r2 = discharge_vc(make_vc("lit", {}, qleaf(parse_p("0 <= 1"))));
    CHECK(r2.status == DischargeStatus::Proved);

    auto r3 = discharge_vc(make_vc("lit2", {}, qleaf(parse_p("1 <= 2"))));
    CHECK(r3.status == DischargeStatus::Proved);
}

TEST_CASE("unprovable goals without context are refuted with a checkable env") {
    VC vc = make_vc("xge1", {}, qleaf(parse_p("x >= 1")));
    auto r = discharge_vc(vc);
    REQUIRE(r.status == DischargeStatus::Refuted);
    REQUIRE(r.counterexample.count("x"));
    DEnv env;
    for (const auto& [k, v] : r.counterexample) env.vars[k] = v;
    CHECK_FALSE(eval_pred(parse_p("x >= 1"), env));
}

TEST_CASE("transitive chains through the context") {
    // g_M >= 0 from g_M > g_m and g_m > 0
    auto r = discharge_vc(
        make_vc("chain", {parse_p("g_M > g_m"), parse_p("g_m > 0")}, qleaf(parse_p("g_M >= 0"))));
    CHECK(r.status == DischargeStatus::Proved);
}

TEST_CASE("exponentials are positive") {
    // forall t >= 0: g*exp(-t) >= 0 under g >= 0
    Binder t;
    t.name = "t";
    t.kind = BoundKind::NonNeg;
    VC vc = make_vc("decay", {parse_p("g >= 0")}, qleaf(parse_p("g*exp(-t) >= 0")), {t});
    auto r = discharge_vc(vc);
    CHECK(r.status == DischargeStatus::Proved);
    CHECK(r.method == ProofMethod::IntervalFact);

    // ... but g*exp(-t) >= 1 is falsifiable under the same context
    VC bad = make_vc("decay-bad", {parse_p("g >= 0")}, qleaf(parse_p("g*exp(-t) >= 1")), {t});
    auto rb = discharge_vc(bad);
    REQUIRE(rb.status == DischargeStatus::Refuted);
    CHECK(rb.counterexample.count("g"));
    CHECK(rb.counterexample.count("t"));
}

TEST_CASE("equalities discharge through the polynomial identity route") {
    auto r = discharge_vc(make_vc("poly", {}, qleaf(parse_p("(x + y)^2 = x^2 + 2*x*y + y^2"))));
    CHECK(r.status == DischargeStatus::Proved);
    CHECK(r.method == ProofMethod::PolyIdentity);
}

TEST_CASE("case splits over complementary guards") {
    // g >= 0 -> (g <= g_m & g_M >= 0) | (g > g_m & g >= 0)
    QPred goal = qimplies(
        qleaf(parse_p("g >= 0")),
        qor(qleaf(parse_p("g <= g_m & g_M >= 0")), qleaf(parse_p("g > g_m & g >= 0"))));
    VC vc = make_vc("cases", {parse_p("g_m > 0"), parse_p("g_M > g_m")}, goal);
    CHECK(discharge_vc(vc).status == DischargeStatus::Proved);
}

TEST_CASE("existentials try canonical witnesses but never refute by search") {
    Binder t;
    t.name = "t";
    t.kind = BoundKind::NonNeg;
    t.forall = false;

    // exists t >= 0 with the bound instantiated at zero
    QPred ex = qquant(QKind::Exists, t, qleaf(parse_p("g*exp(-t) >= g")));
    auto r = discharge_vc(make_vc("exist0", {parse_p("g >= 0")}, ex));
    CHECK(r.status == DischargeStatus::Proved);

    // a witness-free existential that the grid cannot reach stays unknown,
    // never refuted by search failure
    QPred never = qquant(QKind::Exists, t, qleaf(parse_p("exp(t) = 0")));
    auto r2 = discharge_vc(make_vc("exist-none", {}, never));
    CHECK(r2.status == DischargeStatus::Unknown);
}

TEST_CASE("sampler rejection honours the context and reports exhaustion") {
    // a satisfiable context entirely outside the sampling range
    VC vc = make_vc("exhaust", {parse_p("x > 100")}, qleaf(parse_p("x = 101")));
    SamplerConfig cfg;
    cfg.samples = 50;
    auto r = discharge_vc(vc, cfg);
    CHECK(r.status == DischargeStatus::Unknown);
    CHECK(r.reason.find("exhausted") != std::string::npos);
}

TEST_CASE("rocket witness validation under its context") {
    Problem prob = parse_problem(testutil::read_problem("rocket.hprog"));
    const Goal* liftoff = nullptr;
    for (const auto& g : prob.goals)
        if (g.name == "liftoff") liftoff = &g;
    REQUIRE(liftoff);
    auto vcs = hoare_vcs(*liftoff, prob);
    REQUIRE(vcs.size() == 1);

    SamplerConfig cfg;
    cfg.samples = 2000;
    cfg.seed = 11;
    auto cex = falsify(vcs[0], cfg);
    CHECK_FALSE(cex.has_value());
}

TEST_CASE("determinism: identical seeds give identical outcomes") {
    VC vc = make_vc("det", {parse_p("g >= 0")}, qleaf(parse_p("g - 1 >= 0")));
    SamplerConfig cfg;
    cfg.seed = 77;
    auto r1 = discharge_vc(vc, cfg);
    auto r2 = discharge_vc(vc, cfg);
    REQUIRE(r1.status == DischargeStatus::Refuted);
    CHECK(r1.counterexample == r2.counterexample);
}

TEST_CASE("proved conditions survive post-hoc sampling") {
    std::vector<VC> proved = {
        make_vc("a", {parse_p("g_M > g_m"), parse_p("g_m > 0")}, qleaf(parse_p("g_M >= 0"))),
        make_vc("b", {}, qleaf(parse_p("x^2 >= 0"))),
        make_vc("c", {parse_p("g >= 0")}, qleaf(parse_p("g*exp(-t) >= 0")),
                {Binder{"t", BoundKind::NonNeg, nullptr, nullptr, true}}),
    };
    SamplerConfig cfg;
    cfg.seed = 3;
    for (const auto& vc : proved) {
        REQUIRE(discharge_vc(vc, cfg).status == DischargeStatus::Proved);
        CHECK(posthoc_violations(vc, cfg, 10000) == 0);
    }
}

TEST_CASE("smt export") {
    VC vc = make_vc("lit", {}, qleaf(parse_p("0 <= 1")));
    std::string script = export_smtlib(vc);
    CHECK(script.find("(set-logic NRA)") != std::string::npos);
    CHECK(script.find("(assert (not (<= 0.0 1.0)))") != std::string::npos);
    CHECK(script.find("(check-sat)") != std::string::npos);

    VC chain = make_vc("chain", {parse_p("g_M > g_m")}, qleaf(parse_p("1 <= 2")));
    std::string s2 = export_smtlib(chain);
    CHECK(s2.find("(declare-const g_M Real)") != std::string::npos);
    CHECK(s2.find("(assert (> g_M g_m))") != std::string::npos);

    // transcendental atoms cannot be exported
    VC trans = make_vc("trans", {}, qleaf(parse_p("exp(-t) > 0")));
    CHECK_THROWS_AS(export_smtlib(trans), Error);
    CHECK_FALSE(vc_polynomial(trans));

    // binders become bounded constants in the negation
    Binder t{"t", BoundKind::NonNeg, nullptr, nullptr, true};
    VC bnd = make_vc("bnd", {parse_p("x >= 0")}, qleaf(parse_p("x + t >= 0")), {t});
    std::string s3 = export_smtlib(bnd);
    CHECK(s3.find("(declare-const t Real)") != std::string::npos);
    CHECK(s3.find("(assert (>= t 0.0))") != std::string::npos);
}

TEST_CASE("simulate: unit semantics") {
    FlowTable flows;
    SamplerConfig cfg;
    cfg.samples = 20;
    DEnv s;
    s.vars = {{"x", 3.0}};

    auto skip_finals = simulate(prog_skip(), s, flows, cfg);
    REQUIRE(skip_finals.size() == 20);
    for (const auto& f : skip_finals) CHECK(f.vars.at("x") == 3.0);

    auto dead = simulate(prog_test(pfalse()), s, flows, cfg);
    CHECK(dead.empty());

    auto aborted = simulate(prog_abort(), s, flows, cfg);
    CHECK(aborted.empty());
}

TEST_CASE("simulate: one controller iteration keeps glucose nonnegative") {
    Problem prob = parse_problem(testutil::read_problem("blood_sugar.hprog"));
    FlowTable flows;
    auto vcs = hoare_vcs(prob.goals[0], prob, &flows);  // registers the certified flow
    REQUIRE_FALSE(flows.empty());

    HProg body = prog_seq(prob.prog_defs.at("ctrl"), prob.prog_defs.at("dyn"));
    SamplerConfig cfg;
    cfg.samples = 300;
    cfg.seed = 21;
    DEnv s;
    s.vars = {{"g", 0.5}, {"g_m", 1.0}, {"g_M", 2.0}};  // g = g_m / 2
    auto finals = simulate(body, s, flows, cfg);
    REQUIRE_FALSE(finals.empty());
    for (const auto& f : finals) CHECK(f.vars.at("g") >= 0.0);
}

TEST_CASE("simulate: choices and loops explore branches") {
    FlowTable flows;
    SamplerConfig cfg;
    cfg.samples = 200;
    cfg.seed = 2;
    DEnv s;
    s.vars = {{"x", 0.0}};

    HProg choice = prog_choice(prog_assign("x", num(1)), prog_assign("x", num(2)));
    auto finals = simulate(choice, s, flows, cfg);
    bool saw1 = false, saw2 = false;
    for (const auto& f : finals) {
        saw1 = saw1 || f.vars.at("x") == 1.0;
        saw2 = saw2 || f.vars.at("x") == 2.0;
    }
    CHECK(saw1);
    CHECK(saw2);

    HProg star = prog_star(prog_assign("x", add(state_var("x"), num(1))));
    auto star_finals = simulate(star, s, flows, cfg);
    std::set<double> seen;
    for (const auto& f : star_finals) seen.insert(f.vars.at("x"));
    CHECK(seen.size() > 3);  // several unrolling depths
}
