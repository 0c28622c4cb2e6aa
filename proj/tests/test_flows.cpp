#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace odecert;
using testutil::Gen;

namespace {

Subst field_of(const std::string& vars_decl, const std::string& odes,
               std::vector<std::string>* frame_out = nullptr) {
    Problem prob = parse_problem("problem p { constants { k: real; w: real; a0: real; } "
                                 "variables { " + vars_decl + " } def dyn = { " + odes + " }; }");
    const EvolutionCmd& evo = prob.prog_defs.at("dyn")->evo;
    if (frame_out) *frame_out = evo.frame;
    return evo.field;
}

Subst flow_of(const std::string& vars, const std::string& text) {
    std::set<std::string> states;
    std::string cur;
    for (char c : vars + " ") {
        if (isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) states.insert(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return parse_flow_text(text, make_flow_scope(states, {"k", "w", "a0", "a", "b"}));
}

}  // namespace

TEST_CASE("certifying the three-component polynomial system") {
    std::vector<std::string> frame;
    Subst field = field_of("x; y; z;", "x' = t, y' = x, z' = 1", &frame);
    FlowCandidate cand{frame,
                       flow_of("x y z", "[x ~> t^2/2 + $x, y ~> t^3/6 + $x*t + $y, z ~> $z + t]"),
                       TimeDomain::AllReals};
    CertReport report = certify_flow(cand, field);
    CHECK(report.flow_certified());
    for (const auto& c : report.components) CHECK(c.ok);
    CHECK(report.initial_condition == EqStatus::Equal);
}

TEST_CASE("a wrong candidate fails on its component identity") {
    std::vector<std::string> frame;
    Subst field = field_of("x; y; z;", "x' = t, y' = x, z' = 1", &frame);
    FlowCandidate cand{frame,
                       flow_of("x y z", "[x ~> t^2/2 + $x, y ~> t^3/5 + $x*t + $y, z ~> $z + t]"),
                       TimeDomain::AllReals};
    CertReport report = certify_solution(cand, field);
    CHECK_FALSE(report.solution_certified());
    CHECK(report.components[0].ok);
    CHECK(report.components[1].identity == EqStatus::NotEqual);
}

TEST_CASE("constant solutions certify with no provisos") {
    std::vector<std::string> frame;
    Subst field = field_of("x;", "x' = 0", &frame);
    FlowCandidate cand{frame, flow_of("x", "[x ~> $x]"), TimeDomain::AllReals};
    CertReport report = certify_flow(cand, field);
    CHECK(report.flow_certified());
    CHECK(report.components[0].provisos.empty());
}

TEST_CASE("the decay flow certifies") {
    std::vector<std::string> frame;
    Subst field = field_of("g;", "g' = -g", &frame);
    FlowCandidate cand{frame, flow_of("g", "[g ~> $g*exp(-t)]"), TimeDomain::AllReals};
    CHECK(certify_flow(cand, field).flow_certified());
}

TEST_CASE("shifted candidates fail the initial condition") {
    std::vector<std::string> frame;
    Subst field = field_of("x;", "x' = 1", &frame);
    FlowCandidate cand{frame, flow_of("x", "[x ~> $x + 1]"), TimeDomain::AllReals};
    CertReport report = certify_flow(cand, field);
    CHECK_FALSE(report.flow_certified());
    CHECK(report.initial_condition == EqStatus::NotEqual);
}

TEST_CASE("C1 certification of smooth fields") {
    std::vector<std::string> frame;
    CHECK(c1_lipschitz_check(field_of("x;", "x' = 1 - x", &frame), {"x"}).certified);
    // a variable outside the frame acts as a frozen parameter
    CHECK(c1_lipschitz_check(field_of("x; y;", "x' = -y*x", &frame), {"x"}).certified);
    CHECK(c1_lipschitz_check(field_of("x; y; z;", "x' = y, y' = z", &frame), {"x", "y"}).certified);
    // square roots break C1 certification
    auto bad = c1_lipschitz_check(field_of("x;", "x' = sqrt(x)", &frame), {"x"});
    CHECK_FALSE(bad.certified);
    CHECK_FALSE(bad.reason.empty());
    // divisions need globally nonzero denominators
    CHECK(c1_lipschitz_check(field_of("x;", "x' = x/(1 + x^2)", &frame), {"x"}).certified);
    CHECK_FALSE(c1_lipschitz_check(field_of("x;", "x' = 1/x", &frame), {"x"}).certified);
}

TEST_CASE("the double integrator flow certifies") {
    std::vector<std::string> frame;
    Subst field = field_of("x; y; z;", "x' = y, y' = z", &frame);
    FlowCandidate cand{frame, flow_of("x y z", "[x ~> $z*t^2/2 + $y*t + $x, y ~> $z*t + $y]"),
                       TimeDomain::AllReals};
    CHECK(certify_flow(cand, field).flow_certified());
}

TEST_CASE("the logistic-approach flow certifies") {
    std::vector<std::string> frame;
    Subst field = field_of("x;", "x' = -x + 1", &frame);
    FlowCandidate cand{frame, flow_of("x", "[x ~> 1 - exp(-t) + $x*exp(-t)]"),
                       TimeDomain::AllReals};
    CHECK(certify_flow(cand, field).flow_certified());
}

TEST_CASE("rk4 matches closed forms") {
    // exponential decay
    std::vector<std::string> frame;
    Subst decay = field_of("g;", "g' = -g", &frame);
    DEnv init;
    init.vars["g"] = 1.0;
    DEnv out = rk4_final(decay, {"g"}, init, 1.0, 1000);
    CHECK(testutil::approx_rel(out.vars["g"], std::exp(-1.0), 1e-9));

    // constant slope is exact up to rounding
    Subst one = field_of("x;", "x' = 1", &frame);
    DEnv init2;
    init2.vars["x"] = 0.0;
    CHECK(rk4_final(one, {"x"}, init2, 5.0, 100).vars["x"] == Catch::Approx(5.0).margin(1e-12));

    // rotation through a quarter turn
    Subst rot = field_of("d1; d2;", "d1' = -w*d2, d2' = w*d1", &frame);
    DEnv init3;
    init3.vars = {{"d1", 1.0}, {"d2", 0.0}, {"w", 1.0}};
    DEnv out3 = rk4_final(rot, {"d1", "d2"}, init3, M_PI / 2, 2000);
    CHECK(std::fabs(out3.vars["d1"] - 0.0) < 1e-6);
    CHECK(std::fabs(out3.vars["d2"] - 1.0) < 1e-6);
}

TEST_CASE("certified flows satisfy the monoid action laws numerically") {
    std::vector<std::string> frame;
    Subst field = field_of("m; v; y; g;", "m' = -k, v' = m, y' = v, g' = -g", &frame);
    SolveResult res = solve_sode(field, frame);
    REQUIRE(res.flow);

    Gen gen(61);
    for (int i = 0; i < 100; ++i) {
        DEnv s = gen.denv({"m", "v", "y", "g", "k"}, -3, 3);
        double t1 = gen.real(0, 2), t2 = gen.real(0, 2);
        // phi(0, s) = s
        for (const auto& [x, body] : res.flow->body.entries()) {
            DEnv at0 = s;
            at0.time = 0.0;
            CHECK(testutil::approx_rel(eval_double(body, at0), s.vars.at(x), 1e-9));
        }
        // phi(t1 + t2, s) = phi(t1, phi(t2, s))
        DEnv at_t2 = s;
        at_t2.time = t2;
        DEnv mid = s;
        for (const auto& [x, body] : res.flow->body.entries())
            mid.vars[x] = eval_double(body, at_t2);
        mid.time = t1;
        DEnv sum = s;
        sum.time = t1 + t2;
        for (const auto& [x, body] : res.flow->body.entries()) {
            double direct = eval_double(body, sum);
            double composed = eval_double(body, mid);
            CHECK(testutil::approx_rel(direct, composed, 1e-9));
        }
    }
}

TEST_CASE("certified flows track rk4") {
    std::vector<std::string> frame;
    Subst field = field_of("m; v; y;", "m' = -k, v' = m, y' = v", &frame);
    SolveResult res = solve_sode(field, frame);
    REQUIRE(res.flow);

    Gen gen(67);
    for (int i = 0; i < 50; ++i) {
        DEnv init = gen.denv({"m", "v", "y", "k"}, -3, 3);
        init.time = 0.0;
        Trajectory traj = rk4_integrate(field, frame, init, 2.0, 2000);
        for (int step = 100; step <= 2000; step += 100) {
            double t = traj.times[step];
            DEnv at = init;
            at.time = t;
            for (const auto& x : frame) {
                double flowed = eval_double(res.flow->body.lookup(x), at);
                CHECK(testutil::approx_rel(flowed, traj.states[step].vars.at(x), 1e-6));
            }
        }
    }
}
