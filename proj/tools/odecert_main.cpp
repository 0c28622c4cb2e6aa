// odecert: batch verifier for hybrid programs. Parses problem files, runs
// verification-condition generation and discharge, searches for closed-form
// flows, certifies candidate solutions and exports SMT-LIB scripts.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <odecert/odecert.hpp>

namespace {

using namespace odecert;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t env_seed() {
    const char* s = std::getenv("ODECERT_SEED");
    return s ? std::strtoull(s, nullptr, 10) : 0;
}

const ProgNode* find_evolve_def(const Problem& prob, const std::string& name) {
    auto it = prob.prog_defs.find(name);
    if (it == prob.prog_defs.end())
        throw Error(ErrKind::UndeclaredName, "no definition named '" + name + "'");
    if (it->second->kind != ProgKind::Evolve)
        throw Error(ErrKind::UnsupportedNode, "'" + name + "' is not an evolution command");
    return it->second.get();
}

std::string sanitize(const std::string& label) {
    std::string out;
    for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

int cmd_verify(const std::string& file, bool json, std::uint64_t seed, int samples,
               const std::string& strategy_override, int parallel, bool rewrite_pack) {
    Problem prob = parse_problem(read_file(file));
    VerifyOptions opts;
    opts.sampler.seed = seed;
    opts.sampler.samples = samples;
    opts.sampler.rewrite_pack = rewrite_pack;
    opts.parallel = parallel;
    opts.strategy_override = strategy_override;
    ProblemReport report = verify_problem(prob, opts);
    if (json) {
        std::cout << report_to_json(report).dump(2) << "\n";
    } else {
        std::cout << report_to_text(report);
    }
    return report.exit_code;
}

int cmd_find_flow(const std::string& file, const std::string& def, const std::string& backend) {
    Problem prob = parse_problem(read_file(file));
    const ProgNode* node = find_evolve_def(prob, def);
    const EvolutionCmd& evo = node->evo;

    if (backend == "print-request") {
        std::vector<std::pair<std::string, IRExpr>> field_ir;
        for (const auto& x : evo.frame) field_ir.emplace_back(x, to_ir(evo.field.lookup(x)));
        std::set<std::string> avoid(prob.param_names.begin(), prob.param_names.end());
        CASRequest req = ir_to_cas_request(field_ir, evo.frame, avoid);
        std::cout << req.text << "\n";
        for (const auto& [src, wire] : req.mapping)
            std::cout << "# " << src << " -> " << wire << "\n";
        auto recasts = recast_higher_order(evo.field, evo.frame);
        for (const auto& r : recasts) {
            std::string primes(r.order, '\'');
            std::cout << "# higher-order form: " << r.var << primes << " = " << to_string(r.rhs)
                      << "\n";
        }
        return 0;
    }

    if (backend == "wolfram") {
        std::vector<std::pair<std::string, IRExpr>> field_ir;
        for (const auto& x : evo.frame) field_ir.emplace_back(x, to_ir(evo.field.lookup(x)));
        std::set<std::string> avoid(prob.param_names.begin(), prob.param_names.end());
        CASRequest req = ir_to_cas_request(field_ir, evo.frame, avoid);
        std::cerr << "request: " << req.text << "\n";
        auto reply = run_wolframscript(req.text);
        if (!reply) {
            std::cerr << "error: CAS unavailable (set ODECERT_WOLFRAMSCRIPT)\n";
            return 3;
        }
        std::set<std::string> params(prob.param_names.begin(), prob.param_names.end());
        FlowCandidate cand = parse_cas_solution(*reply, req.mapping, evo.frame, params);
        CertReport cert = certify_flow(cand, evo.field, prob.assumption_preds());
        if (!cert.flow_certified()) {
            std::cerr << "error: CAS suggestion failed certification\n";
            return 2;
        }
        std::cout << "using flow " << to_string(cand) << "\n";
        return 0;
    }

    SolveResult res = solve_sode(evo.field, evo.frame, prob.assumption_preds());
    if (!res.flow) {
        std::cerr << "no solution found:\n" << res.trace.text();
        return 2;
    }
    std::cout << "using flow " << to_string(*res.flow) << "\n";
    return 0;
}

int cmd_certify(const std::string& file, const std::string& def, const std::string& flow_text) {
    Problem prob = parse_problem(read_file(file));
    const ProgNode* node = find_evolve_def(prob, def);
    const EvolutionCmd& evo = node->evo;

    std::set<std::string> states(prob.state_vars.begin(), prob.state_vars.end());
    std::set<std::string> params(prob.param_names.begin(), prob.param_names.end());
    Subst body = parse_flow_text(flow_text, make_flow_scope(states, params));

    FlowCandidate cand;
    cand.frame = evo.frame;
    cand.body = body;
    for (const auto& x : evo.frame)
        if (!body.contains(x))
            throw Error(ErrKind::NonMatchingFrames, "flow misses component '" + x + "'");
    for (const auto& [k, v] : body.entries())
        if (std::find(evo.frame.begin(), evo.frame.end(), k) == evo.frame.end())
            throw Error(ErrKind::NonMatchingFrames, "'" + k + "' is not in the frame");

    CertReport report = certify_flow(cand, evo.field, prob.assumption_preds());
    for (const auto& c : report.components) {
        std::cout << c.var << "': ";
        switch (c.identity) {
            case EqStatus::Equal: std::cout << "ok"; break;
            case EqStatus::NotEqual: std::cout << "IDENTITY FAILED"; break;
            case EqStatus::Unknown:
                std::cout << (c.ok ? "ok (side conditions entailed)" : "open");
                break;
        }
        std::cout << "\n    derivative " << to_string(simplify(c.computed_derivative), true)
                  << "\n    field      " << to_string(simplify(c.expected), true) << "\n";
        for (size_t i = 0; i < c.provisos.size(); ++i) {
            std::cout << "    proviso    " << to_string(c.provisos[i].condition)
                      << (c.proviso_entailed[i] ? "" : "  [open]") << "\n";
        }
        for (const auto& sc : c.open_conds)
            std::cout << "    condition  " << to_string(sc.divisor, true) << " != 0  [open]\n";
    }
    std::cout << "initial condition: "
              << (report.initial_condition == EqStatus::Equal ? "ok" : "FAILED") << "\n";
    std::cout << "lipschitz (C1): "
              << (report.lipschitz.certified ? "ok" : "FAILED " + report.lipschitz.reason) << "\n";

    bool identities_ok = !report.components.empty();
    bool open = report.has_open_provisos() || !report.lipschitz.certified;
    for (const auto& c : report.components) {
        identities_ok = identities_ok && c.identity_holds_conditionally();
        open = open || !c.open_conds.empty() ||
               (c.identity_conditional && c.identity != EqStatus::Equal);
    }
    if (!identities_ok || report.initial_condition != EqStatus::Equal) {
        std::cout << "not certified\n";
        return 1;
    }
    if (open) {
        std::cout << "certified with open provisos\n";
        return 2;
    }
    std::cout << "certified\n";
    return 0;
}

int cmd_export_smt(const std::string& file, const std::string& goal_name,
                   const std::string& out_dir) {
    Problem prob = parse_problem(read_file(file));
    const Goal* goal = nullptr;
    for (const auto& g : prob.goals)
        if (g.name == goal_name) goal = &g;
    if (!goal) throw Error(ErrKind::UndeclaredName, "no goal named '" + goal_name + "'");

    auto vcs = hoare_vcs(*goal, prob);
    if (vcs.empty()) {
        std::cout << "warning: goal '" << goal_name << "' generated no conditions\n";
        return 0;
    }
    std::filesystem::create_directories(out_dir);
    int written = 0;
    for (const auto& vc : vcs) {
        if (!vc_polynomial(vc)) {
            std::cout << "skipped (transcendental): " << vc.label << "\n";
            continue;
        }
        std::string path = out_dir + "/" + sanitize(vc.label) + ".smt2";
        std::ofstream out(path);
        if (!out) throw Error(ErrKind::Internal, "cannot write '" + path + "'");
        out << export_smtlib(vc);
        std::cout << "wrote " << path << "\n";
        ++written;
    }
    if (written == 0) std::cout << "warning: no polynomial conditions to export\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"odecert: verification toolkit for hybrid programs"};
    app.require_subcommand(1);

    std::string file, def, flow_text, goal_name, out_dir = "smt-out";
    std::string backend = "builtin", strategy_override;
    bool json = false, rewrite_pack = false;
    std::uint64_t seed = env_seed();
    int samples = 1000, parallel = 1;

    auto* verify = app.add_subcommand("verify", "verify every goal in a problem file");
    verify->add_option("file", file)->required();
    verify->add_flag("--json", json, "emit the JSON report");
    verify->add_option("--seed", seed, "sampler seed");
    verify->add_option("--samples", samples, "falsification sample count");
    verify->add_option("--strategy-override", strategy_override, "dinduct | solve");
    verify->add_option("--parallel", parallel, "discharge worker count");
    verify->add_flag("--rewrite-pack", rewrite_pack,
                     "enable the sin^2+cos^2 and exp-product rewrites");

    auto* find_flow = app.add_subcommand("find-flow", "suggest a flow for an ODE definition");
    find_flow->add_option("file", file)->required();
    find_flow->add_option("--def", def, "evolution definition name")->required();
    find_flow->add_option("--backend", backend, "builtin | wolfram | print-request");

    auto* certify = app.add_subcommand("certify", "certify a candidate flow");
    certify->add_option("file", file)->required();
    certify->add_option("--def", def, "evolution definition name")->required();
    certify->add_option("--flow", flow_text, "candidate flow, e.g. [x ~> t + $x]")->required();

    auto* export_smt = app.add_subcommand("export-smt", "export goal conditions as SMT-LIB");
    export_smt->add_option("file", file)->required();
    export_smt->add_option("--goal", goal_name, "goal name")->required();
    export_smt->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify)
            return cmd_verify(file, json, seed, samples, strategy_override, parallel,
                              rewrite_pack);
        if (*find_flow) return cmd_find_flow(file, def, backend);
        if (*certify) return cmd_certify(file, def, flow_text);
        if (*export_smt) return cmd_export_smt(file, goal_name, out_dir);
    } catch (const odecert::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 3;
}
