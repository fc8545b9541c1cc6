// oscillab command-line front end.
//
// Exit codes: 0 complete, 1 usage error, 2 numerical non-convergence,
// 3 hypothesis failure.

#include "oscillab.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace oscillab;

namespace {

enum Exit { ok = 0, usage = 1, nonconvergence = 2, hypothesis = 3 };

struct Cli
{
    ExperimentConfig cfg;
    std::vector<double> cutoff{1.0, 2.0};
    std::string shape = "product";
    bool out_given = false;

    // subcommand options
    std::string rlct_method = "auto";
    std::vector<double> taus;
    std::string input;
    std::optional<double> probe_alpha;
    int probe_k = 0;
    std::string strategy = "automatic";
};

void finish_config(Cli& cli)
{
    if (cli.cutoff.size() != 2) throw ConfigError("cutoff: expected two radii a,b");
    cli.cfg.cutoff_a = cli.cutoff[0];
    cli.cfg.cutoff_b = cli.cutoff[1];
    cli.cfg.shape = parse_shape(cli.shape);
}

Polynomial phase_of(const ExperimentConfig& c)
{
    c.validate(true);
    return parse(c.phase, c.resolved_dimension());
}

/// Writes to --out when given, stdout otherwise.
void emit(const Cli& cli, const std::string& stem, const Json& json, const std::string& md,
          const std::vector<std::pair<std::string, std::vector<OscillatorySample>>>& tables = {})
{
    const auto& fmt = cli.cfg.format;
    if (fmt == "csv" && tables.empty()) throw ConfigError("format: csv needs sample tables; use json or md");
    if (cli.out_given) {
        for (const auto& path : export_report(json, md, tables, fmt, cli.cfg.out_dir, stem)) std::cerr << "wrote " << path << "\n";
        return;
    }
    if (fmt == "json")
        std::cout << json.dump(2) << "\n";
    else if (fmt == "md")
        std::cout << md;
    else
        for (const auto& [name, samples] : tables) {
            if (tables.size() > 1) std::cout << "# " << name << "\n";
            write_samples_csv(std::cout, samples);
        }
}

Json envelope(const std::string& kind, const Cli& cli)
{
    return Json{{"kind", kind},
                {"version", version()},
                {"config", to_json(cli.cfg)},
                {"tolerances", tolerances_json(cli.cfg, {}, nondegeneracy_options(cli.cfg))}};
}

int cmd_polytope(const Cli& cli)
{
    const auto f = phase_of(cli.cfg);
    const auto p = build_polytope(f);
    const auto conv = is_convenient(p);
    auto j = envelope("polytope", cli);
    j["phase"] = f.to_string();
    j["polytope"] = to_json(p);
    j["convenient"] = conv.convenient;
    std::ostringstream md;
    md << "# polytope: " << f.to_string() << "\n\n";
    md << "- generators: " << p.generators().size() << ", facets: " << p.facets().size() << "\n";
    md << "- convenient: " << (conv.convenient ? "yes" : "no") << "\n";
    if (conv.convenient) {
        const auto nd = newton_distance(p);
        j["newton_distance"] = io::rational_to_json(nd.t0);
        md << "- Newton distance t0 = " << to_string(nd.t0) << "\n";
        const auto opts = nondegeneracy_options(cli.cfg);
        const auto vr = check_R_nondegenerate(f, opts);
        const auto vc = check_C_nondegenerate(f, opts);
        j["nondegeneracy_real"] = to_json(vr);
        j["nondegeneracy_complex"] = to_json(vc);
        md << "- over R: " << to_string(vr.status) << "\n- over C: " << to_string(vc.status) << "\n";
    }
    emit(cli, "polytope", j, md.str());
    return ok;
}

int cmd_rlct(const Cli& cli)
{
    if (!cli.input.empty()) {
        const auto data = resolution_from_json(read_json_file(cli.input));
        const int n = cli.cfg.resolved_dimension();
        const auto r = rlct_from_resolution(data, n);
        auto j = envelope("rlct", cli);
        j["resolution"] = to_json(data);
        j["rlct"] = to_json(r);
        std::ostringstream md;
        md << "# rlct from resolution data\n\n- value " << to_string(r.value) << " (resolution, " << data.size()
           << " components)\n";
        emit(cli, "rlct", j, md.str());
        return ok;
    }
    const auto f = phase_of(cli.cfg);
    const auto opts = nondegeneracy_options(cli.cfg);
    std::string method = cli.rlct_method;
    if (method == "auto") method = f.homogeneous_degree() ? "homogeneous" : "candidate";
    RlctReport r;
    if (method == "homogeneous")
        r = rlct_homogeneous(f, opts);
    else if (method == "candidate")
        r = rlct_newton_candidate(f, opts);
    else if (method == "charts")
        r = rlct_from_resolution(resolution_from_charts(blowup_charts(f)), f.dimension());
    else
        throw ConfigError("method: one of auto, homogeneous, candidate, charts");
    auto j = envelope("rlct", cli);
    j["phase"] = f.to_string();
    j["rlct"] = to_json(r);
    std::ostringstream md;
    md << "# rlct: " << f.to_string() << "\n\n- value " << to_string(r.value) << " (" << to_string(r.method)
       << (r.candidate_only ? ", candidate" : "") << ")\n";
    emit(cli, "rlct", j, md.str());
    return ok;
}

EvalStrategy parse_strategy(const std::string& s)
{
    if (s == "automatic") return EvalStrategy::automatic;
    if (s == "separable") return EvalStrategy::separable;
    if (s == "tensor") return EvalStrategy::tensor;
    throw ConfigError("strategy: one of automatic, separable, tensor");
}

std::vector<OscillatorySample> sample_from_config(const Cli& cli, const std::vector<double>& grid)
{
    const auto f = phase_of(cli.cfg);
    const TestFunction phi(cli.cfg.resolved_nu(), cli.cfg.cutoff(), cli.cfg.shape);
    OscillatoryOptions opts;
    opts.strategy = parse_strategy(cli.strategy);
    return sample_series(f, phi, grid, cli.cfg.tol, opts);
}

std::string samples_markdown(const std::string& title, const std::vector<OscillatorySample>& s)
{
    std::ostringstream md;
    md << "# " << title << "\n\n| tau | re | im | abs | err | converged |\n|---|---|---|---|---|---|\n";
    for (const auto& x : s)
        md << "| " << num_text(x.tau) << " | " << num_text(x.value.real()) << " | " << num_text(x.value.imag()) << " | "
           << num_text(std::abs(x.value)) << " | " << num_text(x.error) << " | " << (x.converged ? "yes" : "no") << " |\n";
    return md.str();
}

int cmd_oscillate(const Cli& cli)
{
    cli.cfg.validate(true);
    const auto grid = cli.taus.empty() ? geometric_grid(cli.cfg.tau_min, cli.cfg.tau_max, cli.cfg.tau_count) : cli.taus;
    const auto samples = sample_from_config(cli, grid);
    auto j = envelope("oscillate", cli);
    j["samples"] = to_json(samples);
    emit(cli, "oscillate", j, samples_markdown("oscillate: " + cli.cfg.phase, samples), {{"", samples}});
    return all_converged(samples) ? ok : nonconvergence;
}

std::vector<OscillatorySample> load_samples(const std::string& path)
{
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        std::ifstream is(path);
        if (!is) throw ConfigError("input: cannot open '" + path + "'");
        return read_samples_csv(is);
    }
    const Json j = read_json_file(path);
    return samples_from_json(j.contains("samples") ? j.at("samples") : j);
}

int cmd_fit(const Cli& cli)
{
    cli.cfg.validate(!cli.input.empty() ? false : true);
    const auto samples = cli.input.empty()
                             ? sample_from_config(cli, geometric_grid(cli.cfg.tau_min, cli.cfg.tau_max, cli.cfg.tau_count))
                             : load_samples(cli.input);
    FitOptions fo;
    const int n = cli.cfg.resolved_dimension();
    if (n > 1) fo.max_log_power = n - 1;
    const auto est = fit_leading(samples, fo);
    auto j = envelope("fit", cli);
    j["input"] = cli.input;
    j["estimate"] = to_json(est);
    std::ostringstream md;
    md << "# fit\n\n- outcome " << to_string(est.outcome) << "\n- alpha_hat " << num_text(est.alpha_hat) << ", k_hat "
       << est.k_hat << "\n- C_hat [" << num_text(est.coeff_hat.real()) << ", " << num_text(est.coeff_hat.imag())
       << "]\n- residual " << num_text(est.residual) << ", noise floor " << num_text(est.noise_floor) << "\n";
    if (cli.probe_alpha) {
        const auto p = coefficient_at(samples, *cli.probe_alpha, cli.probe_k);
        j["probe"] = to_json(p);
        md << "- C(" << num_text(p.alpha) << ", k=" << p.k << ") = [" << num_text(p.coeff.real()) << ", "
           << num_text(p.coeff.imag()) << "], consistent with zero: " << (p.consistent_with_zero ? "yes" : "no") << "\n";
    }
    j["samples"] = to_json(samples);
    emit(cli, "fit", j, md.str(), {{"", samples}});
    if (!all_converged(samples)) return nonconvergence;
    return est.converged || est.outcome == FitOutcome::consistent_with_zero ? ok : nonconvergence;
}

int cmd_battery(const Cli& cli)
{
    std::vector<BatteryFixture> fixtures;
    if (cli.cfg.phase.empty()) {
        fixtures = default_battery();
    } else {
        cli.cfg.validate(true);
        fixtures.push_back({"custom", cli.cfg.phase, cli.cfg.resolved_dimension(), cli.cfg.resolved_nu(), cli.cfg.shape});
    }
    const auto rep = run_theorem2_battery(fixtures, cli.cfg);
    std::vector<std::pair<std::string, std::vector<OscillatorySample>>> tables;
    for (const auto& row : rep.rows) tables.emplace_back(row.fixture.name, row.samples);
    emit(cli, "theorem2", to_json(rep), markdown_summary(rep), tables);
    for (const auto& row : rep.rows)
        if (!all_converged(row.samples)) return nonconvergence;
    return ok;
}

int cmd_lab(const Cli& cli)
{
    const auto rep = run_theorem3_lab(cli.cfg);
    emit(cli, "theorem3", to_json(rep), markdown_summary(rep), {{"generic", rep.generic_samples}, {"chi", rep.chi_samples}});
    return rep.all_converged ? ok : nonconvergence;
}

int cmd_report(Cli& cli)
{
    if (cli.input.empty()) throw ConfigError("input: report needs --input <report.json>");
    const Json j = read_json_file(cli.input);
    const auto kind = j.value("kind", std::string());
    if (kind == "theorem3-lab") {
        const auto r = theorem3_from_json(j);
        emit(cli, "theorem3", to_json(r), markdown_summary(r), {{"generic", r.generic_samples}, {"chi", r.chi_samples}});
    } else if (kind == "theorem2-battery") {
        const auto r = battery_from_json(j);
        std::vector<std::pair<std::string, std::vector<OscillatorySample>>> tables;
        for (const auto& row : r.rows) tables.emplace_back(row.fixture.name, row.samples);
        emit(cli, "theorem2", to_json(r), markdown_summary(r), tables);
    } else if (j.contains("samples")) {
        const auto s = samples_from_json(j.at("samples"));
        emit(cli, kind.empty() ? "samples" : kind, j, samples_markdown(kind, s), {{"", s}});
    } else {
        if (cli.cfg.format != "json") throw ConfigError("format: report kind '" + kind + "' only renders as json");
        emit(cli, kind.empty() ? "report" : kind, j, "");
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    Cli cli;
    CLI::App app{"Oscillatory integrals, Newton polytopes and real log canonical thresholds"};
    app.set_version_flag("--version", std::string(version()));
    app.set_config("--config", "", "Key-value config file mirroring the flags; flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    auto& c = cli.cfg;
    app.add_option("--phase", c.phase, "Phase polynomial, e.g. \"x1^4 + x2^4\"");
    app.add_option("--dim", c.dimension, "Dimension n (inferred from the phase when omitted)")->check(CLI::NonNegativeNumber);
    app.add_option("--nu", c.nu, "Monomial exponents of the test function")->delimiter(',');
    app.add_option("--cutoff", cli.cutoff, "Cutoff plateau and support radii a,b")->delimiter(',')->expected(2);
    app.add_option("--shape", cli.shape, "Cutoff shape")->check(CLI::IsMember({"product", "radial"}));
    app.add_option("--tau-min", c.tau_min, "Smallest tau of the grid");
    app.add_option("--tau-max", c.tau_max, "Largest tau of the grid");
    app.add_option("--tau-count", c.tau_count, "Number of geometric grid points");
    app.add_option("--tol", c.tol, "Quadrature tolerance");
    app.add_option("--seed", c.seed, "Seed for randomized searches");
    app.add_option("--out", c.out_dir, "Output directory (stdout when omitted)");
    app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "md"}));

    auto* polytope = app.add_subcommand("polytope", "Newton polytope, convenience and nondegeneracy");
    auto* rlct = app.add_subcommand("rlct", "Real log canonical threshold");
    rlct->add_option("--method", cli.rlct_method, "auto, homogeneous, candidate or charts")
        ->check(CLI::IsMember({"auto", "homogeneous", "candidate", "charts"}));
    rlct->add_option("--resolution", cli.input, "JSON array of {m, k} resolution data instead of a phase");
    auto* oscillate = app.add_subcommand("oscillate", "Evaluate I(tau, phi) on a tau grid");
    oscillate->add_option("--tau", cli.taus, "Explicit tau values instead of the grid")->delimiter(',');
    oscillate->add_option("--strategy", cli.strategy, "automatic, separable or tensor")
        ->check(CLI::IsMember({"automatic", "separable", "tensor"}));
    auto* fit = app.add_subcommand("fit", "Fit the leading asymptotic term");
    fit->add_option("--input", cli.input, "Samples as CSV or JSON (computed from --phase when omitted)");
    fit->add_option("--probe-alpha", cli.probe_alpha, "Also estimate the coefficient at this exponent");
    fit->add_option("--probe-k", cli.probe_k, "Log power for --probe-alpha")->check(CLI::NonNegativeNumber);
    fit->add_option("--strategy", cli.strategy, "automatic, separable or tensor")
        ->check(CLI::IsMember({"automatic", "separable", "tensor"}));
    auto* battery = app.add_subcommand("theorem2-battery", "Exponent bound -1/d(f,phi) over a fixture battery");
    auto* lab = app.add_subcommand("theorem3-lab", "Blowup-cutoff laboratory for homogeneous phases");
    lab->add_option("--overlap", c.overlap, "Chart overlap epsilon of the symmetric cutoff");
    lab->add_option("--chart-taus", c.chart_taus, "tau values for chart integrals")->delimiter(',');
    lab->add_option("--chi-tau-min", c.chi_tau_min, "Smallest tau for the symmetric cutoff series");
    lab->add_option("--chi-tau-max", c.chi_tau_max, "Largest tau for the symmetric cutoff series");
    lab->add_option("--chi-tau-count", c.chi_tau_count, "Points in the symmetric cutoff series");
    lab->add_option("--support-sweep", c.support_sweep, "Support radii b of the generic bump sweep")->delimiter(',');
    auto* report = app.add_subcommand("report", "Re-render a saved JSON report");
    report->add_option("--input", cli.input, "Report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }
    cli.out_given = app.count("--out") > 0;

    try {
        finish_config(cli);
        if (*polytope) return cmd_polytope(cli);
        if (*rlct) return cmd_rlct(cli);
        if (*oscillate) return cmd_oscillate(cli);
        if (*fit) return cmd_fit(cli);
        if (*battery) return cmd_battery(cli);
        if (*lab) return cmd_lab(cli);
        if (*report) return cmd_report(cli);
    } catch (const HypothesisFailure& e) {
        std::cerr << "hypothesis failure [" << e.check() << "]: " << e.what() << "\n";
        return hypothesis;
    } catch (const QuadratureBudgetExceeded& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return nonconvergence;
    } catch (const ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
