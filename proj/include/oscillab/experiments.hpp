#ifndef OSCILLAB_EXPERIMENTS_HPP
#define OSCILLAB_EXPERIMENTS_HPP

/*
 * Experiment drivers: the exponent-bound battery and the blowup-cutoff
 * laboratory, plus their JSON / CSV / markdown reports.
 *
 * The laboratory measures; every claim line gets one of
 * supports / contradicts / indeterminate together with the numbers and the
 * tolerance the verdict was taken at.
 */

#include "oscillab/asymptotic_fit.hpp"
#include "oscillab/cutoff.hpp"
#include "oscillab/json_io.hpp"
#include "oscillab/newton_polytope.hpp"
#include "oscillab/nondegeneracy.hpp"
#include "oscillab/oscillatory.hpp"
#include "oscillab/polynomial.hpp"
#include "oscillab/rlct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef OSCILLAB_VERSION
#define OSCILLAB_VERSION "0.1.0"
#endif

namespace oscillab {

inline const char* version() { return OSCILLAB_VERSION; }

/// Ten significant digits, for human-facing text.
inline std::string num_text(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

class ConfigError : public std::invalid_argument
{
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class HypothesisFailure : public std::runtime_error
{
public:
    HypothesisFailure(std::string check, const std::string& what) : std::runtime_error(what), check_(std::move(check)) {}
    const std::string& check() const { return check_; }

private:
    std::string check_;
};

/// Largest k with x<k> in the text; 0 if none.
inline int infer_dimension(const std::string& text)
{
    static const std::regex var("x([0-9]+)");
    int n = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), var); it != std::sregex_iterator(); ++it)
        n = std::max(n, std::stoi((*it)[1].str()));
    return n;
}

struct ExperimentConfig
{
    std::string phase;
    int dimension = 0; ///< 0: inferred from the phase
    ExponentVector nu;
    double cutoff_a = 1.0, cutoff_b = 2.0;
    CutoffShape shape = CutoffShape::product;
    double tau_min = 1e2, tau_max = 1e4;
    int tau_count = 24;
    double tol = 1e-10;
    std::uint64_t seed = 20240607;
    std::string out_dir = ".";
    std::string format = "json";

    // laboratory
    double overlap = 0.25;
    std::vector<double> chart_taus{1.0, 10.0, 100.0, 1000.0};
    double chi_tau_min = 1e2, chi_tau_max = 1e3;
    int chi_tau_count = 10;
    std::vector<double> support_sweep{2.0, 1.0, 0.5};
    double bound_tolerance = 0.05;
    double exponent_tolerance = 0.05;
    double vanishing_tolerance = 1e-10; ///< relative to the absolute-convention magnitude

    int resolved_dimension() const { return dimension > 0 ? dimension : infer_dimension(phase); }

    ExponentVector resolved_nu() const
    {
        return nu.empty() ? ExponentVector(resolved_dimension(), 0) : nu;
    }

    /// Throws ConfigError naming the offending field.
    void validate(bool need_phase = true) const
    {
        if (need_phase) {
            if (phase.empty()) throw ConfigError("phase: a phase polynomial is required");
            const int n = resolved_dimension();
            if (n < 1) throw ConfigError("dim: cannot infer a dimension from the phase; pass --dim");
            if (dimension > 0 && infer_dimension(phase) > dimension)
                throw ConfigError("phase: uses x" + std::to_string(infer_dimension(phase)) + " but dim is " +
                                  std::to_string(dimension));
            if (!nu.empty() && static_cast<int>(nu.size()) != n)
                throw ConfigError("nu: expected " + std::to_string(n) + " exponents, got " + std::to_string(nu.size()));
            for (int e : nu)
                if (e < 0) throw ConfigError("nu: exponents must be nonnegative");
        }
        if (!(cutoff_a > 0.0) || !(cutoff_b > cutoff_a)) throw ConfigError("cutoff: need 0 < a < b");
        if (!(tau_min >= 1.0) || !(tau_max > tau_min)) throw ConfigError("tau-min/tau-max: need 1 <= tau-min < tau-max");
        if (tau_count < 8) throw ConfigError("tau-count: need at least 8 points");
        if (!(tol > 0.0)) throw ConfigError("tol: must be positive");
        if (format != "json" && format != "csv" && format != "md") throw ConfigError("format: one of json, csv, md");
        if (!(overlap > 0.0) || !(overlap < 0.5)) throw ConfigError("overlap: must lie in (0, 1/2)");
        if (!(chi_tau_min >= 1.0) || !(chi_tau_max > chi_tau_min)) throw ConfigError("chi-tau range: need 1 <= min < max");
        if (chi_tau_count < 8) throw ConfigError("chi-tau-count: need at least 8 points");
        for (double t : chart_taus)
            if (!(t > 0.0)) throw ConfigError("chart-taus: values must be positive");
        for (double b : support_sweep)
            if (!(b > 0.0)) throw ConfigError("support-sweep: radii must be positive");
    }

    CutoffFunction cutoff() const { return CutoffFunction(cutoff_a, cutoff_b); }
};

inline Json to_json(const ExperimentConfig& c)
{
    return Json{{"phase", c.phase},
                {"dim", c.resolved_dimension()},
                {"nu", c.nu.empty() && c.resolved_dimension() > 0 ? c.resolved_nu() : c.nu},
                {"cutoff", Json::array({c.cutoff_a, c.cutoff_b})},
                {"shape", to_string(c.shape)},
                {"tau_min", c.tau_min},
                {"tau_max", c.tau_max},
                {"tau_count", c.tau_count},
                {"tol", c.tol},
                {"seed", c.seed},
                {"format", c.format},
                {"overlap", c.overlap},
                {"chart_taus", c.chart_taus},
                {"chi_tau_min", c.chi_tau_min},
                {"chi_tau_max", c.chi_tau_max},
                {"chi_tau_count", c.chi_tau_count},
                {"support_sweep", c.support_sweep},
                {"bound_tolerance", c.bound_tolerance},
                {"exponent_tolerance", c.exponent_tolerance},
                {"vanishing_tolerance", c.vanishing_tolerance}};
}

inline ExperimentConfig config_from_json(const Json& j)
{
    ExperimentConfig c;
    c.phase = j.at("phase").get<std::string>();
    c.dimension = j.at("dim").get<int>();
    c.nu = j.at("nu").get<ExponentVector>();
    c.cutoff_a = j.at("cutoff")[0].get<double>();
    c.cutoff_b = j.at("cutoff")[1].get<double>();
    c.shape = parse_shape(j.at("shape").get<std::string>());
    c.tau_min = j.at("tau_min").get<double>();
    c.tau_max = j.at("tau_max").get<double>();
    c.tau_count = j.at("tau_count").get<int>();
    c.tol = j.at("tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.format = j.at("format").get<std::string>();
    c.overlap = j.at("overlap").get<double>();
    c.chart_taus = j.at("chart_taus").get<std::vector<double>>();
    c.chi_tau_min = j.at("chi_tau_min").get<double>();
    c.chi_tau_max = j.at("chi_tau_max").get<double>();
    c.chi_tau_count = j.at("chi_tau_count").get<int>();
    c.support_sweep = j.at("support_sweep").get<std::vector<double>>();
    c.bound_tolerance = j.at("bound_tolerance").get<double>();
    c.exponent_tolerance = j.at("exponent_tolerance").get<double>();
    c.vanishing_tolerance = j.at("vanishing_tolerance").get<double>();
    return c;
}

/// Tolerances and search settings embedded in every report.
inline Json tolerances_json(const ExperimentConfig& c, const FitOptions& fit = {}, const NondegeneracyOptions& nd = {})
{
    return Json{{"quadrature_tol", c.tol},
                {"bound_tolerance", c.bound_tolerance},
                {"exponent_tolerance", c.exponent_tolerance},
                {"vanishing_tolerance", c.vanishing_tolerance},
                {"fit_residual_threshold", fit.residual_threshold},
                {"fit_stability_threshold", fit.stability_threshold},
                {"fit_noise_multiple", fit.noise_multiple},
                {"nondegeneracy_starts", nd.starts},
                {"nondegeneracy_torus_floor", nd.torus_floor},
                {"nondegeneracy_witness_threshold", nd.witness_threshold},
                {"nondegeneracy_seed", nd.seed}};
}

inline NondegeneracyOptions nondegeneracy_options(const ExperimentConfig& c)
{
    NondegeneracyOptions o;
    o.seed = c.seed;
    return o;
}

/// I(tau, phi) over a grid; radial test functions with homogeneous phases use
/// the sphere reduction.
inline std::vector<OscillatorySample> sample_series(const Polynomial& f, const TestFunction& phi,
                                                    const std::vector<double>& grid, double tol,
                                                    const OscillatoryOptions& opts = {})
{
    const int n = f.dimension();
    const bool radial = phi.shape() == CutoffShape::radial && (n == 2 || n == 3) && !f.is_zero() &&
                        f.homogeneous_degree().has_value();
    std::vector<OscillatorySample> out;
    for (double t : grid) out.push_back(radial ? radial_reduce(f, phi, t, tol, opts) : eval_oscillatory(f, phi, t, tol, opts));
    return out;
}

inline bool all_converged(const std::vector<OscillatorySample>& s)
{
    return std::all_of(s.begin(), s.end(), [](const OscillatorySample& x) { return x.converged; });
}

// Exponent-bound battery

struct BatteryFixture
{
    std::string name;
    std::string phase;
    int n = 2;
    ExponentVector nu;
    CutoffShape shape = CutoffShape::product;
};

/// Convenient, nondegenerate fixtures with analytic leading terms.
inline std::vector<BatteryFixture> default_battery()
{
    return {
        {"quartic", "x1^4 + x2^4", 2, {0, 0}, CutoffShape::product},
        {"quadratic", "x1^2 + x2^2", 2, {0, 0}, CutoffShape::product},
        {"mixed-degree", "x1^2 + x2^4", 2, {0, 0}, CutoffShape::product},
        {"quartic-monomial-weight", "x1^4 + x2^4", 2, {2, 2}, CutoffShape::product},
        {"sextic", "x1^6 + x2^6", 2, {0, 0}, CutoffShape::product},
        {"one-variable", "x1^2", 1, {0}, CutoffShape::product},
        {"quadratic-3d", "x1^2 + x2^2 + x3^2", 3, {0, 0, 0}, CutoffShape::product},
        {"quartic-cross-radial", "x1^4 + x1^2*x2^2 + x2^4", 2, {0, 0}, CutoffShape::radial},
    };
}

struct BatteryRow
{
    BatteryFixture fixture;
    std::string rlct;
    std::string rlct_method;
    bool likely_R_nondegenerate = false;
    Theorem2Check check;
    std::optional<double> oracle_alpha;
    std::optional<Complex> oracle_coeff;
    std::vector<OscillatorySample> samples;
};

struct BatteryReport
{
    Json config;
    Json tolerances;
    std::vector<BatteryRow> rows;
    int passed = 0, failed = 0, indeterminate = 0;
    bool pass = false;
};

inline BatteryReport run_theorem2_battery(const std::vector<BatteryFixture>& fixtures, const ExperimentConfig& cfg,
                                          const OscillatoryOptions& opts = {})
{
    cfg.validate(false);
    BatteryReport rep;
    rep.config = to_json(cfg);
    FitOptions fit;
    const auto nd = nondegeneracy_options(cfg);
    rep.tolerances = tolerances_json(cfg, fit, nd);
    const auto grid = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.tau_count);
    for (const auto& fx : fixtures) {
        const auto f = parse(fx.phase, fx.n);
        if (!is_convenient(build_polytope(f)).convenient)
            throw HypothesisFailure("convenient", "fixture '" + fx.name + "': phase is not convenient");
        BatteryRow row;
        row.fixture = fx;
        const auto r = f.homogeneous_degree() ? rlct_homogeneous(f, nd) : rlct_newton_candidate(f, nd);
        row.rlct = to_string(r.value);
        row.rlct_method = to_string(r.method);
        row.likely_R_nondegenerate = r.likely_R_nondegenerate.value_or(false);
        const TestFunction phi(fx.nu, cfg.cutoff(), fx.shape);
        row.samples = sample_series(f, phi, grid, cfg.tol, opts);
        FitOptions fo = fit;
        fo.max_log_power = fx.n - 1;
        row.check = check_theorem2(f, fx.nu, row.samples, cfg.bound_tolerance, fo);
        if (!all_converged(row.samples)) row.check.status = BoundStatus::indeterminate;
        if (fx.shape == CutoffShape::product) {
            if (auto lead = separable_leading(f, fx.nu)) {
                row.oracle_alpha = lead->alpha;
                row.oracle_coeff = lead->coeff;
            }
        }
        switch (row.check.status) {
        case BoundStatus::pass: ++rep.passed; break;
        case BoundStatus::fail: ++rep.failed; break;
        case BoundStatus::indeterminate: ++rep.indeterminate; break;
        }
        rep.rows.push_back(std::move(row));
    }
    rep.pass = !rep.rows.empty() && rep.passed == static_cast<int>(rep.rows.size());
    return rep;
}

inline Json to_json(const BatteryReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"name", row.fixture.name},
                            {"phase", row.fixture.phase},
                            {"n", row.fixture.n},
                            {"nu", row.fixture.nu},
                            {"shape", to_string(row.fixture.shape)},
                            {"rlct", row.rlct},
                            {"rlct_method", row.rlct_method},
                            {"likely_R_nondegenerate", row.likely_R_nondegenerate},
                            {"check", to_json(row.check)},
                            {"oracle_alpha", io::optional_to_json(row.oracle_alpha)},
                            {"oracle_coeff", row.oracle_coeff ? io::complex_to_json(*row.oracle_coeff) : Json(nullptr)},
                            {"samples", to_json(row.samples)}});
    }
    return Json{{"kind", "theorem2-battery"},
                {"version", version()},
                {"config", r.config},
                {"tolerances", r.tolerances},
                {"rows", rows},
                {"passed", r.passed},
                {"failed", r.failed},
                {"indeterminate", r.indeterminate},
                {"pass", r.pass}};
}

inline BatteryReport battery_from_json(const Json& j)
{
    if (j.at("kind") != "theorem2-battery") throw std::invalid_argument("not a battery report");
    BatteryReport r;
    r.config = j.at("config");
    r.tolerances = j.at("tolerances");
    for (const auto& e : j.at("rows")) {
        BatteryRow row;
        row.fixture.name = e.at("name").get<std::string>();
        row.fixture.phase = e.at("phase").get<std::string>();
        row.fixture.n = e.at("n").get<int>();
        row.fixture.nu = e.at("nu").get<ExponentVector>();
        row.fixture.shape = parse_shape(e.at("shape").get<std::string>());
        row.rlct = e.at("rlct").get<std::string>();
        row.rlct_method = e.at("rlct_method").get<std::string>();
        row.likely_R_nondegenerate = e.at("likely_R_nondegenerate").get<bool>();
        row.check = theorem2_from_json(e.at("check"));
        row.oracle_alpha = io::optional_from_json<double>(e.at("oracle_alpha"));
        if (!e.at("oracle_coeff").is_null()) row.oracle_coeff = io::complex_from_json(e.at("oracle_coeff"));
        row.samples = samples_from_json(e.at("samples"));
        r.rows.push_back(std::move(row));
    }
    r.passed = j.at("passed").get<int>();
    r.failed = j.at("failed").get<int>();
    r.indeterminate = j.at("indeterminate").get<int>();
    r.pass = j.at("pass").get<bool>();
    return r;
}

// Blowup-cutoff laboratory

enum class Verdict { supports, contradicts, indeterminate };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::supports: return "supports";
    case Verdict::contradicts: return "contradicts";
    case Verdict::indeterminate: return "indeterminate";
    }
    return "?";
}

inline Verdict parse_verdict(const std::string& s)
{
    if (s == "supports") return Verdict::supports;
    if (s == "contradicts") return Verdict::contradicts;
    if (s == "indeterminate") return Verdict::indeterminate;
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

struct HypothesisCheck
{
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ClaimLine
{
    std::string id;
    std::string statement;
    Verdict verdict = Verdict::indeterminate;
    double measured = 0.0;
    double predicted = 0.0;
    double tolerance = 0.0;
    std::string evidence;
};

struct ChartEntry
{
    int chart = 0;
    OscillatorySample signed_value;
    OscillatorySample absolute_value;
};

/// I(tau, chi') computed directly against the two chart sums.
struct RepresentationCheck
{
    double tau = 0.0;
    OscillatorySample direct;
    Complex signed_sum, absolute_sum;
    double signed_error = 0.0, absolute_error = 0.0;
};

struct SweepEntry
{
    double support = 0.0;
    ExponentEstimate fit;
    CoefficientProbe probe;
};

struct Theorem3Report
{
    Json config;
    Json tolerances;
    std::string phase;
    int n = 0, d = 0;
    Rational gamma, gamma_from_charts;
    std::vector<HypothesisCheck> hypotheses;
    std::vector<std::string> chart_polynomials;
    std::vector<ChartEntry> charts;
    std::vector<RepresentationCheck> representation;
    std::string generic_shape;
    std::vector<OscillatorySample> generic_samples, chi_samples;
    ExponentEstimate generic_fit, chi_fit;
    std::vector<CoefficientProbe> generic_probes, chi_probes;
    std::optional<double> oracle_alpha;
    std::optional<Complex> oracle_coeff;
    std::vector<SweepEntry> sweep;
    double next_exponent = 0.0;
    std::vector<ClaimLine> claims;
    bool all_converged = true;
};

/// Minimum of |f| over the unit circle (or sphere) relative to its maximum.
inline double sphere_min_ratio(const Polynomial& f)
{
    const int n = f.dimension();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    auto visit = [&](std::span<const double> w) {
        const double v = std::abs(f.value<double>(w));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    if (n == 1) {
        for (double s : {-1.0, 1.0}) visit(std::span<const double>(&s, 1));
    } else if (n == 2) {
        for (int k = 0; k < 7200; ++k) {
            const double p = 2.0 * M_PI * k / 7200;
            const double w[2] = {std::cos(p), std::sin(p)};
            visit(std::span<const double>(w, 2));
        }
    } else {
        for (int i = 0; i <= 180; ++i)
            for (int j = 0; j < 360; ++j) {
                const double t = M_PI * i / 180, p = 2.0 * M_PI * j / 360;
                std::vector<double> w(n, 0.0);
                w[0] = std::sin(t) * std::cos(p);
                w[1] = std::sin(t) * std::sin(p);
                w[2] = std::cos(t);
                visit(w);
            }
    }
    return hi > 0.0 ? lo / hi : 0.0;
}

inline std::vector<HypothesisCheck> check_theorem3_hypotheses(const Polynomial& f, const NondegeneracyOptions& nd = {})
{
    std::vector<HypothesisCheck> out;
    const int n = f.dimension();
    const auto deg = f.is_zero() ? std::optional<int>{} : f.homogeneous_degree();
    out.push_back({"homogeneous", deg.has_value(), deg ? "degree " + std::to_string(*deg) : "mixed degrees"});
    const auto conv = is_convenient(build_polytope(f));
    out.push_back({"convenient", conv.convenient, conv.convenient ? "meets every axis" : "misses an axis"});
    if (conv.convenient) {
        const auto v = check_R_nondegenerate(f, nd);
        std::ostringstream os;
        os << to_string(v.status) << ", best residual " << v.best_residual << " over " << v.starts << " starts";
        out.push_back({"likely-R-nondegenerate", v.status == DegeneracyStatus::likely_nondegenerate, os.str()});
    } else {
        out.push_back({"likely-R-nondegenerate", false, "not checked: polytope is not convenient"});
    }
    out.push_back({"even-dimension", n % 2 == 0, "n = " + std::to_string(n)});
    if (deg) {
        const double ratio = sphere_min_ratio(f);
        const bool origin_only = ratio > 1e-9;
        const bool ok = *deg > n || (origin_only && *deg % 2 == 0);
        std::ostringstream os;
        os << "d = " << *deg << ", n = " << n << ", min|f|/max|f| on the sphere = " << ratio;
        out.push_back({"degree-or-isolated-zero", ok, os.str()});
    } else {
        out.push_back({"degree-or-isolated-zero", false, "needs a homogeneous phase"});
    }
    if (deg)
        out.push_back({"degree-parity", true,
                       *deg % 2 == 0 ? "d even: signed chart integrals tested for vanishing"
                                     : "d odd: real parts tested, cutoff symmetrized under x -> -x"});
    out.push_back({"supported-dimension", n == 2, "the blowup cutoff is implemented for n = 2"});
    return out;
}

namespace detail {

inline double relative(double num, double den) { return den > 0.0 ? num / den : (num > 0.0 ? INFINITY : 0.0); }

} // namespace detail

inline Theorem3Report run_theorem3_lab(const ExperimentConfig& cfg, const OscillatoryOptions& opts = {})
{
    cfg.validate(true);
    const int n = cfg.resolved_dimension();
    const auto f = parse(cfg.phase, n);
    const auto nd = nondegeneracy_options(cfg);
    FitOptions fit;
    fit.max_log_power = n - 1;

    Theorem3Report rep;
    rep.config = to_json(cfg);
    rep.tolerances = tolerances_json(cfg, fit, nd);
    rep.phase = f.to_string();
    rep.n = n;
    rep.hypotheses = check_theorem3_hypotheses(f, nd);
    std::string failed;
    for (const auto& h : rep.hypotheses)
        if (!h.passed) failed += (failed.empty() ? "" : ", ") + h.name + " (" + h.detail + ")";
    if (!failed.empty()) {
        const auto first = std::find_if(rep.hypotheses.begin(), rep.hypotheses.end(), [](auto& h) { return !h.passed; });
        throw HypothesisFailure(first->name, "hypothesis check failed: " + failed);
    }

    const int d = *f.homogeneous_degree();
    rep.d = d;
    rep.gamma = rlct_homogeneous(f, nd).value;
    const auto charts = blowup_charts(f);
    rep.gamma_from_charts = gamma_from_resolution(resolution_from_charts(charts));
    for (const auto& c : charts) rep.chart_polynomials.push_back(c.h.to_string());
    rep.next_exponent = -static_cast<double>(n + 1) / d;
    const double crit = -static_cast<double>(n) / d;

    const auto eta = cfg.cutoff();
    const auto chi = build_symmetric_cutoff(n, cfg.overlap, eta);

    // Chart integrals in both conventions and the direct I(tau, chi').
    for (double tau : cfg.chart_taus) {
        RepresentationCheck rc;
        rc.tau = tau;
        for (const auto& c : charts) {
            const int i = c.index;
            ChartWeight theta = [&chi, i](std::span<const double> y) { return chi.theta(i, y[0]); };
            ChartEntry e;
            e.chart = i;
            e.signed_value = chart_parity_integral(d, n, c.h, theta, eta, chi.chart_radius(),
                                                   JacobianConvention::signed_form, tau, cfg.tol, opts);
            e.absolute_value = chart_parity_integral(d, n, c.h, theta, eta, chi.chart_radius(),
                                                     JacobianConvention::absolute_measure, tau, cfg.tol, opts);
            rc.signed_sum += e.signed_value.value;
            rc.absolute_sum += e.absolute_value.value;
            rc.signed_error += e.signed_value.error;
            rc.absolute_error += e.absolute_value.error;
            rep.all_converged = rep.all_converged && e.signed_value.converged && e.absolute_value.converged;
            rep.charts.push_back(e);
        }
        rc.direct = eval_symmetric_cutoff(f, chi, tau, cfg.tol, opts);
        rep.all_converged = rep.all_converged && rc.direct.converged;
        rep.representation.push_back(rc);
    }

    // A generic bump: product shape when the phase separates, radial otherwise.
    const bool separable = is_separable(f);
    const CutoffShape generic_shape = separable ? CutoffShape::product : CutoffShape::radial;
    rep.generic_shape = to_string(generic_shape);
    const auto grid = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.tau_count);
    const ExponentVector zero(n, 0);
    rep.generic_samples = sample_series(f, TestFunction(zero, eta, generic_shape), grid, cfg.tol, opts);
    rep.generic_fit = fit_leading(rep.generic_samples, fit);
    for (int k = 0; k < n; ++k) rep.generic_probes.push_back(coefficient_at(rep.generic_samples, crit, k));
    rep.all_converged = rep.all_converged && all_converged(rep.generic_samples);
    if (separable) {
        if (auto lead = separable_leading(f, zero)) {
            rep.oracle_alpha = lead->alpha;
            rep.oracle_coeff = lead->coeff;
        }
    }

    const auto chi_grid = geometric_grid(cfg.chi_tau_min, cfg.chi_tau_max, cfg.chi_tau_count);
    for (double tau : chi_grid) rep.chi_samples.push_back(eval_symmetric_cutoff(f, chi, tau, cfg.tol, opts));
    rep.chi_fit = fit_leading(rep.chi_samples, fit);
    for (int k = 0; k < n; ++k) rep.chi_probes.push_back(coefficient_at(rep.chi_samples, crit, k));
    rep.all_converged = rep.all_converged && all_converged(rep.chi_samples);

    for (double b : cfg.support_sweep) {
        SweepEntry s;
        s.support = b;
        const auto series = sample_series(f, TestFunction(zero, CutoffFunction(b / 2.0, b), generic_shape), grid,
                                          cfg.tol, opts);
        s.fit = fit_leading(series, fit);
        s.probe = coefficient_at(series, crit, 0);
        rep.all_converged = rep.all_converged && all_converged(series);
        rep.sweep.push_back(s);
    }

    // Claims.
    auto indeterminate_if_unconverged = [&](Verdict v) { return rep.all_converged ? v : Verdict::indeterminate; };
    {
        ClaimLine c{"rlct-homogeneous", "gamma(f) = n/d", Verdict::indeterminate, to_double(rep.gamma_from_charts),
                    static_cast<double>(n) / d, 0.0, ""};
        const bool ok = rep.gamma == Rational(n, d) && rep.gamma_from_charts == rep.gamma;
        c.verdict = ok ? Verdict::supports : Verdict::contradicts;
        c.evidence = "homogeneous value " + to_string(rep.gamma) + ", blowup resolution value " +
                     to_string(rep.gamma_from_charts) + " (exact)";
        rep.claims.push_back(c);
    }
    {
        const bool odd = d % 2 != 0;
        ClaimLine c{"signed-chart-vanishing",
                    odd ? "signed chart integrals have vanishing real part" : "signed chart integrals vanish",
                    Verdict::supports, 0.0, 0.0, cfg.vanishing_tolerance, ""};
        bool ok = true;
        for (const auto& e : rep.charts) {
            const double v = odd ? std::abs(e.signed_value.value.real()) : std::abs(e.signed_value.value);
            const double scale = std::abs(e.absolute_value.value);
            const double ratio = detail::relative(v, scale);
            c.measured = std::max(c.measured, ratio);
            if (ratio > cfg.vanishing_tolerance && v > 3.0 * e.signed_value.error) ok = false;
        }
        c.verdict = indeterminate_if_unconverged(ok ? Verdict::supports : Verdict::contradicts);
        c.evidence = "max |signed| / |absolute| over charts and tau = " + num_text(c.measured);
        rep.claims.push_back(c);
    }
    auto representation_claim = [&](const std::string& id, const std::string& statement, bool use_signed) {
        ClaimLine c{id, statement, Verdict::supports, 0.0, 0.0, 0.0, ""};
        bool ok = true;
        for (const auto& rc : rep.representation) {
            const Complex sum = use_signed ? rc.signed_sum : rc.absolute_sum;
            const double err = (use_signed ? rc.signed_error : rc.absolute_error) + rc.direct.error;
            const double diff = std::abs(sum - rc.direct.value);
            const double allowed = 3.0 * err + cfg.tol;
            c.measured = std::max(c.measured, detail::relative(diff, std::abs(rc.direct.value)));
            c.tolerance = std::max(c.tolerance, detail::relative(allowed, std::abs(rc.direct.value)));
            if (diff > allowed) ok = false;
        }
        c.verdict = indeterminate_if_unconverged(ok ? Verdict::supports : Verdict::contradicts);
        c.evidence = "max relative mismatch against I(tau, chi') computed in polar coordinates";
        rep.claims.push_back(c);
    };
    representation_claim("signed-charts-represent-integral",
                         "sum of signed chart integrals equals I(tau, chi')", true);
    representation_claim("absolute-charts-represent-integral",
                         "sum of absolute-Jacobian chart integrals equals I(tau, chi')", false);
    {
        ClaimLine c{"cutoff-reduction", "beta(f, chi') < -n/d", Verdict::indeterminate, rep.chi_fit.alpha_hat, crit,
                    cfg.exponent_tolerance, ""};
        bool any_nonzero = false;
        std::ostringstream os;
        for (const auto& p : rep.chi_probes) {
            any_nonzero = any_nonzero || !p.consistent_with_zero;
            os << "C(" << p.alpha << ", k=" << p.k << ") = " << num_text(std::abs(p.coeff)) << " (noise+spread "
               << num_text(p.noise + p.spread) << "); ";
        }
        os << "fitted exponent " << rep.chi_fit.alpha_hat << " (" << to_string(rep.chi_fit.outcome) << ")";
        if (any_nonzero)
            c.verdict = Verdict::contradicts;
        else if (rep.chi_fit.outcome == FitOutcome::consistent_with_zero ||
                 (rep.chi_fit.converged && rep.chi_fit.alpha_hat < crit - cfg.exponent_tolerance))
            c.verdict = Verdict::supports;
        c.verdict = indeterminate_if_unconverged(c.verdict);
        c.evidence = os.str();
        rep.claims.push_back(c);
    }
    {
        ClaimLine c{"strict-bound", "beta(f) < -gamma(f)", Verdict::indeterminate, rep.generic_fit.alpha_hat, crit,
                    cfg.exponent_tolerance, ""};
        bool any_nonzero = false;
        std::ostringstream os;
        for (const auto& p : rep.generic_probes) any_nonzero = any_nonzero || !p.consistent_with_zero;
        for (const auto& s : rep.sweep) {
            any_nonzero = any_nonzero || !s.probe.consistent_with_zero;
            os << "support " << s.support << ": C = " << num_text(std::abs(s.probe.coeff)) << "; ";
        }
        const auto& p0 = rep.generic_probes.front();
        os << "generic C(-n/d) = [" << num_text(p0.coeff.real()) << ", " << num_text(p0.coeff.imag()) << "]";
        if (rep.oracle_coeff)
            os << ", separable oracle [" << num_text(rep.oracle_coeff->real()) << ", "
               << num_text(rep.oracle_coeff->imag()) << "]";
        if (any_nonzero)
            c.verdict = Verdict::contradicts;
        else if (rep.generic_fit.outcome == FitOutcome::consistent_with_zero ||
                 (rep.generic_fit.converged && rep.generic_fit.alpha_hat < crit - cfg.exponent_tolerance))
            c.verdict = Verdict::supports;
        c.verdict = indeterminate_if_unconverged(c.verdict);
        c.evidence = os.str();
        rep.claims.push_back(c);
    }
    {
        ClaimLine c{"upper-bound", "beta(f) <= -gamma(f)", Verdict::indeterminate, rep.generic_fit.alpha_hat, crit,
                    cfg.bound_tolerance, ""};
        if (rep.generic_fit.outcome == FitOutcome::consistent_with_zero)
            c.verdict = Verdict::supports;
        else if (rep.generic_fit.converged)
            c.verdict = rep.generic_fit.alpha_hat <= crit + cfg.bound_tolerance ? Verdict::supports : Verdict::contradicts;
        c.verdict = indeterminate_if_unconverged(c.verdict);
        c.evidence = "fitted exponent for a generic bump against -n/d";
        rep.claims.push_back(c);
    }
    {
        ClaimLine c{"next-exponent", "beta(f) = -(n+1)/d", Verdict::indeterminate, rep.generic_fit.alpha_hat,
                    rep.next_exponent, cfg.exponent_tolerance, ""};
        if (rep.generic_fit.converged && rep.generic_fit.outcome == FitOutcome::exponent)
            c.verdict = std::abs(rep.generic_fit.alpha_hat - rep.next_exponent) <= cfg.exponent_tolerance
                            ? Verdict::supports
                            : Verdict::contradicts;
        c.verdict = indeterminate_if_unconverged(c.verdict);
        c.evidence = "fitted exponent for a generic bump against -(n+1)/d";
        rep.claims.push_back(c);
    }
    {
        ClaimLine c{"support-independence", "leading exponent does not depend on the support radius",
                    Verdict::indeterminate, 0.0, 0.0, cfg.exponent_tolerance, ""};
        bool ok = true;
        int used = 0;
        std::ostringstream os;
        for (const auto& s : rep.sweep) {
            // Dilating the bump by b/b0 rescales tau by (b/b0)^d, so small supports can sit
            // in the preasymptotic range of the grid.
            if (!s.fit.converged || s.fit.outcome != FitOutcome::exponent) {
                os << "support " << s.support << ": no stable fit (preasymptotic on this grid); ";
                continue;
            }
            ++used;
            c.measured = std::max(c.measured, std::abs(s.fit.alpha_hat - rep.generic_fit.alpha_hat));
            if (std::abs(s.fit.alpha_hat - rep.generic_fit.alpha_hat) > cfg.exponent_tolerance) ok = false;
            os << "support " << s.support << ": exponent " << s.fit.alpha_hat << "; ";
        }
        const bool known = used >= 2;
        c.verdict = !known ? Verdict::indeterminate : ok ? Verdict::supports : Verdict::contradicts;
        c.verdict = indeterminate_if_unconverged(c.verdict);
        c.evidence = os.str();
        rep.claims.push_back(c);
    }
    return rep;
}

inline Json to_json(const Theorem3Report& r)
{
    Json hyp = Json::array();
    for (const auto& h : r.hypotheses) hyp.push_back(Json{{"name", h.name}, {"passed", h.passed}, {"detail", h.detail}});
    Json charts = Json::array();
    for (const auto& e : r.charts)
        charts.push_back(
            Json{{"chart", e.chart}, {"signed", to_json(e.signed_value)}, {"absolute", to_json(e.absolute_value)}});
    Json repr = Json::array();
    for (const auto& rc : r.representation)
        repr.push_back(Json{{"tau", rc.tau},
                            {"direct", to_json(rc.direct)},
                            {"signed_sum", io::complex_to_json(rc.signed_sum)},
                            {"signed_error", rc.signed_error},
                            {"absolute_sum", io::complex_to_json(rc.absolute_sum)},
                            {"absolute_error", rc.absolute_error}});
    auto probes = [](const std::vector<CoefficientProbe>& v) {
        Json a = Json::array();
        for (const auto& p : v) a.push_back(to_json(p));
        return a;
    };
    Json sweep = Json::array();
    for (const auto& s : r.sweep)
        sweep.push_back(Json{{"support", s.support}, {"fit", to_json(s.fit)}, {"probe", to_json(s.probe)}});
    Json claims = Json::array();
    for (const auto& c : r.claims)
        claims.push_back(Json{{"id", c.id},
                              {"statement", c.statement},
                              {"verdict", to_string(c.verdict)},
                              {"measured", c.measured},
                              {"predicted", c.predicted},
                              {"tolerance", c.tolerance},
                              {"evidence", c.evidence}});
    return Json{{"kind", "theorem3-lab"},
                {"version", version()},
                {"config", r.config},
                {"tolerances", r.tolerances},
                {"phase", r.phase},
                {"n", r.n},
                {"d", r.d},
                {"gamma", io::rational_to_json(r.gamma)},
                {"gamma_from_charts", io::rational_to_json(r.gamma_from_charts)},
                {"hypotheses", hyp},
                {"chart_polynomials", r.chart_polynomials},
                {"charts", charts},
                {"representation", repr},
                {"generic_shape", r.generic_shape},
                {"generic_fit", to_json(r.generic_fit)},
                {"generic_probes", probes(r.generic_probes)},
                {"oracle_alpha", io::optional_to_json(r.oracle_alpha)},
                {"oracle_coeff", r.oracle_coeff ? io::complex_to_json(*r.oracle_coeff) : Json(nullptr)},
                {"chi_fit", to_json(r.chi_fit)},
                {"chi_probes", probes(r.chi_probes)},
                {"sweep", sweep},
                {"next_exponent", r.next_exponent},
                {"claims", claims},
                {"all_converged", r.all_converged},
                {"generic_samples", to_json(r.generic_samples)},
                {"chi_samples", to_json(r.chi_samples)}};
}

inline Theorem3Report theorem3_from_json(const Json& j)
{
    if (j.at("kind") != "theorem3-lab") throw std::invalid_argument("not a laboratory report");
    Theorem3Report r;
    r.config = j.at("config");
    r.tolerances = j.at("tolerances");
    r.phase = j.at("phase").get<std::string>();
    r.n = j.at("n").get<int>();
    r.d = j.at("d").get<int>();
    r.gamma = io::rational_from_json(j.at("gamma"));
    r.gamma_from_charts = io::rational_from_json(j.at("gamma_from_charts"));
    for (const auto& h : j.at("hypotheses"))
        r.hypotheses.push_back({h.at("name").get<std::string>(), h.at("passed").get<bool>(),
                                h.at("detail").get<std::string>()});
    r.chart_polynomials = j.at("chart_polynomials").get<std::vector<std::string>>();
    for (const auto& e : j.at("charts"))
        r.charts.push_back({e.at("chart").get<int>(), sample_from_json(e.at("signed")), sample_from_json(e.at("absolute"))});
    for (const auto& e : j.at("representation")) {
        RepresentationCheck rc;
        rc.tau = e.at("tau").get<double>();
        rc.direct = sample_from_json(e.at("direct"));
        rc.signed_sum = io::complex_from_json(e.at("signed_sum"));
        rc.signed_error = e.at("signed_error").get<double>();
        rc.absolute_sum = io::complex_from_json(e.at("absolute_sum"));
        rc.absolute_error = e.at("absolute_error").get<double>();
        r.representation.push_back(rc);
    }
    r.generic_shape = j.at("generic_shape").get<std::string>();
    r.generic_fit = estimate_from_json(j.at("generic_fit"));
    for (const auto& p : j.at("generic_probes")) r.generic_probes.push_back(probe_from_json(p));
    r.oracle_alpha = io::optional_from_json<double>(j.at("oracle_alpha"));
    if (!j.at("oracle_coeff").is_null()) r.oracle_coeff = io::complex_from_json(j.at("oracle_coeff"));
    r.chi_fit = estimate_from_json(j.at("chi_fit"));
    for (const auto& p : j.at("chi_probes")) r.chi_probes.push_back(probe_from_json(p));
    for (const auto& s : j.at("sweep"))
        r.sweep.push_back({s.at("support").get<double>(), estimate_from_json(s.at("fit")), probe_from_json(s.at("probe"))});
    r.next_exponent = j.at("next_exponent").get<double>();
    for (const auto& c : j.at("claims"))
        r.claims.push_back({c.at("id").get<std::string>(), c.at("statement").get<std::string>(),
                            parse_verdict(c.at("verdict").get<std::string>()), c.at("measured").get<double>(),
                            c.at("predicted").get<double>(), c.at("tolerance").get<double>(),
                            c.at("evidence").get<std::string>()});
    r.all_converged = j.at("all_converged").get<bool>();
    r.generic_samples = samples_from_json(j.at("generic_samples"));
    r.chi_samples = samples_from_json(j.at("chi_samples"));
    return r;
}

// Markdown summaries

inline std::string markdown_summary(const Theorem3Report& r)
{
    std::ostringstream os;
    os << "# theorem3-lab: " << r.phase << "\n\n";
    os << "- version " << version() << "\n";
    os << "- n = " << r.n << ", d = " << r.d << ", gamma = " << to_string(r.gamma) << " (exact)\n";
    os << "- quadrature tol " << num_text(r.tolerances.at("quadrature_tol").get<double>()) << "\n";
    os << "- all quadratures converged: " << (r.all_converged ? "yes" : "no") << "\n\n";
    os << "## Hypotheses\n\n";
    for (const auto& h : r.hypotheses) os << "- " << h.name << ": " << (h.passed ? "pass" : "FAIL") << " (" << h.detail << ")\n";
    os << "\n## Claims\n\n";
    for (const auto& c : r.claims)
        os << "- [" << to_string(c.verdict) << "] " << c.id << ": " << c.statement << " | measured "
           << num_text(c.measured) << ", predicted " << num_text(c.predicted) << ", tolerance "
           << num_text(c.tolerance) << " | " << c.evidence << "\n";
    return os.str();
}

inline std::string markdown_summary(const BatteryReport& r)
{
    std::ostringstream os;
    os << "# theorem2-battery\n\n";
    os << "- version " << version() << "\n";
    os << "- bound tolerance " << num_text(r.tolerances.at("bound_tolerance").get<double>()) << "\n";
    os << "- passed " << r.passed << ", failed " << r.failed << ", indeterminate " << r.indeterminate << "\n\n";
    os << "| fixture | phase | nu | rlct | d(f,phi) | r | r' | bound | alpha_hat | slack | status |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : r.rows) {
        std::string nu;
        for (std::size_t i = 0; i < row.fixture.nu.size(); ++i) nu += (i ? "," : "") + std::to_string(row.fixture.nu[i]);
        os << "| " << row.fixture.name << " | " << row.fixture.phase << " | (" << nu << ") | " << row.rlct << " | "
           << to_string(row.check.distance) << " | " << to_string(row.check.r) << " | " << to_string(row.check.r_prime)
           << " | " << num_text(row.check.bound) << " | " << num_text(row.check.fit.alpha_hat) << " | "
           << num_text(row.check.slack) << " | " << to_string(row.check.status)
           << (row.check.vacuous ? " (vacuous)" : "") << " |\n";
    }
    return os.str();
}

/// Writes `<stem>.json`, `<stem>.md` or one CSV per sample table into dir; returns the paths.
inline std::vector<std::string> export_report(const Json& report, const std::string& markdown,
                                              const std::vector<std::pair<std::string, std::vector<OscillatorySample>>>& tables,
                                              const std::string& format, const std::string& dir,
                                              const std::string& stem)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write '" + path + "'");
        written.push_back(path);
        return os;
    };
    if (format == "json") {
        auto os = open(stem + ".json");
        os << report.dump(2) << '\n';
    } else if (format == "md") {
        auto os = open(stem + ".md");
        os << markdown;
    } else if (format == "csv") {
        for (const auto& [name, samples] : tables) {
            auto os = open(stem + (name.empty() ? "" : "_" + name) + ".csv");
            write_samples_csv(os, samples);
        }
    } else {
        throw std::invalid_argument("unknown format '" + format + "'");
    }
    return written;
}

inline std::vector<std::string> export_report(const Theorem3Report& r, const std::string& format, const std::string& dir,
                                              const std::string& stem = "theorem3")
{
    return export_report(to_json(r), markdown_summary(r), {{"generic", r.generic_samples}, {"chi", r.chi_samples}},
                         format, dir, stem);
}

inline std::vector<std::string> export_report(const BatteryReport& r, const std::string& format, const std::string& dir,
                                              const std::string& stem = "theorem2")
{
    std::vector<std::pair<std::string, std::vector<OscillatorySample>>> tables;
    for (const auto& row : r.rows) tables.emplace_back(row.fixture.name, row.samples);
    return export_report(to_json(r), markdown_summary(r), tables, format, dir, stem);
}

} // namespace oscillab

#endif // OSCILLAB_EXPERIMENTS_HPP
