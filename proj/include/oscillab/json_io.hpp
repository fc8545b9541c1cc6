#ifndef OSCILLAB_JSON_IO_HPP
#define OSCILLAB_JSON_IO_HPP

// JSON and CSV serialization. Objects use ordered_json so key order, and with
// it the output bytes, only depend on the data.

#include "oscillab/asymptotic_fit.hpp"
#include "oscillab/newton_polytope.hpp"
#include "oscillab/nondegeneracy.hpp"
#include "oscillab/oscillatory.hpp"
#include "oscillab/rational.hpp"
#include "oscillab/rlct.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

using Json = nlohmann::ordered_json;

/// 17 significant digits, the CSV convention.
inline std::string format_g17(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace io {

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json rational_to_json(const Rational& q) { return to_string(q); }
inline Rational rational_from_json(const Json& j) { return parse_rational(j.get<std::string>()); }

template <typename T>
Json optional_to_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const Json& j)
{
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

inline long long bigint_to_ll(const BigInt& v) { return v.convert_to<long long>(); }

} // namespace io

// Polytopes

inline Json to_json(const FaceFunctional& f)
{
    Json w = Json::array();
    for (const auto& x : f.weights) w.push_back(io::rational_to_json(x));
    return Json{{"weights", w},
                {"dj", io::bigint_to_ll(f.denominator)},
                {"rj", io::rational_to_json(f.r_value)},
                {"compact", f.compact}};
}

inline Json to_json(const NewtonPolytope& p)
{
    Json facets = Json::array();
    for (const auto& f : p.facets()) facets.push_back(to_json(f));
    return Json{{"n", p.dimension()}, {"generators", p.generators()}, {"facets", facets}};
}

/// Rebuilds the polytope from its generators and checks the stored facets agree.
inline NewtonPolytope polytope_from_json(const Json& j)
{
    const int n = j.at("n").get<int>();
    const auto gens = j.at("generators").get<std::vector<ExponentVector>>();
    for (const auto& g : gens)
        if (static_cast<int>(g.size()) != n) throw std::invalid_argument("polytope JSON: generator dimension mismatch");
    auto p = build_polytope(gens);
    if (j.contains("facets") && to_json(p).at("facets") != j.at("facets"))
        throw std::invalid_argument("polytope JSON: facets do not match the generators");
    return p;
}

// Resolution data

inline Json to_json(const ResolutionDatum& data)
{
    Json a = Json::array();
    for (const auto& c : data) a.push_back(Json{{"m", c.m}, {"k", c.k}});
    return a;
}

inline ResolutionDatum resolution_from_json(const Json& j)
{
    if (!j.is_array()) throw std::invalid_argument("resolution data must be a JSON array of {m, k}");
    ResolutionDatum data;
    for (const auto& e : j) {
        const ResolutionComponent c{e.at("m").get<int>(), e.at("k").get<int>()};
        if (c.m < 1 || c.k < 0) throw std::invalid_argument("resolution data needs m >= 1 and k >= 0");
        data.push_back(c);
    }
    if (data.empty()) throw std::invalid_argument("resolution data is empty");
    return data;
}

// rlct

inline Json to_json(const RlctReport& r)
{
    Json faces = Json::array();
    for (const auto& f : r.principal_faces) {
        Json w = Json::array();
        for (const auto& x : f.weights) w.push_back(io::rational_to_json(x));
        faces.push_back(Json{{"weights", w},
                             {"dj", io::bigint_to_ll(f.d)},
                             {"rj", io::bigint_to_ll(f.r)},
                             {"dj_even", f.d_even},
                             {"rj_odd", f.r_odd}});
    }
    Json j{{"value", io::rational_to_json(r.value)},
           {"method", to_string(r.method)},
           {"dimension", r.dimension},
           {"degree", io::optional_to_json(r.degree)},
           {"convenient", r.convenient},
           {"likely_R_nondegenerate", io::optional_to_json(r.likely_R_nondegenerate)},
           {"homogeneous", r.homogeneous},
           {"value_at_most_one", r.value_at_most_one},
           {"candidate_only", r.candidate_only}};
    if (r.method == RlctMethod::newton_candidate) {
        j["likely_nonnegative"] = io::optional_to_json(r.likely_nonnegative);
        j["below_one_strict"] = io::optional_to_json(r.below_one_strict);
        j["principal_faces"] = faces;
    }
    return j;
}

// Nondegeneracy

inline Json to_json(const NondegeneracyVerdict& v)
{
    Json j{{"status", to_string(v.status)},
           {"field", v.field == NumberField::real ? "real" : "complex"},
           {"faces_searched", v.faces_searched},
           {"starts", v.starts},
           {"best_residual", v.best_residual}};
    if (v.witness) {
        Json pt = Json::array();
        for (const auto& z : v.witness->point) pt.push_back(io::complex_to_json(z));
        j["witness"] = Json{{"point", pt},
                            {"normalized_residual", v.witness->normalized_residual},
                            {"gradient_residual", v.witness->gradient_residual}};
    } else {
        j["witness"] = nullptr;
    }
    if (v.face) {
        Json w = Json::array();
        for (const auto& x : v.face->weights) w.push_back(io::rational_to_json(x));
        j["face"] = Json{{"weights", w}, {"incident", v.face->incident}};
    }
    return j;
}

// Samples

inline Json to_json(const OscillatorySample& s)
{
    return Json{{"tau", s.tau},
                {"value", io::complex_to_json(s.value)},
                {"error", s.error},
                {"converged", s.converged},
                {"method", s.method}};
}

inline OscillatorySample sample_from_json(const Json& j)
{
    OscillatorySample s;
    s.tau = j.at("tau").get<double>();
    s.value = io::complex_from_json(j.at("value"));
    s.error = j.at("error").get<double>();
    s.converged = j.at("converged").get<bool>();
    s.method = j.at("method").get<std::string>();
    return s;
}

inline Json to_json(const std::vector<OscillatorySample>& v)
{
    Json a = Json::array();
    for (const auto& s : v) a.push_back(to_json(s));
    return a;
}

inline std::vector<OscillatorySample> samples_from_json(const Json& j)
{
    std::vector<OscillatorySample> v;
    for (const auto& e : j) v.push_back(sample_from_json(e));
    return v;
}

inline const char* csv_header() { return "tau,re,im,abs,err"; }

inline void write_samples_csv(std::ostream& os, const std::vector<OscillatorySample>& samples)
{
    os << csv_header() << '\n';
    for (const auto& s : samples)
        os << format_g17(s.tau) << ',' << format_g17(s.value.real()) << ',' << format_g17(s.value.imag()) << ','
           << format_g17(std::abs(s.value)) << ',' << format_g17(s.error) << '\n';
}

inline std::vector<OscillatorySample> read_samples_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("sample CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw std::invalid_argument("sample CSV: expected header '" + std::string(csv_header()) + "'");
    std::vector<OscillatorySample> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::invalid_argument("sample CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (v.size() != 5) throw std::invalid_argument("sample CSV line " + std::to_string(lineno) + ": expected 5 columns");
        OscillatorySample s;
        s.tau = v[0];
        s.value = {v[1], v[2]};
        s.error = v[4];
        s.method = "csv";
        out.push_back(s);
    }
    return out;
}

// Fits

inline Json to_json(const ExponentEstimate& e)
{
    return Json{{"outcome", to_string(e.outcome)},
                {"alpha_hat", e.alpha_hat},
                {"k_hat", e.k_hat},
                {"coeff_hat", io::complex_to_json(e.coeff_hat)},
                {"residual", e.residual},
                {"noise_floor", e.noise_floor},
                {"converged", e.converged},
                {"window", Json::array({e.tau_min, e.tau_max})},
                {"samples_used", e.samples_used},
                {"alpha_lower_half", io::optional_to_json(e.alpha_lower_half)},
                {"alpha_upper_half", io::optional_to_json(e.alpha_upper_half)}};
}

inline ExponentEstimate estimate_from_json(const Json& j)
{
    ExponentEstimate e;
    const auto outcome = j.at("outcome").get<std::string>();
    if (outcome == "exponent")
        e.outcome = FitOutcome::exponent;
    else if (outcome == "consistent-with-zero")
        e.outcome = FitOutcome::consistent_with_zero;
    else if (outcome == "insufficient")
        e.outcome = FitOutcome::insufficient;
    else
        throw std::invalid_argument("unknown fit outcome '" + outcome + "'");
    e.alpha_hat = j.at("alpha_hat").get<double>();
    e.k_hat = j.at("k_hat").get<int>();
    e.coeff_hat = io::complex_from_json(j.at("coeff_hat"));
    e.residual = j.at("residual").get<double>();
    e.noise_floor = j.at("noise_floor").get<double>();
    e.converged = j.at("converged").get<bool>();
    e.tau_min = j.at("window")[0].get<double>();
    e.tau_max = j.at("window")[1].get<double>();
    e.samples_used = j.at("samples_used").get<std::size_t>();
    e.alpha_lower_half = io::optional_from_json<double>(j.at("alpha_lower_half"));
    e.alpha_upper_half = io::optional_from_json<double>(j.at("alpha_upper_half"));
    return e;
}

inline Json to_json(const CoefficientProbe& p)
{
    return Json{{"alpha", p.alpha},
                {"k", p.k},
                {"coeff", io::complex_to_json(p.coeff)},
                {"noise", p.noise},
                {"spread", p.spread},
                {"consistent_with_zero", p.consistent_with_zero},
                {"samples_used", p.samples_used},
                {"window", Json::array({p.tau_min, p.tau_max})}};
}

inline CoefficientProbe probe_from_json(const Json& j)
{
    CoefficientProbe p;
    p.alpha = j.at("alpha").get<double>();
    p.k = j.at("k").get<int>();
    p.coeff = io::complex_from_json(j.at("coeff"));
    p.noise = j.at("noise").get<double>();
    p.spread = j.at("spread").get<double>();
    p.consistent_with_zero = j.at("consistent_with_zero").get<bool>();
    p.samples_used = j.at("samples_used").get<std::size_t>();
    p.tau_min = j.at("window")[0].get<double>();
    p.tau_max = j.at("window")[1].get<double>();
    return p;
}

inline Json to_json(const Theorem2Check& c)
{
    return Json{{"fit", to_json(c.fit)},
                {"distance", io::rational_to_json(c.distance)},
                {"r", io::rational_to_json(c.r)},
                {"r_prime", io::rational_to_json(c.r_prime)},
                {"bound", c.bound},
                {"sandwich", c.sandwich},
                {"sandwich_holds", c.sandwich_holds},
                {"slack", c.slack},
                {"tolerance", c.tolerance},
                {"status", to_string(c.status)},
                {"vacuous", c.vacuous}};
}

inline Theorem2Check theorem2_from_json(const Json& j)
{
    Theorem2Check c;
    c.fit = estimate_from_json(j.at("fit"));
    c.distance = io::rational_from_json(j.at("distance"));
    c.r = io::rational_from_json(j.at("r"));
    c.r_prime = io::rational_from_json(j.at("r_prime"));
    c.bound = j.at("bound").get<double>();
    c.sandwich = j.at("sandwich").get<double>();
    c.sandwich_holds = j.at("sandwich_holds").get<bool>();
    c.slack = j.at("slack").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    const auto st = j.at("status").get<std::string>();
    c.status = st == "pass" ? BoundStatus::pass : st == "fail" ? BoundStatus::fail : BoundStatus::indeterminate;
    c.vacuous = j.at("vacuous").get<bool>();
    return c;
}

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("'" + path + "': " + e.what());
    }
}

} // namespace oscillab

#endif // OSCILLAB_JSON_IO_HPP
