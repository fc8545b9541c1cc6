#ifndef OSCILLAB_RLCT_HPP
#define OSCILLAB_RLCT_HPP

#include "oscillab/newton_polytope.hpp"
#include "oscillab/nondegeneracy.hpp"
#include "oscillab/polynomial.hpp"
#include "oscillab/rational.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

/// Multiplicities (m_j of pi^*f, k_j of pi^*dx) along one exceptional or strict-transform component.
struct ResolutionComponent
{
    int m = 1;
    int k = 0;
};

using ResolutionDatum = std::vector<ResolutionComponent>;

enum class RlctMethod { resolution, homogeneous, newton_candidate };

inline const char* to_string(RlctMethod m)
{
    switch (m) {
    case RlctMethod::resolution: return "resolution";
    case RlctMethod::homogeneous: return "homogeneous";
    case RlctMethod::newton_candidate: return "newton-candidate";
    }
    return "?";
}

struct FaceParity
{
    RationalVector weights;
    BigInt d;           ///< LCM of weight denominators
    BigInt r;           ///< d * l(1,...,1)
    bool d_even = false;
    bool r_odd = false;
};

struct RlctReport
{
    Rational value;
    RlctMethod method = RlctMethod::resolution;
    int dimension = 0;
    std::optional<int> degree;
    bool convenient = false;
    std::optional<bool> likely_R_nondegenerate;
    bool homogeneous = false;
    bool value_at_most_one = false;
    /// Only for the Newton candidate: heuristic nonnegativity of f and strictness of l(1) < 1.
    std::optional<bool> likely_nonnegative;
    std::optional<bool> below_one_strict;
    std::vector<FaceParity> principal_faces;
    bool candidate_only = false;
};

/// gamma = min_j (k_j + 1) / m_j.
inline Rational gamma_from_resolution(const ResolutionDatum& data)
{
    if (data.empty()) throw std::invalid_argument("gamma_from_resolution: empty resolution data");
    std::optional<Rational> best;
    for (const auto& c : data) {
        if (c.m < 1 || c.k < 0) throw std::invalid_argument("gamma_from_resolution: need m >= 1 and k >= 0");
        const Rational v(c.k + 1, c.m);
        if (!best || v < *best) best = v;
    }
    return *best;
}

/// One chart of the point blowup: pi^*f = y_i^d h_i, pi^*dx = y_i^{n-1} dy.
struct BlowupChart
{
    int index = 0;          ///< 0-based chart index i
    Polynomial h;           ///< f with x_i = 1, in the remaining n-1 variables
    int f_multiplicity = 0; ///< d
    int jacobian_multiplicity = 0; ///< n - 1
};

inline std::vector<BlowupChart> blowup_charts(const Polynomial& f)
{
    if (f.is_zero()) throw std::invalid_argument("blowup_charts: zero polynomial");
    const auto d = f.homogeneous_degree();
    if (!d) throw std::invalid_argument("blowup_charts: polynomial is not homogeneous");
    const int n = f.dimension();
    if (n < 2) throw std::invalid_argument("blowup_charts: need at least two variables");
    std::vector<BlowupChart> charts;
    for (int i = 0; i < n; ++i) charts.push_back({i, f.substitute_and_drop(i, Rational(1)), *d, n - 1});
    return charts;
}

inline ResolutionDatum resolution_from_charts(const std::vector<BlowupChart>& charts)
{
    ResolutionDatum data;
    for (const auto& c : charts) data.push_back({c.f_multiplicity, c.jacobian_multiplicity});
    return data;
}

/// Sampled nonnegativity of f on [-1,1]^n; exact when every term is an even
/// monomial with positive coefficient.
inline bool likely_nonnegative(const Polynomial& f, int samples = 20000, std::uint64_t seed = 7)
{
    bool sos_monomials = true;
    for (const auto& [nu, c] : f.terms()) {
        if (c < 0) sos_monomials = false;
        for (int e : nu)
            if (e % 2 != 0) sos_monomials = false;
    }
    if (sos_monomials) return true;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(f.dimension());
    for (int s = 0; s < samples; ++s) {
        for (auto& xi : x) xi = u(rng);
        if (f.value<double>(x) < -1e-14) return false;
    }
    return true;
}

/// rlct = n/d for a convenient homogeneous polynomial of degree d.
inline RlctReport rlct_homogeneous(const Polynomial& f, const NondegeneracyOptions& opts = {})
{
    if (f.is_zero()) throw std::invalid_argument("rlct_homogeneous: zero polynomial");
    const auto d = f.homogeneous_degree();
    if (!d) throw std::invalid_argument("rlct_homogeneous: polynomial is not homogeneous");
    const auto poly = build_polytope(f);
    if (!is_convenient(poly).convenient) throw std::invalid_argument("rlct_homogeneous: polynomial is not convenient");
    RlctReport rep;
    rep.method = RlctMethod::homogeneous;
    rep.dimension = f.dimension();
    rep.degree = *d;
    rep.value = Rational(f.dimension(), *d);
    rep.convenient = true;
    rep.homogeneous = true;
    rep.likely_R_nondegenerate = check_R_nondegenerate(f, opts).status == DegeneracyStatus::likely_nondegenerate;
    rep.value_at_most_one = rep.value <= 1;
    return rep;
}

/// Candidate rlct 1/t0 read off the principal faces, with their parity data.
/// Reported, not asserted: its meaning depends on nondegeneracy and nonnegativity.
inline RlctReport rlct_newton_candidate(const Polynomial& f, const NondegeneracyOptions& opts = {})
{
    const auto poly = build_polytope(f);
    if (!is_convenient(poly).convenient)
        throw std::invalid_argument("rlct_newton_candidate: polynomial is not convenient");
    const auto nd = newton_distance(poly);
    RlctReport rep;
    rep.method = RlctMethod::newton_candidate;
    rep.dimension = f.dimension();
    rep.value = 1 / nd.t0;
    rep.convenient = true;
    const auto d = f.homogeneous_degree();
    rep.homogeneous = d.has_value();
    if (d) rep.degree = *d;
    rep.likely_R_nondegenerate = check_R_nondegenerate(f, opts).status == DegeneracyStatus::likely_nondegenerate;
    rep.value_at_most_one = rep.value <= 1;
    rep.below_one_strict = rep.value < 1;
    rep.likely_nonnegative = likely_nonnegative(f);
    rep.candidate_only = true;
    for (const auto& face : nd.principal) {
        FaceParity fp;
        fp.weights = face.weights;
        fp.d = face.denominator;
        fp.r = numerator_of(face.r_value);
        fp.d_even = fp.d % 2 == 0;
        fp.r_odd = fp.r % 2 != 0;
        rep.principal_faces.push_back(std::move(fp));
    }
    return rep;
}

inline RlctReport rlct_from_resolution(const ResolutionDatum& data, int dimension)
{
    RlctReport rep;
    rep.method = RlctMethod::resolution;
    rep.dimension = dimension;
    rep.value = gamma_from_resolution(data);
    rep.value_at_most_one = rep.value <= 1;
    return rep;
}

} // namespace oscillab

#endif // OSCILLAB_RLCT_HPP
