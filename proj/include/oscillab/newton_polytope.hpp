#ifndef OSCILLAB_NEWTON_POLYTOPE_HPP
#define OSCILLAB_NEWTON_POLYTOPE_HPP

/*
 * Newton polyhedra Gamma_+ = conv(support) + R_{>=0}^n in dimension n <= 4.
 *
 * Everything here is exact. Facets are enumerated by brute force: every
 * hyperplane spanned by n candidates (support points and coordinate rays) is
 * tested as a supporting hyperplane. Only facets with a positive right-hand
 * side are stored, normalized as l(nu) = sum w_i nu_i = 1; the remaining
 * facets of Gamma_+ are coordinate hyperplanes and are implied by nu >= 0.
 *
 * The half-space radius r (Gamma_+(f) contains {|nu| >= r}) is the largest
 * axis intercept: the slice {|nu| = r, nu >= 0} is the simplex with extreme
 * points r e_i, each of which dominates c_i e_i when r >= max c_i, and the
 * axis point r e_i lies outside Gamma_+ when r < c_i.
 */

#include "oscillab/polynomial.hpp"
#include "oscillab/rational.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

using RationalVector = std::vector<Rational>;

/// Supporting functional l of a facet, normalized so that the facet is l = 1.
struct FaceFunctional
{
    RationalVector weights;
    BigInt denominator;   ///< d_j: LCM of the weight denominators
    Rational diag_value;  ///< l(1,...,1)
    Rational r_value;     ///< r_j = d_j * l(1,...,1)
    bool compact = false; ///< all weights strictly positive

    static FaceFunctional from_weights(RationalVector w)
    {
        FaceFunctional f;
        f.denominator = lcm_of_denominators(w);
        f.diag_value = std::accumulate(w.begin(), w.end(), Rational(0));
        f.r_value = Rational(f.denominator) * f.diag_value;
        f.compact = std::all_of(w.begin(), w.end(), [](const Rational& x) { return x > 0; });
        f.weights = std::move(w);
        return f;
    }

    Rational operator()(const ExponentVector& nu) const
    {
        Rational s = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * nu[i];
        return s;
    }

    Rational operator()(const RationalVector& nu) const
    {
        Rational s = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * nu[i];
        return s;
    }
};

/// A face of Gamma_+: supporting weights (minimum value 1 on the face) and the
/// support points lying on it.
struct FaceDescriptor
{
    RationalVector weights;
    std::vector<ExponentVector> incident;
    std::vector<ExponentVector> vertices;
    int dimension = 0;
};

class NewtonPolytope;
inline NewtonPolytope build_polytope(const std::vector<ExponentVector>& support);

class NewtonPolytope
{
public:
    int dimension() const { return n_; }
    /// Vertices of Gamma_+ (minimal, pairwise incomparable exponent vectors).
    const std::vector<ExponentVector>& generators() const { return generators_; }
    /// Facets with positive right-hand side, in lexicographic weight order.
    const std::vector<FaceFunctional>& facets() const { return facets_; }
    /// Distinct support points the polytope was built from.
    const std::vector<ExponentVector>& support_points() const { return support_; }

    bool contains(const RationalVector& point) const
    {
        for (const auto& x : point)
            if (x < 0) return false;
        for (const auto& f : facets_)
            if (f(point) < 1) return false;
        return true;
    }

    bool contains(const ExponentVector& point) const
    {
        RationalVector q(point.begin(), point.end());
        return contains(q);
    }

private:
    int n_ = 0;
    std::vector<ExponentVector> generators_;
    std::vector<FaceFunctional> facets_;
    std::vector<ExponentVector> support_;

    friend NewtonPolytope build_polytope(const std::vector<ExponentVector>& support);
};

namespace detail {

/// Exact solve of a square system; nullopt when singular.
inline std::optional<RationalVector> solve_exact(std::vector<RationalVector> a, RationalVector b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const Rational factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    RationalVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

inline int rank_exact(std::vector<RationalVector> rows)
{
    if (rows.empty()) return 0;
    const std::size_t cols = rows.front().size();
    int rank = 0;
    for (std::size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<std::size_t>(rank) || rows[r][col] == 0) continue;
            const Rational factor = rows[r][col] / rows[rank][col];
            for (std::size_t k = col; k < cols; ++k) rows[r][k] -= factor * rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

/// Affine dimension of a point set.
inline int affine_dimension(const std::vector<ExponentVector>& pts)
{
    if (pts.size() <= 1) return 0;
    std::vector<RationalVector> diffs;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        RationalVector d(pts[i].size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = pts[i][k] - pts[0][k];
        diffs.push_back(std::move(d));
    }
    return rank_exact(std::move(diffs));
}

inline bool dominates(const ExponentVector& q, const ExponentVector& p)
{
    for (std::size_t i = 0; i < p.size(); ++i)
        if (q[i] < p[i]) return false;
    return true;
}

/// Calls visit(indices) for every k-subset of {0..m-1} in lexicographic order.
template <typename Visit>
void for_each_subset(int m, int k, Visit visit)
{
    if (k > m || k < 0) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        visit(static_cast<const std::vector<int>&>(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Constraint normals of the full H-description: stored facets, then e_i.
struct Constraint
{
    RationalVector normal;
    Rational rhs;
};

inline std::vector<Constraint> all_constraints(const NewtonPolytope& p)
{
    std::vector<Constraint> out;
    for (const auto& f : p.facets()) out.push_back({f.weights, Rational(1)});
    for (int i = 0; i < p.dimension(); ++i) {
        RationalVector e(p.dimension(), Rational(0));
        e[i] = 1;
        out.push_back({e, Rational(0)});
    }
    return out;
}

inline Rational dot(const RationalVector& w, const ExponentVector& nu)
{
    Rational s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * nu[i];
    return s;
}

} // namespace detail

/// Builds Gamma_+ of a finite support set.
inline NewtonPolytope build_polytope(const std::vector<ExponentVector>& support)
{
    if (support.empty()) throw std::invalid_argument("build_polytope: empty support");
    const int n = static_cast<int>(support.front().size());
    if (n < 1 || n > 4) throw std::invalid_argument("build_polytope: dimension must be in [1,4]");
    for (const auto& nu : support) {
        if (static_cast<int>(nu.size()) != n) throw std::invalid_argument("build_polytope: mixed dimensions");
        for (int e : nu)
            if (e < 0) throw std::invalid_argument("build_polytope: negative exponent");
    }

    NewtonPolytope poly;
    poly.n_ = n;
    std::set<ExponentVector> distinct(support.begin(), support.end());
    poly.support_.assign(distinct.begin(), distinct.end());

    std::vector<ExponentVector> minimal;
    for (const auto& p : poly.support_) {
        bool dominated = false;
        for (const auto& q : poly.support_)
            if (q != p && detail::dominates(p, q)) {
                dominated = true;
                break;
            }
        if (!dominated) minimal.push_back(p);
    }

    // Candidates 0..m-1 are points, m..m+n-1 are the rays e_i.
    const int m = static_cast<int>(minimal.size());
    std::set<RationalVector> seen;
    detail::for_each_subset(m + n, n, [&](const std::vector<int>& idx) {
        if (idx.front() >= m) return; // needs at least one point
        std::vector<RationalVector> a;
        RationalVector b;
        for (int k : idx) {
            RationalVector row(n, Rational(0));
            if (k < m) {
                for (int i = 0; i < n; ++i) row[i] = minimal[k][i];
                b.push_back(1);
            } else {
                row[k - m] = 1;
                b.push_back(0);
            }
            a.push_back(std::move(row));
        }
        auto w = detail::solve_exact(std::move(a), std::move(b));
        if (!w) return;
        for (const auto& x : *w)
            if (x < 0) return;
        for (const auto& p : minimal)
            if (detail::dot(*w, p) < 1) return;
        seen.insert(*w);
    });
    for (const auto& w : seen) poly.facets_.push_back(FaceFunctional::from_weights(w));

    for (const auto& p : minimal) {
        std::vector<RationalVector> active;
        for (const auto& f : poly.facets_)
            if (f(p) == 1) active.push_back(f.weights);
        for (int i = 0; i < n; ++i)
            if (p[i] == 0) {
                RationalVector e(n, Rational(0));
                e[i] = 1;
                active.push_back(e);
            }
        if (detail::rank_exact(active) == n) poly.generators_.push_back(p);
    }
    return poly;
}

inline NewtonPolytope build_polytope(const Polynomial& p)
{
    if (p.is_zero()) throw std::invalid_argument("build_polytope: zero polynomial has empty support");
    return build_polytope(p.support());
}

/// Vertices of {nu >= 0 : l_j(nu) >= 1 for all facets j}, recomputed from the
/// inequalities alone. Equals generators() for a consistent polytope.
inline std::vector<ExponentVector> regenerate_generators(const NewtonPolytope& p)
{
    const auto cons = detail::all_constraints(p);
    const int n = p.dimension();
    std::set<RationalVector> verts;
    detail::for_each_subset(static_cast<int>(cons.size()), n, [&](const std::vector<int>& idx) {
        std::vector<RationalVector> a;
        RationalVector b;
        for (int k : idx) {
            a.push_back(cons[k].normal);
            b.push_back(cons[k].rhs);
        }
        auto x = detail::solve_exact(std::move(a), std::move(b));
        if (x && p.contains(*x)) verts.insert(*x);
    });
    std::vector<ExponentVector> out;
    for (const auto& v : verts) {
        ExponentVector nu(n);
        for (int i = 0; i < n; ++i) {
            if (denominator_of(v[i]) != 1)
                throw std::logic_error("regenerate_generators: non-integral vertex");
            nu[i] = numerator_of(v[i]).convert_to<int>();
        }
        out.push_back(std::move(nu));
    }
    return out;
}

struct ConvenienceResult
{
    bool convenient = false;
    std::vector<int> intercepts; ///< c_i, filled only when convenient
};

inline ConvenienceResult is_convenient(const NewtonPolytope& p)
{
    ConvenienceResult res;
    std::vector<int> c(p.dimension(), -1);
    for (const auto& g : p.generators()) {
        int nonzero = -1, count = 0;
        for (int i = 0; i < p.dimension(); ++i)
            if (g[i] != 0) {
                nonzero = i;
                ++count;
            }
        if (count == 0) std::fill(c.begin(), c.end(), 0);
        else if (count == 1 && (c[nonzero] < 0 || g[nonzero] < c[nonzero])) c[nonzero] = g[nonzero];
    }
    res.convenient = std::all_of(c.begin(), c.end(), [](int x) { return x >= 0; });
    if (res.convenient) res.intercepts = std::move(c);
    return res;
}

inline void require_convenient(const NewtonPolytope& p, const char* where)
{
    if (!is_convenient(p).convenient) throw std::invalid_argument(std::string(where) + ": polytope is not convenient");
}

/// Compact faces of all dimensions 0..n-1, ordered by dimension then vertices.
inline std::vector<FaceDescriptor> compact_faces(const NewtonPolytope& p)
{
    require_convenient(p, "compact_faces");
    const int n = p.dimension();
    const auto cons = detail::all_constraints(p);
    const auto& verts = p.generators();

    auto tight = [&](const detail::Constraint& c) {
        std::set<int> s;
        for (int v = 0; v < static_cast<int>(verts.size()); ++v)
            if (detail::dot(c.normal, verts[v]) == c.rhs) s.insert(v);
        return s;
    };
    std::vector<std::set<int>> tight_sets;
    for (const auto& c : cons) tight_sets.push_back(tight(c));

    std::set<std::set<int>> faces;
    std::vector<std::set<int>> queue;
    for (std::size_t j = 0; j < p.facets().size(); ++j) {
        if (!p.facets()[j].compact) continue;
        if (faces.insert(tight_sets[j]).second) queue.push_back(tight_sets[j]);
    }
    while (!queue.empty()) {
        const std::set<int> face = queue.back();
        queue.pop_back();
        for (const auto& ts : tight_sets) {
            std::set<int> inter;
            std::set_intersection(face.begin(), face.end(), ts.begin(), ts.end(), std::inserter(inter, inter.begin()));
            if (!inter.empty() && faces.insert(inter).second) queue.push_back(inter);
        }
    }

    std::vector<FaceDescriptor> out;
    for (const auto& face : faces) {
        FaceDescriptor fd;
        for (int v : face) fd.vertices.push_back(verts[v]);
        fd.dimension = detail::affine_dimension(fd.vertices);
        RationalVector w(n, Rational(0));
        for (std::size_t c = 0; c < cons.size(); ++c) {
            if (!std::includes(tight_sets[c].begin(), tight_sets[c].end(), face.begin(), face.end())) continue;
            for (int i = 0; i < n; ++i) w[i] += cons[c].normal[i];
        }
        const Rational value = detail::dot(w, fd.vertices.front());
        for (auto& x : w) x /= value;
        fd.weights = w;
        for (const auto& s : p.support_points())
            if (detail::dot(w, s) == 1) fd.incident.push_back(s);
        out.push_back(std::move(fd));
    }
    std::sort(out.begin(), out.end(), [](const FaceDescriptor& a, const FaceDescriptor& b) {
        if (a.dimension != b.dimension) return a.dimension < b.dimension;
        return a.vertices < b.vertices;
    });
    return out;
}

/// Face of Gamma_+ supported by the given nonnegative weights.
inline FaceDescriptor face_from_weights(const NewtonPolytope& p, RationalVector w)
{
    if (static_cast<int>(w.size()) != p.dimension()) throw std::invalid_argument("face_from_weights: dimension");
    if (std::any_of(w.begin(), w.end(), [](const Rational& x) { return x < 0; }) ||
        std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; }))
        throw std::invalid_argument("face_from_weights: weights must be nonnegative and not all zero");
    Rational lo = detail::dot(w, p.support_points().front());
    for (const auto& s : p.support_points()) lo = std::min(lo, detail::dot(w, s));
    if (lo <= 0) throw std::invalid_argument("face_from_weights: face touches a coordinate hyperplane at level 0");
    for (auto& x : w) x /= lo;
    FaceDescriptor fd;
    fd.weights = w;
    for (const auto& s : p.support_points())
        if (detail::dot(w, s) == 1) fd.incident.push_back(s);
    for (const auto& g : p.generators())
        if (detail::dot(w, g) == 1) fd.vertices.push_back(g);
    fd.dimension = detail::affine_dimension(fd.vertices);
    return fd;
}

/// Face polynomial f_sigma: the terms of p whose exponents lie on the face.
inline Polynomial restrict_to_face(const Polynomial& p, const FaceDescriptor& face)
{
    if (p.is_zero()) throw std::invalid_argument("restrict_to_face: zero polynomial");
    if (static_cast<int>(face.weights.size()) != p.dimension())
        throw std::invalid_argument("restrict_to_face: dimension mismatch");
    Rational lo = detail::dot(face.weights, p.terms().begin()->first);
    for (const auto& [nu, c] : p.terms()) lo = std::min(lo, detail::dot(face.weights, nu));
    if (lo != 1) throw std::invalid_argument("restrict_to_face: face is not a face of the polynomial's Newton polytope");
    for (const auto& nu : face.incident)
        if (p.coefficient(nu) == 0)
            throw std::invalid_argument("restrict_to_face: face is not a face of the polynomial's Newton polytope");
    return p.filter_terms([&](const ExponentVector& nu) { return detail::dot(face.weights, nu) == 1; });
}

struct NewtonDistance
{
    Rational t0;
    std::vector<FaceFunctional> principal; ///< facets through t0*(1,...,1)
};

inline NewtonDistance newton_distance(const NewtonPolytope& p)
{
    require_convenient(p, "newton_distance");
    if (p.facets().empty()) throw std::invalid_argument("newton_distance: polytope contains the origin");
    Rational best = p.facets().front().diag_value;
    for (const auto& f : p.facets()) best = std::min(best, f.diag_value);
    NewtonDistance nd;
    nd.t0 = 1 / best;
    for (const auto& f : p.facets())
        if (f.diag_value == best) nd.principal.push_back(f);
    return nd;
}

struct PairDistance
{
    Rational distance;  ///< d(f,phi)
    Rational r;         ///< Gamma_+(f) contains {|nu| >= r}
    Rational r_prime;   ///< Gamma_+(phi) is contained in {|nu| >= r'}
    Rational bound;     ///< r / (r' + n)
};

/// d(f,phi) = min{d : d (Gamma_+(phi) + 1) in Gamma_+(f)} with the radii r, r'.
inline PairDistance pair_distance_and_radii(const NewtonPolytope& pf, const NewtonPolytope& pphi)
{
    const auto conv = is_convenient(pf);
    if (!conv.convenient) throw std::invalid_argument("pair_distance_and_radii: f polytope is not convenient");
    if (pf.dimension() != pphi.dimension()) throw std::invalid_argument("pair_distance_and_radii: dimensions differ");
    if (pf.facets().empty()) throw std::invalid_argument("pair_distance_and_radii: f polytope contains the origin");
    const int n = pf.dimension();
    PairDistance out;
    out.distance = 0;
    for (const auto& g : pphi.generators()) {
        ExponentVector shifted = g;
        for (auto& e : shifted) e += 1;
        for (const auto& f : pf.facets()) out.distance = std::max(out.distance, Rational(1) / f(shifted));
    }
    out.r = *std::max_element(conv.intercepts.begin(), conv.intercepts.end());
    out.r_prime = total_degree(pphi.generators().front());
    for (const auto& g : pphi.generators()) out.r_prime = std::min(out.r_prime, Rational(total_degree(g)));
    out.bound = out.r / (out.r_prime + n);
    return out;
}

} // namespace oscillab

#endif // OSCILLAB_NEWTON_POLYTOPE_HPP
