#ifndef OSCILLAB_NONDEGENERACY_HPP
#define OSCILLAB_NONDEGENERACY_HPP

/*
 * Heuristic search for Newton-degeneracy witnesses.
 *
 * For every compact face sigma the face polynomial f_sigma is quasi-homogeneous
 * with the face weights w: f_sigma(t^w x) = t f_sigma(x). The residual
 *
 *     R(x) = sum_i (x_i d_i f_sigma(x))^2 / (sum_nu |a_nu x^nu|)^2
 *
 * is invariant under that action and vanishes on the torus exactly where the
 * gradient of f_sigma does, so it is minimized over log-coordinates
 * x_i = s_i exp(u_i) (or exp(u_i + i theta_i) over C) and the witness is
 * reported on the slice sum_i w_i u_i = 0.
 */

#include "oscillab/newton_polytope.hpp"
#include "oscillab/polynomial.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oscillab {

enum class NumberField { real, complex };
enum class DegeneracyStatus { likely_nondegenerate, degenerate };

inline const char* to_string(DegeneracyStatus s)
{
    return s == DegeneracyStatus::degenerate ? "degenerate" : "likely-nondegenerate";
}

struct NondegeneracyOptions
{
    int starts = 200;
    double torus_floor = 1e-3;
    double witness_threshold = 1e-12;
    int max_iterations = 200;
    std::uint64_t seed = 20240607;
};

struct DegeneracyWitness
{
    std::vector<std::complex<double>> point;
    double normalized_residual = 0.0; ///< R(x), scale invariant
    double gradient_residual = 0.0;   ///< sum_i |d_i f_sigma(x)|^2 at the reported point
};

struct NondegeneracyVerdict
{
    DegeneracyStatus status = DegeneracyStatus::likely_nondegenerate;
    NumberField field = NumberField::real;
    std::optional<DegeneracyWitness> witness;
    std::optional<FaceDescriptor> face;
    int faces_searched = 0;
    int starts = 0;
    double best_residual = std::numeric_limits<double>::infinity();
};

namespace detail {

struct FaceResidual
{
    const Polynomial& face_poly;
    NumberField field;

    /// x from log-parameters: real uses fixed signs, complex uses angles.
    std::vector<std::complex<double>> point(const Eigen::VectorXd& params, const std::vector<double>& signs) const
    {
        const int n = face_poly.dimension();
        std::vector<std::complex<double>> x(n);
        for (int i = 0; i < n; ++i) {
            if (field == NumberField::real)
                x[i] = signs[i] * std::exp(params[i]);
            else
                x[i] = std::polar(std::exp(params[i]), params[n + i]);
        }
        return x;
    }

    Eigen::VectorXd residual(const std::vector<std::complex<double>>& x) const
    {
        const int n = face_poly.dimension();
        auto [val, grad] = face_poly.value_and_gradient<std::complex<double>>(x);
        double norm = 0.0;
        for (const auto& t : face_poly.numeric_terms()) {
            double m = std::abs(t.coeff);
            for (int i = 0; i < n; ++i) m *= std::pow(std::abs(x[i]), t.exponent[i]);
            norm += m;
        }
        const int m = field == NumberField::real ? n : 2 * n;
        Eigen::VectorXd r(m);
        for (int i = 0; i < n; ++i) {
            const std::complex<double> e = x[i] * grad[i] / norm;
            r[i] = e.real();
            if (field == NumberField::complex) r[n + i] = e.imag();
        }
        return r;
    }
};

/// Levenberg-Marquardt with a central-difference Jacobian.
template <typename ResidualFn>
Eigen::VectorXd levenberg_marquardt(ResidualFn fn, Eigen::VectorXd p, int max_iter, double bound)
{
    double lambda = 1e-3;
    Eigen::VectorXd r = fn(p);
    double cost = r.squaredNorm();
    const double h = 1e-7;
    for (int it = 0; it < max_iter && cost > 1e-30; ++it) {
        Eigen::MatrixXd jac(r.size(), p.size());
        for (int k = 0; k < p.size(); ++k) {
            Eigen::VectorXd pp = p, pm = p;
            pp[k] += h;
            pm[k] -= h;
            jac.col(k) = (fn(pp) - fn(pm)) / (2 * h);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd a = jtj;
            for (int k = 0; k < a.rows(); ++k) a(k, k) += lambda * (1.0 + jtj(k, k));
            Eigen::VectorXd step = a.ldlt().solve(-g);
            Eigen::VectorXd trial = p + step;
            for (int k = 0; k < trial.size(); ++k) trial[k] = std::clamp(trial[k], -bound, bound);
            Eigen::VectorXd rt = fn(trial);
            const double ct = rt.squaredNorm();
            if (std::isfinite(ct) && ct < cost) {
                p = trial;
                r = rt;
                cost = ct;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return p;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t face, std::uint64_t start)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(face), static_cast<std::uint32_t>(start)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

} // namespace detail

inline NondegeneracyVerdict check_nondegenerate(const Polynomial& f, NumberField field,
                                                const NondegeneracyOptions& opts = {})
{
    const NewtonPolytope poly = build_polytope(f);
    if (!is_convenient(poly).convenient)
        throw std::invalid_argument("nondegeneracy check requires a convenient polynomial");
    const int n = f.dimension();
    const double bound = -std::log(opts.torus_floor);

    NondegeneracyVerdict verdict;
    verdict.field = field;
    const auto faces = compact_faces(poly);
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const auto& face = faces[fi];
        const Polynomial fs = restrict_to_face(f, face);
        const detail::FaceResidual res{fs, field};
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = to_double(face.weights[i]);
        double ww = 0.0;
        for (double x : w) ww += x * x;
        ++verdict.faces_searched;

        for (int s = 0; s < opts.starts; ++s) {
            std::mt19937_64 rng(detail::mix_seed(opts.seed, fi, s));
            std::uniform_real_distribution<double> logu(-0.5 * bound, 0.5 * bound);
            std::uniform_real_distribution<double> angle(-M_PI, M_PI);
            std::vector<double> signs(n, 1.0);
            const int np = field == NumberField::real ? n : 2 * n;
            Eigen::VectorXd p(np);
            for (int i = 0; i < n; ++i) {
                p[i] = logu(rng);
                if (field == NumberField::real)
                    signs[i] = (rng() & 1u) ? 1.0 : -1.0;
                else
                    p[n + i] = angle(rng);
            }
            auto fn = [&](const Eigen::VectorXd& q) { return res.residual(res.point(q, signs)); };
            p = detail::levenberg_marquardt(fn, p, opts.max_iterations, 2.0 * bound);
            ++verdict.starts;

            // Move to the slice sum w_i u_i = 0; the residual is unchanged there.
            double wu = 0.0;
            for (int i = 0; i < n; ++i) wu += w[i] * p[i];
            for (int i = 0; i < n; ++i) p[i] -= wu / ww * w[i];
            const auto x = res.point(p, signs);
            const double rr = res.residual(x).squaredNorm();
            bool on_torus = true;
            for (const auto& xi : x)
                if (std::abs(xi) < opts.torus_floor || std::abs(xi) > 1.0 / opts.torus_floor) on_torus = false;
            if (!on_torus) continue;
            if (rr < verdict.best_residual) verdict.best_residual = rr;
            if (rr < opts.witness_threshold) {
                DegeneracyWitness wit;
                wit.point = x;
                wit.normalized_residual = rr;
                auto [val, grad] = fs.value_and_gradient<std::complex<double>>(x);
                for (const auto& g : grad) wit.gradient_residual += std::norm(g);
                verdict.status = DegeneracyStatus::degenerate;
                verdict.witness = wit;
                verdict.face = face;
                return verdict;
            }
        }
    }
    return verdict;
}

inline NondegeneracyVerdict check_R_nondegenerate(const Polynomial& f, const NondegeneracyOptions& opts = {})
{
    return check_nondegenerate(f, NumberField::real, opts);
}

inline NondegeneracyVerdict check_C_nondegenerate(const Polynomial& f, const NondegeneracyOptions& opts = {})
{
    return check_nondegenerate(f, NumberField::complex, opts);
}

} // namespace oscillab

#endif // OSCILLAB_NONDEGENERACY_HPP
