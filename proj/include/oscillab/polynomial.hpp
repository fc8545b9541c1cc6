#ifndef OSCILLAB_POLYNOMIAL_HPP
#define OSCILLAB_POLYNOMIAL_HPP

#include "oscillab/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oscillab {

/// Multi-index nu in N^n; entry i is the power of x_{i+1}.
using ExponentVector = std::vector<int>;

inline int total_degree(const ExponentVector& nu)
{
    int s = 0;
    for (int e : nu) s += e;
    return s;
}

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position)
    {
    }
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/**
 * Sparse real polynomial in x1..xn with exact rational coefficients.
 *
 * Zero coefficients are never stored. A double-precision copy of the terms is
 * kept for evaluation; the object is immutable once built.
 */
class Polynomial
{
public:
    using TermMap = std::map<ExponentVector, Rational>;

    struct NumericTerm
    {
        ExponentVector exponent;
        double coeff;
    };

    explicit Polynomial(int dimension = 1) : dim_(dimension)
    {
        if (dimension < 0) throw std::invalid_argument("polynomial dimension must be nonnegative");
    }

    Polynomial(int dimension, TermMap terms) : dim_(dimension)
    {
        if (dimension < 0) throw std::invalid_argument("polynomial dimension must be nonnegative");
        for (auto& [nu, c] : terms) {
            if (static_cast<int>(nu.size()) != dimension)
                throw std::invalid_argument("exponent vector length does not match dimension");
            for (int e : nu)
                if (e < 0) throw std::invalid_argument("negative exponent");
            if (c != 0) terms_.emplace(nu, c);
        }
        rebuild_cache();
    }

    static Polynomial constant(int dimension, const Rational& c)
    {
        return Polynomial(dimension, {{ExponentVector(dimension, 0), c}});
    }

    static Polynomial variable(int dimension, int index)
    {
        if (index < 0 || index >= dimension) throw std::out_of_range("variable index out of range");
        ExponentVector nu(dimension, 0);
        nu[index] = 1;
        return Polynomial(dimension, {{nu, Rational(1)}});
    }

    static Polynomial monomial(const ExponentVector& nu, const Rational& c = 1)
    {
        return Polynomial(static_cast<int>(nu.size()), {{nu, c}});
    }

    int dimension() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    const std::vector<NumericTerm>& numeric_terms() const { return numeric_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    std::vector<ExponentVector> support() const
    {
        std::vector<ExponentVector> out;
        out.reserve(terms_.size());
        for (const auto& [nu, c] : terms_) out.push_back(nu);
        return out;
    }

    Rational coefficient(const ExponentVector& nu) const
    {
        const auto it = terms_.find(nu);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    int degree() const
    {
        int d = 0;
        for (const auto& [nu, c] : terms_) d = std::max(d, total_degree(nu));
        return d;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b)
    {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        check_same_dimension(a, b);
        TermMap out = a.terms_;
        for (const auto& [nu, c] : b.terms_) out[nu] += c;
        return Polynomial(a.dim_, std::move(out));
    }

    friend Polynomial operator-(const Polynomial& a) { return a.scaled(Rational(-1)); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        check_same_dimension(a, b);
        TermMap out;
        for (const auto& [nu, c] : a.terms_) {
            for (const auto& [mu, e] : b.terms_) {
                ExponentVector s(nu.size());
                for (std::size_t i = 0; i < nu.size(); ++i) s[i] = nu[i] + mu[i];
                out[s] += c * e;
            }
        }
        return Polynomial(a.dim_, std::move(out));
    }

    Polynomial pow(unsigned k) const
    {
        Polynomial result = constant(dim_, 1);
        Polynomial base = *this;
        while (k > 0) {
            if (k & 1u) result = result * base;
            k >>= 1u;
            if (k > 0) base = base * base;
        }
        return result;
    }

    Polynomial scaled(const Rational& s) const
    {
        TermMap out;
        for (const auto& [nu, c] : terms_) out.emplace(nu, c * s);
        return Polynomial(dim_, std::move(out));
    }

    /// Value at a real or complex point.
    template <typename T>
    T value(std::span<const T> x) const
    {
        check_point(x.size());
        T acc(0);
        for (const auto& t : numeric_) acc += T(t.coeff) * monomial_value(t.exponent, x);
        return acc;
    }

    /// Value and all n partial derivatives.
    template <typename T>
    std::pair<T, std::vector<T>> value_and_gradient(std::span<const T> x) const
    {
        check_point(x.size());
        T val(0);
        std::vector<T> grad(dim_, T(0));
        std::vector<T> powers(dim_);
        for (const auto& t : numeric_) {
            for (int i = 0; i < dim_; ++i) powers[i] = int_pow(x[i], t.exponent[i]);
            T m(t.coeff);
            for (int i = 0; i < dim_; ++i) m *= powers[i];
            val += m;
            for (int i = 0; i < dim_; ++i) {
                const int e = t.exponent[i];
                if (e == 0) continue;
                T g = T(t.coeff * e) * int_pow(x[i], e - 1);
                for (int j = 0; j < dim_; ++j)
                    if (j != i) g *= powers[j];
                grad[i] += g;
            }
        }
        return {val, grad};
    }

    /// Partial derivative with respect to x_{i+1}, exact.
    Polynomial derivative(int i) const
    {
        if (i < 0 || i >= dim_) throw std::out_of_range("derivative index out of range");
        TermMap out;
        for (const auto& [nu, c] : terms_) {
            if (nu[i] == 0) continue;
            ExponentVector mu = nu;
            mu[i] -= 1;
            out[mu] += c * nu[i];
        }
        return Polynomial(dim_, std::move(out));
    }

    /// Pullback under x -> -x: each coefficient picks up (-1)^{|nu|}.
    Polynomial involution_pullback() const
    {
        TermMap out;
        for (const auto& [nu, c] : terms_) out.emplace(nu, total_degree(nu) % 2 == 0 ? c : Rational(-c));
        return Polynomial(dim_, std::move(out));
    }

    /// Common total degree of all terms, or nullopt when degrees are mixed.
    std::optional<int> homogeneous_degree() const
    {
        if (is_zero()) throw std::invalid_argument("homogeneous_degree of the zero polynomial");
        const int d = total_degree(terms_.begin()->first);
        for (const auto& [nu, c] : terms_)
            if (total_degree(nu) != d) return std::nullopt;
        return d;
    }

    /// Partial sum over the exponents accepted by `keep`.
    template <typename Pred>
    Polynomial filter_terms(Pred keep) const
    {
        TermMap out;
        for (const auto& [nu, c] : terms_)
            if (keep(nu)) out.emplace(nu, c);
        return Polynomial(dim_, std::move(out));
    }

    /// Sets x_{i+1} = value and removes that variable (dimension drops by one).
    Polynomial substitute_and_drop(int i, const Rational& value) const
    {
        if (i < 0 || i >= dim_) throw std::out_of_range("substitution index out of range");
        TermMap out;
        for (const auto& [nu, c] : terms_) {
            ExponentVector mu;
            mu.reserve(dim_ - 1);
            for (int j = 0; j < dim_; ++j)
                if (j != i) mu.push_back(nu[j]);
            Rational f = c;
            for (int k = 0; k < nu[i]; ++k) f *= value;
            out[mu] += f;
        }
        return Polynomial(dim_ - 1, std::move(out));
    }

    /// Coefficients (ascending powers) of the univariate polynomial in x_{axis+1}
    /// obtained by fixing every other coordinate to `point`.
    std::vector<double> collapse_to_axis(int axis, std::span<const double> point) const
    {
        check_point(point.size());
        int top = 0;
        for (const auto& t : numeric_) top = std::max(top, t.exponent[axis]);
        std::vector<double> coeffs(top + 1, 0.0);
        for (const auto& t : numeric_) {
            double c = t.coeff;
            for (int j = 0; j < dim_; ++j)
                if (j != axis) c *= int_pow(point[j], t.exponent[j]);
            coeffs[t.exponent[axis]] += c;
        }
        return coeffs;
    }

    /// Human-readable normal form accepted back by parse().
    std::string to_string() const
    {
        if (terms_.empty()) return "0";
        std::vector<std::pair<ExponentVector, Rational>> ordered(terms_.begin(), terms_.end());
        std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            const int da = total_degree(a.first), db = total_degree(b.first);
            if (da != db) return da > db;
            return a.first > b.first;
        });
        std::string out;
        bool first = true;
        for (const auto& [nu, c] : ordered) {
            const bool negative = c < 0;
            const Rational mag = negative ? Rational(-c) : c;
            if (first) {
                if (negative) out += "-";
            } else {
                out += negative ? " - " : " + ";
            }
            first = false;
            std::string mono;
            for (int i = 0; i < dim_; ++i) {
                if (nu[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += "x" + std::to_string(i + 1);
                if (nu[i] > 1) mono += "^" + std::to_string(nu[i]);
            }
            if (mono.empty()) {
                out += oscillab::to_string(mag);
            } else if (mag == 1) {
                out += mono;
            } else {
                out += oscillab::to_string(mag) + "*" + mono;
            }
        }
        return out;
    }

private:
    int dim_;
    TermMap terms_;
    std::vector<NumericTerm> numeric_;

    void rebuild_cache()
    {
        numeric_.clear();
        numeric_.reserve(terms_.size());
        for (const auto& [nu, c] : terms_) numeric_.push_back({nu, to_double(c)});
    }

    void check_point(std::size_t n) const
    {
        if (static_cast<int>(n) != dim_)
            throw std::invalid_argument("point dimension " + std::to_string(n) + " does not match polynomial dimension " +
                                        std::to_string(dim_));
    }

    static void check_same_dimension(const Polynomial& a, const Polynomial& b)
    {
        if (a.dim_ != b.dim_) throw std::invalid_argument("polynomial dimensions differ");
    }

    template <typename T>
    static T int_pow(T x, int e)
    {
        T r(1);
        while (e > 0) {
            if (e & 1) r *= x;
            e >>= 1;
            if (e > 0) x *= x;
        }
        return r;
    }

    template <typename T>
    static T monomial_value(const ExponentVector& nu, std::span<const T> x)
    {
        T m(1);
        for (std::size_t i = 0; i < nu.size(); ++i) m *= int_pow(x[i], nu[i]);
        return m;
    }
};

/// Value and gradient at a real point.
inline std::pair<double, std::vector<double>> evaluate_and_gradient(const Polynomial& p, std::span<const double> point)
{
    return p.value_and_gradient<double>(point);
}

/// Horner evaluation of ascending coefficients.
inline double horner(const std::vector<double>& coeffs, double x)
{
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

namespace detail {

class PolynomialParser
{
public:
    PolynomialParser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    Polynomial run()
    {
        Polynomial p = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr()
    {
        skip_space();
        Polynomial acc(dim_);
        if (accept('-')) {
            acc = -term();
        } else {
            accept('+');
            acc = term();
        }
        for (;;) {
            if (accept('+'))
                acc = acc + term();
            else if (accept('-'))
                acc = acc - term();
            else
                break;
        }
        return acc;
    }

    Polynomial term()
    {
        Polynomial acc = factor();
        while (accept('*')) acc = acc * factor();
        return acc;
    }

    Polynomial factor()
    {
        Polynomial b = base();
        if (accept('^')) {
            skip_space();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent must be a nonnegative integer");
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/'))
                fail("exponent must be a nonnegative integer");
            const std::string digits = text_.substr(start, pos_ - start);
            if (digits.size() > 4) fail("exponent too large");
            b = b.pow(static_cast<unsigned>(std::stoul(digits)));
        }
        return b;
    }

    Polynomial base()
    {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (c == 'x') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected variable index after 'x'");
            const std::string digits = text_.substr(start, pos_ - start);
            const long idx = digits.size() > 6 ? 0 : std::stol(digits);
            if (idx < 1 || idx > dim_) {
                pos_ = start;
                fail("variable x" + digits + " outside x1..x" + std::to_string(dim_));
            }
            return Polynomial::variable(dim_, static_cast<int>(idx - 1));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '/') {
                ++pos_;
                const std::size_t den_start = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
                if (den_start == pos_) fail("expected denominator");
            }
            const std::string literal = text_.substr(start, pos_ - start);
            if (std::count(literal.begin(), literal.end(), '.') > 1) fail("malformed number '" + literal + "'");
            try {
                return Polynomial::constant(dim_, parse_rational(literal));
            } catch (const std::invalid_argument& e) {
                pos_ = start;
                fail(e.what());
            }
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }
};

} // namespace detail

/// Parses an expression over x1..xn into its expanded normal form.
inline Polynomial parse(const std::string& text, int dimension)
{
    if (dimension < 1) throw std::invalid_argument("dimension must be at least 1");
    return detail::PolynomialParser(text, dimension).run();
}

} // namespace oscillab

#endif // OSCILLAB_POLYNOMIAL_HPP
