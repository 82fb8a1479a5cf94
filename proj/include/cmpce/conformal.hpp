#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmpce/errors.hpp"

namespace cmpce {

/// An odd polynomial map of [-1,1] onto itself with g(+-1) = +-1.
///
/// The map is stored as normalized coefficients of s, s^3, s^5, ...; the
/// normalization divides by their sum so that g(1) = 1 holds by construction.
/// Construction validates strict monotonicity on a 1001-point grid.
class ConformalMap1D {
public:
    enum class Kind { identity, sausage9, custom };

    /// g(s) = s.
    ConformalMap1D() : ConformalMap1D(Kind::identity, {1.0}) {}

    static ConformalMap1D identity() { return {}; }

    /// Degree-9 normalized Taylor approximation of arcsin ("sausage" map).
    static ConformalMap1D sausage9() {
        return ConformalMap1D(Kind::sausage9, {40320.0, 6720.0, 3024.0, 1800.0, 1225.0});
    }

    /// Coefficients of s, s^3, s^5, ... before normalization.
    static ConformalMap1D odd_polynomial(std::vector<double> odd_coefficients) {
        return ConformalMap1D(Kind::custom, std::move(odd_coefficients));
    }

    Kind kind() const noexcept { return kind_; }
    bool is_identity() const noexcept { return kind_ == Kind::identity; }

    /// Normalized coefficients of s, s^3, s^5, ...
    std::span<const double> odd_coefficients() const noexcept { return odd_; }

    /// Unnormalized coefficients as given at construction.
    std::span<const double> raw_coefficients() const noexcept { return raw_; }

    std::string name() const {
        switch (kind_) {
            case Kind::identity: return "identity";
            case Kind::sausage9: return "sausage9";
            case Kind::custom: break;
        }
        return "custom";
    }

    double forward(double s) const {
        check_domain(s);
        if (is_identity()) return s;
        return horner(dense_, s);
    }

    double derivative(double s) const {
        check_domain(s);
        return horner(dense_derivative_, s);
    }

    /// Solves g(s) = y by Newton's method safeguarded with bisection on [-1,1].
    double inverse(double y) const {
        check_domain(y);
        if (is_identity() || y == 1.0 || y == -1.0 || y == 0.0) return y;

        constexpr double residual_tol = 1e-14;
        constexpr int max_iterations = 100;

        double lo = -1.0;
        double hi = 1.0;
        double s = y;  // g is close to the identity for useful maps
        for (int it = 0; it < max_iterations; ++it) {
            const double r = horner(dense_, s) - y;
            if (std::abs(r) <= residual_tol) return s;
            if (r > 0.0)
                hi = s;
            else
                lo = s;
            const double step = r / horner(dense_derivative_, s);
            double next = s - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (next == s || hi - lo <= 0.0) break;
            s = next;
        }
        const double r = horner(dense_, s) - y;
        if (std::abs(r) <= 1e-13) return s;
        throw NumericalError("conformal map inverse did not converge for y = " + std::to_string(y));
    }

    /// (1 - g(s)) / (1 - s) and (1 + g(s)) / (1 + s), evaluated without
    /// cancellation through exact polynomial division. Both are positive on [-1,1].
    std::pair<double, double> endpoint_quotients(double s) const {
        check_domain(s);
        return {horner(upper_quotient_, s), horner(lower_quotient_, s)};
    }

    friend bool operator==(const ConformalMap1D& a, const ConformalMap1D& b) {
        return a.kind_ == b.kind_ && a.raw_ == b.raw_;
    }

private:
    ConformalMap1D(Kind kind, std::vector<double> raw) : kind_(kind), raw_(std::move(raw)) {
        if (raw_.empty()) throw InvalidMapError("conformal map needs at least one coefficient");
        double sum = 0.0;
        for (double c : raw_) {
            if (!std::isfinite(c)) throw InvalidMapError("conformal map coefficient is not finite");
            sum += c;
        }
        if (!(sum > 0.0)) throw InvalidMapError("odd coefficients must sum to a positive value");

        odd_.reserve(raw_.size());
        for (double c : raw_) odd_.push_back(c / sum);

        const std::size_t degree = 2 * odd_.size() - 1;
        dense_.assign(degree + 1, 0.0);
        for (std::size_t k = 0; k < odd_.size(); ++k) dense_[2 * k + 1] = odd_[k];
        dense_derivative_.assign(degree, 0.0);
        for (std::size_t j = 1; j <= degree; ++j)
            dense_derivative_[j - 1] = static_cast<double>(j) * dense_[j];

        // 1 - g(s) = (1 - s) * q(s), 1 + g(s) = (1 + s) * r(s)
        std::vector<double> one_minus(dense_.size());
        std::vector<double> one_plus(dense_.size());
        for (std::size_t j = 0; j < dense_.size(); ++j) {
            one_minus[j] = -dense_[j];
            one_plus[j] = dense_[j];
        }
        one_minus[0] += 1.0;
        one_plus[0] += 1.0;
        upper_quotient_ = divide_by_linear(one_minus, 1.0);
        for (double& c : upper_quotient_) c = -c;
        lower_quotient_ = divide_by_linear(one_plus, -1.0);

        if (kind_ != Kind::identity) validate_monotone();
    }

    // Quotient of p(s) by (s - root); p is given in ascending powers.
    static std::vector<double> divide_by_linear(const std::vector<double>& p, double root) {
        const std::size_t n = p.size();
        std::vector<double> q(n - 1, 0.0);
        double carry = p[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) {
            q[j] = carry;
            carry = p[j] + root * carry;
        }
        return q;
    }

    void validate_monotone() const {
        constexpr int points = 1000;
        for (int i = 0; i <= points; ++i) {
            const double s = -1.0 + 2.0 * i / points;
            if (!(horner(dense_derivative_, s) > 0.0))
                throw InvalidMapError("conformal map is not strictly increasing on [-1,1] (g'(" +
                                      std::to_string(s) + ") <= 0)");
        }
    }

    static double horner(const std::vector<double>& p, double s) {
        double acc = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    static void check_domain(double s) {
        if (!(s >= -1.0 && s <= 1.0))
            throw DomainError("argument " + std::to_string(s) + " outside [-1,1]");
    }

    Kind kind_;
    std::vector<double> raw_;
    std::vector<double> odd_;
    std::vector<double> dense_;
    std::vector<double> dense_derivative_;
    std::vector<double> upper_quotient_;
    std::vector<double> lower_quotient_;
};

/// Coordinate-wise map (g_1(s_1), ..., g_N(s_N)).
class MultivariateMap {
public:
    MultivariateMap() = default;
    explicit MultivariateMap(std::vector<ConformalMap1D> maps) : maps_(std::move(maps)) {}

    static MultivariateMap uniform(const ConformalMap1D& g, std::size_t dimension) {
        return MultivariateMap(std::vector<ConformalMap1D>(dimension, g));
    }

    std::size_t dimension() const noexcept { return maps_.size(); }
    const ConformalMap1D& operator[](std::size_t i) const { return maps_.at(i); }
    std::span<const ConformalMap1D> maps() const noexcept { return maps_; }

    std::vector<double> forward(std::span<const double> s) const {
        check(s.size());
        std::vector<double> y(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) y[i] = maps_[i].forward(s[i]);
        return y;
    }

    std::vector<double> inverse(std::span<const double> y) const {
        check(y.size());
        std::vector<double> s(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) s[i] = maps_[i].inverse(y[i]);
        return s;
    }

private:
    void check(std::size_t n) const {
        if (n != maps_.size())
            throw ArgumentError("point has " + std::to_string(n) + " coordinates, map has " +
                                std::to_string(maps_.size()));
    }

    std::vector<ConformalMap1D> maps_;
};

}  // namespace cmpce
