#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmpce/conformal.hpp"
#include "cmpce/errors.hpp"

namespace cmpce {

/// Probability density on [-1,1].
///
/// Three kinds are supported: uniform, beta with
/// rho(y) ~ (1-y)^(alpha-1) (1+y)^(beta-1), and the pullback
/// g'(s) rho(g(s)) of another density through a conformal map.
///
/// Every density factors as (1-y)^a (1+y)^b times a smooth positive part;
/// `endpoint_exponents()` and `regular_part()` expose that split, which the
/// recurrence construction uses to discretize inner products accurately.
class UnivariateDensity {
public:
    struct Uniform {};
    struct Beta {
        double alpha;
        double beta;
    };
    struct Transformed {
        std::shared_ptr<const UnivariateDensity> base;
        ConformalMap1D map;
    };
    using Kind = std::variant<Uniform, Beta, Transformed>;

    UnivariateDensity() : kind_(Uniform{}) {}

    static UnivariateDensity uniform() { return {}; }

    static UnivariateDensity beta(double alpha, double beta) {
        if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
            throw ArgumentError("beta shape parameters must be positive and finite");
        return UnivariateDensity(Beta{alpha, beta});
    }

    /// g'(s) base(g(s)) without the identity shortcut of `transform_density`.
    static UnivariateDensity pullback(const UnivariateDensity& base, const ConformalMap1D& g) {
        return UnivariateDensity(Transformed{std::make_shared<const UnivariateDensity>(base), g});
    }

    const Kind& kind() const noexcept { return kind_; }
    bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(kind_); }
    bool is_beta() const noexcept { return std::holds_alternative<Beta>(kind_); }
    bool is_transformed() const noexcept { return std::holds_alternative<Transformed>(kind_); }

    double pdf(double y) const {
        if (!(y >= -1.0 && y <= 1.0))
            throw DomainError("density evaluated at " + std::to_string(y) + ", outside [-1,1]");
        if (is_uniform()) return 0.5;
        if (const auto* b = std::get_if<Beta>(&kind_)) {
            return std::exp(log_beta_normalizer(*b)) * std::pow(1.0 - y, b->alpha - 1.0) *
                   std::pow(1.0 + y, b->beta - 1.0);
        }
        const auto& t = std::get<Transformed>(kind_);
        return t.base->pdf(t.map.forward(y)) * t.map.derivative(y);
    }

    /// Exponents (a, b) such that pdf(y) = (1-y)^a (1+y)^b * regular_part(y).
    std::pair<double, double> endpoint_exponents() const {
        if (is_uniform()) return {0.0, 0.0};
        if (const auto* b = std::get_if<Beta>(&kind_)) return {b->alpha - 1.0, b->beta - 1.0};
        return std::get<Transformed>(kind_).base->endpoint_exponents();
    }

    /// Smooth positive factor of the density; see `endpoint_exponents()`.
    double regular_part(double y) const {
        if (!(y >= -1.0 && y <= 1.0))
            throw DomainError("density evaluated at " + std::to_string(y) + ", outside [-1,1]");
        if (is_uniform()) return 0.5;
        if (const auto* b = std::get_if<Beta>(&kind_)) return std::exp(log_beta_normalizer(*b));
        // (1-g)^a (1+g)^b = (1-s)^a (1+s)^b * q_upper^a * q_lower^b
        const auto& t = std::get<Transformed>(kind_);
        const auto [a, b] = endpoint_exponents();
        const auto [upper, lower] = t.map.endpoint_quotients(y);
        double value = t.base->regular_part(t.map.forward(y)) * t.map.derivative(y);
        if (a != 0.0) value *= std::pow(upper, a);
        if (b != 0.0) value *= std::pow(lower, b);
        return value;
    }

    /// Draws one value; `Stream` is any generator satisfying
    /// UniformRandomBitGenerator with 64-bit output.
    template <typename Stream>
    double draw(Stream& stream) const;

    std::string describe() const {
        if (is_uniform()) return "uniform";
        if (const auto* b = std::get_if<Beta>(&kind_))
            return "beta(" + std::to_string(b->alpha) + "," + std::to_string(b->beta) + ")";
        const auto& t = std::get<Transformed>(kind_);
        return "transformed(" + t.base->describe() + "," + t.map.name() + ")";
    }

    friend bool operator==(const UnivariateDensity& a, const UnivariateDensity& b) {
        if (a.kind_.index() != b.kind_.index()) return false;
        if (a.is_uniform()) return true;
        if (a.is_beta()) {
            const auto& x = std::get<Beta>(a.kind_);
            const auto& y = std::get<Beta>(b.kind_);
            return x.alpha == y.alpha && x.beta == y.beta;
        }
        const auto& x = std::get<Transformed>(a.kind_);
        const auto& y = std::get<Transformed>(b.kind_);
        return x.map == y.map && *x.base == *y.base;
    }

private:
    explicit UnivariateDensity(Kind kind) : kind_(std::move(kind)) {}

    static double log_beta_normalizer(const Beta& b) {
        // 1 / (2^(alpha+beta-1) B(alpha, beta))
        return -((b.alpha + b.beta - 1.0) * std::log(2.0) + std::lgamma(b.alpha) + std::lgamma(b.beta) -
                 std::lgamma(b.alpha + b.beta));
    }

    Kind kind_;
};

/// Pullback g'(s) d(g(s)). The identity map returns `d` itself.
inline UnivariateDensity transform_density(const UnivariateDensity& d, const ConformalMap1D& g) {
    if (g.is_identity()) return d;
    return UnivariateDensity::pullback(d, g);
}

namespace detail {

// Conversions from raw 64-bit output are written out here rather than taken
// from <random> distributions, whose algorithms are implementation-defined.

template <typename Stream>
double open_unit(Stream& stream) {
    return (static_cast<double>(stream() >> 11) + 0.5) * 0x1.0p-53;
}

// Marsaglia polar method
template <typename Stream>
double standard_normal(Stream& stream) {
    for (;;) {
        const double u = 2.0 * open_unit(stream) - 1.0;
        const double v = 2.0 * open_unit(stream) - 1.0;
        const double q = u * u + v * v;
        if (q > 0.0 && q < 1.0) return u * std::sqrt(-2.0 * std::log(q) / q);
    }
}

// Marsaglia-Tsang; shapes below one are boosted by U^(1/shape).
template <typename Stream>
double standard_gamma(Stream& stream, double shape) {
    if (shape < 1.0) {
        const double boost = std::pow(open_unit(stream), 1.0 / shape);
        return standard_gamma(stream, shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = standard_normal(stream);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = open_unit(stream);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace detail

template <typename Stream>
double UnivariateDensity::draw(Stream& stream) const {
    if (is_uniform()) return 2.0 * detail::open_unit(stream) - 1.0;
    if (const auto* b = std::get_if<Beta>(&kind_)) {
        // (1+y)/2 ~ Beta(beta, alpha) under the (1-y)^(alpha-1) (1+y)^(beta-1) convention
        const double gb = detail::standard_gamma(stream, b->beta);
        const double ga = detail::standard_gamma(stream, b->alpha);
        const double y = 2.0 * gb / (ga + gb) - 1.0;
        return std::clamp(y, -1.0, 1.0);
    }
    const auto& t = std::get<Transformed>(kind_);
    return t.map.inverse(t.base->draw(stream));
}

/// Product density of independent factors.
class JointDensity {
public:
    JointDensity() = default;
    explicit JointDensity(std::vector<UnivariateDensity> factors) : factors_(std::move(factors)) {}

    static JointDensity iid(const UnivariateDensity& d, std::size_t dimension) {
        return JointDensity(std::vector<UnivariateDensity>(dimension, d));
    }

    std::size_t dimension() const noexcept { return factors_.size(); }
    const UnivariateDensity& operator[](std::size_t i) const { return factors_.at(i); }
    std::span<const UnivariateDensity> factors() const noexcept { return factors_; }

    double pdf(std::span<const double> y) const {
        if (y.size() != factors_.size()) throw ArgumentError("point dimension mismatch");
        double value = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i) value *= factors_[i].pdf(y[i]);
        return value;
    }

    JointDensity transformed(const MultivariateMap& g) const {
        if (g.dimension() != factors_.size()) throw ArgumentError("map and density dimensions differ");
        std::vector<UnivariateDensity> out;
        out.reserve(factors_.size());
        for (std::size_t i = 0; i < factors_.size(); ++i) out.push_back(transform_density(factors_[i], g[i]));
        return JointDensity(std::move(out));
    }

private:
    std::vector<UnivariateDensity> factors_;
};

/// `n` i.i.d. draws from `d`, generated by std::mt19937_64 seeded with `seed`.
/// Points are drawn in order, coordinates in order within each point.
inline std::vector<std::vector<double>> sample(const JointDensity& d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ArgumentError("sample count must be at least 1");
    std::mt19937_64 stream(seed);
    std::vector<std::vector<double>> points(n, std::vector<double>(d.dimension()));
    for (auto& p : points)
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = d[i].draw(stream);
    return points;
}

}  // namespace cmpce
