#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmpce/density.hpp"
#include "cmpce/errors.hpp"

namespace cmpce {

/// Three-term recurrence data of the orthonormal family
///   sqrt(beta[k+1]) p_{k+1}(y) = (y - alpha[k]) p_k(y) - sqrt(beta[k]) p_{k-1}(y),
/// with p_0 = 1/sqrt(beta[0]) and beta[0] the total mass of the measure.
struct RecurrenceCoefficients {
    std::vector<double> alpha;
    std::vector<double> beta;

    std::size_t size() const noexcept { return alpha.size(); }
};

/// Closed form for the probability-normalized Jacobi weight (1-y)^a (1+y)^b.
/// Returns coefficients 0..max_degree.
inline RecurrenceCoefficients jacobi_recurrence(double a, double b, std::size_t max_degree) {
    if (!(a > -1.0) || !(b > -1.0)) throw ArgumentError("Jacobi exponents must exceed -1");
    RecurrenceCoefficients r;
    r.alpha.resize(max_degree + 1);
    r.beta.resize(max_degree + 1);
    const double ab = a + b;
    r.alpha[0] = (b - a) / (ab + 2.0);
    r.beta[0] = 1.0;
    for (std::size_t k = 1; k <= max_degree; ++k) {
        const double n = static_cast<double>(k);
        const double t = 2.0 * n + ab;
        r.alpha[k] = (b * b - a * a) / (t * (t + 2.0));
        if (k == 1)
            r.beta[k] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            r.beta[k] = 4.0 * n * (n + a) * (n + b) * (n + ab) / (t * t * (t + 1.0) * (t - 1.0));
    }
    return r;
}

/// Uniform density on [-1,1]: alpha = 0, beta[k] = k^2 / (4k^2 - 1).
inline RecurrenceCoefficients legendre_recurrence(std::size_t max_degree) {
    RecurrenceCoefficients r;
    r.alpha.assign(max_degree + 1, 0.0);
    r.beta.resize(max_degree + 1);
    r.beta[0] = 1.0;
    for (std::size_t k = 1; k <= max_degree; ++k) {
        const double n2 = static_cast<double>(k * k);
        r.beta[k] = n2 / (4.0 * n2 - 1.0);
    }
    return r;
}

struct GaussNodes {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss rule with `n` nodes from the Jacobi matrix of `r`.
///
/// Implicit QL iteration on the symmetric tridiagonal matrix, carrying only
/// the first component of each eigenvector, which is all the weights need
/// (weights = beta[0] * v_0^2). Nodes are returned in ascending order.
inline GaussNodes golub_welsch(const RecurrenceCoefficients& r, std::size_t n) {
    if (n == 0) throw ArgumentError("Gauss rule needs at least one node");
    if (r.size() < n)
        throw RangeError("recurrence has " + std::to_string(r.size()) + " coefficients, " +
                         std::to_string(n) + " needed");

    std::vector<double> d(r.alpha.begin(), r.alpha.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(r.beta[i + 1] > 0.0)) throw NumericalError("recurrence beta must be positive");
        e[i] = std::sqrt(r.beta[i + 1]);
    }
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;

    constexpr int max_sweeps = 60;
    const auto size = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t l = 0; l < size; ++l) {
        int iterations = 0;
        std::ptrdiff_t m;
        do {
            for (m = l; m < size - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) + dd == dd) break;
            }
            if (m == l) break;
            if (iterations++ == max_sweeps) throw NumericalError("Golub-Welsch eigen-solver did not converge");

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double rr = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(rr, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            std::ptrdiff_t i = m - 1;
            bool deflated = false;
            for (; i >= l; --i) {
                const double f = s * e[i];
                const double b = c * e[i];
                rr = std::hypot(f, g);
                e[i + 1] = rr;
                if (rr == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / rr;
                c = g / rr;
                g = d[i + 1] - p;
                rr = (d[i] - g) * s + 2.0 * c * b;
                p = s * rr;
                d[i + 1] = g + p;
                g = c * rr - b;
                const double zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (true);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    GaussNodes out;
    out.nodes.resize(n);
    out.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.nodes[k] = d[order[k]];
        out.weights[k] = r.beta[0] * z[order[k]] * z[order[k]];
    }
    // a symmetric measure gets an exactly symmetric rule
    if (std::all_of(r.alpha.begin(), r.alpha.begin() + static_cast<std::ptrdiff_t>(n), [](double a) { return a == 0.0; })) {
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double x = 0.5 * (out.nodes[n - 1 - k] - out.nodes[k]);
            const double w = 0.5 * (out.weights[n - 1 - k] + out.weights[k]);
            out.nodes[k] = -x;
            out.nodes[n - 1 - k] = x;
            out.weights[k] = out.weights[n - 1 - k] = w;
        }
        if (n % 2 == 1) out.nodes[n / 2] = 0.0;
    }
    return out;
}

namespace detail {

// Orthonormal Stieltjes (Lanczos-free) sweep over a discrete measure.
inline RecurrenceCoefficients discrete_stieltjes(std::span<const double> x, std::span<const double> w,
                                                 std::size_t max_degree) {
    const std::size_t m = x.size();
    RecurrenceCoefficients r;
    r.alpha.resize(max_degree + 1);
    r.beta.resize(max_degree + 1);

    double mass = 0.0;
    for (double wi : w) mass += wi;
    r.beta[0] = mass;

    std::vector<double> prev(m, 0.0);
    std::vector<double> cur(m, 1.0 / std::sqrt(mass));
    std::vector<double> next(m);
    for (std::size_t k = 0; k <= max_degree; ++k) {
        double a = 0.0;
        for (std::size_t i = 0; i < m; ++i) a += w[i] * x[i] * cur[i] * cur[i];
        r.alpha[k] = a;
        if (k == max_degree) break;
        const double sb = k == 0 ? 0.0 : std::sqrt(r.beta[k]);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            next[i] = (x[i] - a) * cur[i] - sb * prev[i];
            norm2 += w[i] * next[i] * next[i];
        }
        if (!(norm2 > 0.0)) throw NumericalError("Stieltjes procedure produced a non-positive beta");
        r.beta[k + 1] = norm2;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < m; ++i) next[i] *= inv;
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    return r;
}

// Discretization of `d` with `m` points: Gauss-Jacobi nodes for the endpoint
// factor of `d`, weights scaled by its regular part.
inline GaussNodes discretize(const UnivariateDensity& d, std::size_t m) {
    const auto [a, b] = d.endpoint_exponents();
    GaussNodes rule = golub_welsch(jacobi_recurrence(a, b, m - 1), m);
    const double log_mass = (a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                            std::lgamma(a + b + 2.0);
    const double mass = std::exp(log_mass);
    for (std::size_t i = 0; i < m; ++i) rule.weights[i] *= mass * d.regular_part(rule.nodes[i]);
    return rule;
}

}  // namespace detail

/// Discretized Stieltjes procedure for an arbitrary density, coefficients 0..max_degree.
///
/// The discretization doubles until every coefficient changes by less than
/// 1e-13; after 4096 points a change above 1e-12 is reported as an error.
inline RecurrenceCoefficients stieltjes(const UnivariateDensity& d, std::size_t max_degree) {
    constexpr double tolerance = 1e-13;
    constexpr double final_tolerance = 1e-12;
    constexpr std::size_t max_points = 4096;

    std::size_t m = 64;
    while (m < 2 * (max_degree + 1) + 32) m *= 2;
    auto rule = detail::discretize(d, m);
    RecurrenceCoefficients prev = detail::discrete_stieltjes(rule.nodes, rule.weights, max_degree);
    prev.beta[0] = 1.0;
    for (;;) {
        m *= 2;
        rule = detail::discretize(d, m);
        RecurrenceCoefficients cur = detail::discrete_stieltjes(rule.nodes, rule.weights, max_degree);
        cur.beta[0] = 1.0;  // total mass of a probability density
        double change = 0.0;
        for (std::size_t k = 0; k <= max_degree; ++k) {
            change = std::max(change, std::abs(cur.alpha[k] - prev.alpha[k]));
            change = std::max(change, std::abs(cur.beta[k] - prev.beta[k]));
        }
        if (change < tolerance || (m >= max_points && change < final_tolerance)) return cur;
        if (m >= max_points)
            throw NumericalError("Stieltjes discretization did not converge for " + d.describe() +
                                 " (change " + std::to_string(change) + ")");
        prev = std::move(cur);
    }
}

/// Closed forms for uniform and beta densities, Stieltjes otherwise.
inline RecurrenceCoefficients recurrence_for(const UnivariateDensity& d, std::size_t max_degree) {
    if (d.is_uniform()) return legendre_recurrence(max_degree);
    if (const auto* b = std::get_if<UnivariateDensity::Beta>(&d.kind()))
        return jacobi_recurrence(b->alpha - 1.0, b->beta - 1.0, max_degree);
    return stieltjes(d, max_degree);
}

/// Polynomials orthonormal with respect to a density, degrees 0..max_degree.
class OrthonormalBasis1D {
public:
    OrthonormalBasis1D() = default;

    OrthonormalBasis1D(UnivariateDensity density, std::size_t max_degree)
        : density_(std::move(density)), recurrence_(recurrence_for(density_, max_degree)), max_degree_(max_degree) {}

    /// Uses precomputed coefficients, e.g. read back from a surrogate file.
    OrthonormalBasis1D(UnivariateDensity density, RecurrenceCoefficients recurrence, std::size_t max_degree)
        : density_(std::move(density)), recurrence_(std::move(recurrence)), max_degree_(max_degree) {
        if (recurrence_.beta.size() != recurrence_.alpha.size() || recurrence_.size() < max_degree_ + 1)
            throw ArgumentError("recurrence too short for requested degree");
    }

    const UnivariateDensity& density() const noexcept { return density_; }
    const RecurrenceCoefficients& recurrence() const noexcept { return recurrence_; }
    std::size_t max_degree() const noexcept { return max_degree_; }

    double evaluate(std::size_t m, double y) const {
        if (m > max_degree_)
            throw RangeError("degree " + std::to_string(m) + " exceeds basis degree " + std::to_string(max_degree_));
        std::vector<double> values(m + 1);
        fill(y, values);
        return values[m];
    }

    /// Values of degrees 0..out.size()-1 at y.
    void fill(double y, std::span<double> out) const {
        if (!(y >= -1.0 && y <= 1.0)) throw DomainError("basis evaluated at " + std::to_string(y) + ", outside [-1,1]");
        if (out.empty()) return;
        if (out.size() > max_degree_ + 1) throw RangeError("requested more degrees than the basis holds");
        const auto& a = recurrence_.alpha;
        const auto& b = recurrence_.beta;
        out[0] = 1.0 / std::sqrt(b[0]);
        if (out.size() == 1) return;
        out[1] = (y - a[0]) * out[0] / std::sqrt(b[1]);
        for (std::size_t k = 1; k + 1 < out.size(); ++k)
            out[k + 1] = ((y - a[k]) * out[k] - std::sqrt(b[k]) * out[k - 1]) / std::sqrt(b[k + 1]);
    }

private:
    UnivariateDensity density_;
    RecurrenceCoefficients recurrence_;
    std::size_t max_degree_ = 0;
};

}  // namespace cmpce
