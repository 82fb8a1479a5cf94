#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "cmpce/density.hpp"
#include "cmpce/errors.hpp"
#include "cmpce/models.hpp"
#include "cmpce/pce.hpp"

namespace cmpce {

/// E[Q_p] = s_0.
inline Complex mean(const Surrogate& s) { return s.coefficients().front(); }

/// Sum of |s_m|^2 over nonzero multi-indices. For complex coefficients this
/// is the sum of real and imaginary variances.
inline double variance(const Surrogate& s) {
    double v = 0.0;
    const auto c = s.coefficients();
    for (std::size_t k = 1; k < c.size(); ++k) v += std::norm(c[k]);
    return v;
}

inline double standard_deviation(const Surrogate& s) { return std::sqrt(variance(s)); }

struct SobolIndex {
    double main = 0.0;
    double total = 0.0;
};

/// Main- and total-effect indices per dimension.
///   main_n:  indices with m_n != 0 and every other entry 0
///   total_n: indices with m_n != 0
/// A standard deviation below 1e-12 |mean| is quadrature round-off and counts as zero.
inline std::vector<SobolIndex> sobol_indices(const Surrogate& s) {
    const double v = variance(s);
    if (!(v > 1e-24 * std::norm(mean(s))) || !(v > 0.0))
        throw UndefinedIndicesError("Sobol indices are undefined for zero variance");
    const std::size_t dim = s.basis().dimension();
    std::vector<SobolIndex> out(dim);
    const auto indices = s.basis().index_set();
    const auto c = s.coefficients();
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto& m = indices[k].degrees;
        std::size_t active = 0;
        for (unsigned d : m) active += d != 0;
        if (active == 0) continue;
        const double part = std::norm(c[k]);
        for (std::size_t n = 0; n < dim; ++n) {
            if (m[n] == 0) continue;
            out[n].total += part;
            if (active == 1) out[n].main += part;
        }
    }
    for (auto& idx : out) {
        idx.main /= v;
        idx.total /= v;
    }
    return out;
}

/// Mean squared error (1/n) sum |Q_p(y_i) - Q(y_i)|^2 over n i.i.d. draws
/// from the surrogate's input density.
inline double cross_validation_error(const Surrogate& s, const ParametricModel& model, std::size_t n,
                                     std::uint64_t seed) {
    const auto points = sample(s.basis().density(), n, seed);
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Complex q;
        try {
            q = model(points[i]);
        } catch (const std::exception& e) {
            throw ModelEvaluationError(i, e.what());
        }
        acc += std::norm(s(points[i]) - q);
    }
    return acc / static_cast<double>(n);
}

/// Square root of `cross_validation_error`, for plotting.
inline double cross_validation_rms(const Surrogate& s, const ParametricModel& model, std::size_t n,
                                   std::uint64_t seed) {
    return std::sqrt(cross_validation_error(s, model, n, seed));
}

/// Convergence rate r from E(p) ~ C r^(-2p): least-squares line through
/// (p, log10 E) over orders in [lo, hi], r = 10^(-slope/2). Nonpositive or
/// non-finite errors are skipped; fewer than two usable points is an error.
inline double empirical_rate(std::span<const unsigned> orders, std::span<const double> errors, unsigned lo, unsigned hi) {
    if (orders.size() != errors.size()) throw ArgumentError("orders and errors differ in length");
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < lo || orders[i] > hi || !(errors[i] > 0.0) || !std::isfinite(errors[i])) continue;
        const double x = orders[i];
        const double y = std::log10(errors[i]);
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || den == 0.0) throw NumericalError("rate fit needs errors at two or more distinct orders");
    return std::pow(10.0, -(n * sxy - sx * sy) / den / 2.0);
}

/// CSV "dimension,S_main,S_total", dimensions numbered from 1.
inline void write_sobol_csv(std::ostream& os, const std::vector<SobolIndex>& indices) {
    os << "dimension,S_main,S_total\n";
    for (std::size_t n = 0; n < indices.size(); ++n)
        os << n + 1 << ',' << format_double(indices[n].main) << ',' << format_double(indices[n].total) << '\n';
}

/// CSV "statistic,value_real,value_imag" with mean, variance and std.
inline void write_moments_csv(std::ostream& os, const Surrogate& s) {
    const Complex m = mean(s);
    os << "statistic,value_real,value_imag\n";
    os << "mean," << format_double(m.real()) << ',' << format_double(m.imag()) << '\n';
    os << "variance," << format_double(variance(s)) << ",0\n";
    os << "std," << format_double(standard_deviation(s)) << ",0\n";
}

}  // namespace cmpce
