#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmpce/errors.hpp"
#include "cmpce/quadrature.hpp"

namespace cmpce {

using Complex = std::complex<double>;

/// Map from [-1,1]^N to a complex quantity of interest.
struct ParametricModel {
    std::size_t dimension = 1;
    std::function<Complex(std::span<const double>)> evaluate;
    std::string label;

    Complex operator()(std::span<const double> y) const {
        if (y.size() != dimension)
            throw ArgumentError("model '" + label + "' expects " + std::to_string(dimension) + " parameters");
        return evaluate(y);
    }
};

/// Series RLC circuit driven at angular frequency omega, L(y) = L0 + dL * y. SI units.
struct RLCModel {
    double omega = 1e4;
    double u_e = 1.0;
    double C = 10e-6;
    double R = 1.0;
    double L0 = 1e-3;
    double dL = 0.25e-3;

    void validate() const {
        if (!(R > 0.0)) throw ArgumentError("RLC resistance must be positive");
        if (!(C > 0.0)) throw ArgumentError("RLC capacitance must be positive");
        if (!(L0 - std::abs(dL) > 0.0)) throw ArgumentError("RLC inductance must stay positive on [-1,1]");
    }

    double inductance(double y) const { return L0 + dL * y; }
};

/// Phasor current i solving (-L w^2 + j w R + 1/C) i = j w u_e.
inline Complex rlc_current(const RLCModel& m, double y) {
    const Complex j(0.0, 1.0);
    const Complex impedance = -m.inductance(y) * m.omega * m.omega + j * m.omega * m.R + 1.0 / m.C;
    return j * m.omega * m.u_e / impedance;
}

inline double rlc_amplitude(const RLCModel& m, double y) {
    if (!(y >= -1.0 && y <= 1.0)) throw DomainError("RLC parameter outside [-1,1]");
    return std::abs(rlc_current(m, y));
}

inline ParametricModel rlc_model(const RLCModel& m) {
    m.validate();
    return {1, [m](std::span<const double> y) { return Complex(rlc_amplitude(m, y[0]), 0.0); },
            "rlc(R=" + format_double(m.R) + ")"};
}

/// Conjugate singularities of the amplitude's continuation in y, upper one first.
inline std::pair<Complex, Complex> rlc_pole_locations(const RLCModel& m) {
    if (m.dL == 0.0) throw DegenerateError("inductance does not depend on y; amplitude has no poles");
    const double w2 = m.omega * m.omega;
    const double centre = (1.0 / m.C - m.L0 * w2) / (m.dL * w2);
    const double offset = std::abs(m.R / (m.dL * m.omega));
    return {Complex(centre, offset), Complex(centre, -offset)};
}

/// Size (semi-major + semi-minor axis) of the Bernstein ellipse through `pole`.
inline double bernstein_rate(Complex pole) {
    if (pole.imag() == 0.0 && std::abs(pole.real()) <= 1.0)
        throw DegenerateError("point lies on [-1,1]; no Bernstein ellipse passes through it");
    const Complex w = pole + std::sqrt(pole * pole - 1.0);
    const double r = std::abs(w);
    return r >= 1.0 ? r : 1.0 / r;
}

/// f(y) = 1 / (1 + a y^2), poles at +-i/sqrt(a).
inline ParametricModel runge_model(double a) {
    if (!(a > 0.0)) throw ArgumentError("Runge parameter must be positive");
    return {1, [a](std::span<const double> y) { return Complex(1.0 / (1.0 + a * y[0] * y[0]), 0.0); },
            "runge(a=" + format_double(a) + ")"};
}

inline std::pair<Complex, Complex> runge_poles(double a) {
    const double b = 1.0 / std::sqrt(a);
    return {Complex(0.0, b), Complex(0.0, -b)};
}

/// Product of N Runge factors, one per parameter.
inline ParametricModel runge_product_model(double a, std::size_t dimension) {
    if (!(a > 0.0)) throw ArgumentError("Runge parameter must be positive");
    if (dimension == 0) throw ArgumentError("dimension must be at least 1");
    return {dimension,
            [a](std::span<const double> y) {
                double v = 1.0;
                for (double yi : y) v /= 1.0 + a * yi * yi;
                return Complex(v, 0.0);
            },
            "runge_product(a=" + format_double(a) + ",N=" + std::to_string(dimension) + ")"};
}

/// Model values supplied externally for every node of one projection grid.
class TabulatedModel {
public:
    TabulatedModel(TensorQuadrature grid, std::vector<Complex> values)
        : grid_(std::make_shared<const TensorQuadrature>(std::move(grid))), values_(std::move(values)) {
        if (values_.size() != grid_->size()) throw IngestionError("tabulated values do not cover the grid");
    }

    const TensorQuadrature& grid() const noexcept { return *grid_; }
    Complex value(std::size_t index) const { return values_.at(index); }

    /// Evaluator that answers only at nodes of the grid.
    ParametricModel as_model(std::string label = "tabulated") const {
        auto grid = grid_;
        auto values = std::make_shared<const std::vector<Complex>>(values_);
        return {grid->dimension(),
                [grid, values](std::span<const double> y) {
                    std::size_t flat = 0;
                    for (std::size_t j = 0; j < y.size(); ++j) {
                        const auto& nodes = grid->factor_rules()[j].nodes;
                        std::size_t hit = nodes.size();
                        for (std::size_t i = 0; i < nodes.size(); ++i)
                            if (std::abs(nodes[i] - y[j]) <= 1e-12) {
                                hit = i;
                                break;
                            }
                        if (hit == nodes.size())
                            throw DomainError("tabulated model queried away from its grid nodes");
                        flat = flat * nodes.size() + hit;
                    }
                    return (*values)[flat];
                },
                std::move(label)};
    }

private:
    std::shared_ptr<const TensorQuadrature> grid_;
    std::vector<Complex> values_;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw IngestionError(where + ": '" + s + "' is not a number");
    }
    if (used != s.size()) throw IngestionError(where + ": '" + s + "' is not a number");
    return v;
}

}  // namespace detail

/// Reads "index,y1,...,yN,value_real,value_imag" rows keyed by grid index.
/// Rows may come in any order; every index must appear exactly once and the
/// coordinates must match the grid within 1e-10.
inline TabulatedModel tabulated_from_csv(std::istream& in, const TensorQuadrature& grid) {
    const std::size_t dim = grid.dimension();
    const std::size_t columns = dim + 3;
    std::string line;
    if (!std::getline(in, line)) throw IngestionError("tabulated CSV is empty");
    const auto header = detail::split_csv_line(line);
    if (header.size() != columns || header.front() != "index")
        throw IngestionError("tabulated CSV header must be index,y1..y" + std::to_string(dim) +
                             ",value_real,value_imag");

    std::vector<Complex> values(grid.size());
    std::vector<int> seen(grid.size(), 0);
    std::vector<std::size_t> out_of_range;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_line(line);
        const std::string where = "line " + std::to_string(line_no);
        if (f.size() != columns) throw IngestionError(where + ": expected " + std::to_string(columns) + " fields");
        const double idx_value = detail::parse_number(f[0], where);
        if (idx_value < 0.0 || idx_value != std::floor(idx_value))
            throw IngestionError(where + ": invalid index '" + f[0] + "'");
        const auto idx = static_cast<std::size_t>(idx_value);
        if (idx >= grid.size()) {
            out_of_range.push_back(idx);
            continue;
        }
        const auto node = grid.node(idx);
        for (std::size_t j = 0; j < dim; ++j) {
            const double y = detail::parse_number(f[1 + j], where);
            if (std::abs(y - node[j]) > 1e-10)
                throw ConsistencyError(where + ": coordinate y" + std::to_string(j + 1) + " of index " +
                                       std::to_string(idx) + " does not match the grid");
        }
        values[idx] = Complex(detail::parse_number(f[dim + 1], where), detail::parse_number(f[dim + 2], where));
        ++seen[idx];
    }

    std::string missing;
    std::string duplicate;
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (seen[k] == 0) missing += (missing.empty() ? "" : ",") + std::to_string(k);
        if (seen[k] > 1) duplicate += (duplicate.empty() ? "" : ",") + std::to_string(k);
    }
    std::string extra;
    for (std::size_t k : out_of_range) extra += (extra.empty() ? "" : ",") + std::to_string(k);
    if (!missing.empty() || !duplicate.empty() || !extra.empty()) {
        std::string msg = "tabulated CSV does not cover the grid exactly once;";
        if (!missing.empty()) msg += " missing indices: " + missing + ";";
        if (!duplicate.empty()) msg += " duplicate indices: " + duplicate + ";";
        if (!extra.empty()) msg += " indices beyond the grid: " + extra + ";";
        throw IngestionError(msg);
    }
    return TabulatedModel(grid, std::move(values));
}

inline TabulatedModel tabulated_from_csv(const std::string& path, const TensorQuadrature& grid) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open tabulated model file '" + path + "'");
    return tabulated_from_csv(in, grid);
}

}  // namespace cmpce
