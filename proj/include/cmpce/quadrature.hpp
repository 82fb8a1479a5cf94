#pragma once

#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cmpce/conformal.hpp"
#include "cmpce/density.hpp"
#include "cmpce/errors.hpp"
#include "cmpce/orthopoly.hpp"

namespace cmpce {

/// Gauss rule on [-1,1] with probability-normalized positive weights.
///
/// For mapped rules `nodes` holds g(s_i) and `reference_nodes` the Gauss
/// nodes s_i of the transformed density; for plain rules both coincide.
struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> reference_nodes;
    std::vector<double> weights;
    std::string density_tag;
    bool mapped = false;

    std::size_t size() const noexcept { return nodes.size(); }
};

inline QuadratureRule1D gauss_rule(const UnivariateDensity& d, std::size_t n) {
    if (n == 0) throw ArgumentError("quadrature rule needs at least one node");
    GaussNodes g = golub_welsch(recurrence_for(d, n - 1), n);
    QuadratureRule1D rule;
    rule.reference_nodes = g.nodes;
    rule.nodes = std::move(g.nodes);
    rule.weights = std::move(g.weights);
    rule.density_tag = d.describe();
    return rule;
}

/// Gauss rule of the transformed density with nodes pushed through `g`;
/// weights are kept unchanged.
inline QuadratureRule1D mapped_rule(const UnivariateDensity& d, const ConformalMap1D& g, std::size_t n) {
    QuadratureRule1D rule = gauss_rule(transform_density(d, g), n);
    for (double& y : rule.nodes) y = g.forward(y);
    rule.density_tag = d.describe();
    rule.mapped = !g.is_identity();
    return rule;
}

/// Tensor product of univariate rules, flattened lexicographically with the
/// last dimension varying fastest.
class TensorQuadrature {
public:
    explicit TensorQuadrature(std::vector<QuadratureRule1D> rules) : rules_(std::move(rules)) {
        if (rules_.empty()) throw ArgumentError("tensor rule needs at least one factor");
        std::size_t total = 1;
        for (const auto& r : rules_) {
            if (r.size() == 0) throw ArgumentError("tensor rule factor is empty");
            total *= r.size();
        }
        const std::size_t dim = rules_.size();
        nodes_.resize(total * dim);
        reference_.resize(total * dim);
        weights_.resize(total);
        std::vector<std::size_t> idx(dim, 0);
        for (std::size_t k = 0; k < total; ++k) {
            double w = 1.0;
            for (std::size_t j = 0; j < dim; ++j) {
                nodes_[k * dim + j] = rules_[j].nodes[idx[j]];
                reference_[k * dim + j] = rules_[j].reference_nodes[idx[j]];
                w *= rules_[j].weights[idx[j]];
            }
            weights_[k] = w;
            for (std::size_t j = dim; j-- > 0;) {
                if (++idx[j] < rules_[j].size()) break;
                idx[j] = 0;
            }
        }
    }

    std::size_t dimension() const noexcept { return rules_.size(); }
    std::size_t size() const noexcept { return weights_.size(); }
    std::span<const QuadratureRule1D> factor_rules() const noexcept { return rules_; }

    std::span<const double> node(std::size_t k) const {
        return std::span<const double>(nodes_).subspan(k * dimension(), dimension());
    }
    std::span<const double> reference_node(std::size_t k) const {
        return std::span<const double>(reference_).subspan(k * dimension(), dimension());
    }
    double weight(std::size_t k) const { return weights_.at(k); }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Per-dimension position of flattened node k.
    std::vector<std::size_t> unflatten(std::size_t k) const {
        std::vector<std::size_t> idx(dimension());
        for (std::size_t j = dimension(); j-- > 0;) {
            idx[j] = k % rules_[j].size();
            k /= rules_[j].size();
        }
        return idx;
    }

private:
    std::vector<QuadratureRule1D> rules_;
    std::vector<double> nodes_;
    std::vector<double> reference_;
    std::vector<double> weights_;
};

inline TensorQuadrature tensor_rule(std::vector<QuadratureRule1D> rules) {
    return TensorQuadrature(std::move(rules));
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV "index,y1,...,yN,weight", one row per tensor node.
inline void write_grid_csv(std::ostream& os, const TensorQuadrature& grid) {
    os << "index";
    for (std::size_t j = 1; j <= grid.dimension(); ++j) os << ",y" << j;
    os << ",weight\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        os << k;
        for (double y : grid.node(k)) os << ',' << format_double(y);
        os << ',' << format_double(grid.weight(k)) << '\n';
    }
}

}  // namespace cmpce
