#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cmpce/conformal.hpp"
#include "cmpce/density.hpp"
#include "cmpce/errors.hpp"
#include "cmpce/models.hpp"
#include "cmpce/orthopoly.hpp"
#include "cmpce/quadrature.hpp"

namespace cmpce {

struct MultiIndex {
    std::vector<unsigned> degrees;

    std::size_t size() const noexcept { return degrees.size(); }
    unsigned operator[](std::size_t i) const { return degrees.at(i); }

    unsigned max_norm() const noexcept {
        unsigned m = 0;
        for (unsigned d : degrees) m = std::max(m, d);
        return m;
    }
    bool is_zero() const noexcept { return max_norm() == 0; }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices with max-norm <= p in lexicographic order, last
/// dimension fastest.
inline std::vector<MultiIndex> tensor_index_set(std::size_t dimension, unsigned p) {
    std::size_t count = 1;
    for (std::size_t j = 0; j < dimension; ++j) count *= p + 1;
    std::vector<MultiIndex> out;
    out.reserve(count);
    MultiIndex m{std::vector<unsigned>(dimension, 0)};
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(m);
        for (std::size_t j = dimension; j-- > 0;) {
            if (++m.degrees[j] <= p) break;
            m.degrees[j] = 0;
        }
    }
    return out;
}

/// Tensor-product basis Phi_m(y) = prod_j psi_{m_j}(g_j^{-1}(y_j)), where psi
/// is orthonormal with respect to the transformed density of dimension j.
/// With identity maps this is the classical gPC basis.
class PCBasis {
public:
    PCBasis(JointDensity density, MultivariateMap map, std::vector<OrthonormalBasis1D> univariate, unsigned degree)
        : density_(std::move(density)),
          map_(std::move(map)),
          univariate_(std::move(univariate)),
          degree_(degree),
          index_set_(tensor_index_set(density_.dimension(), degree)) {
        if (density_.dimension() == 0) throw ArgumentError("basis needs at least one dimension");
        if (map_.dimension() != density_.dimension() || univariate_.size() != density_.dimension())
            throw ArgumentError("density, map and univariate bases must share one dimension");
        for (const auto& b : univariate_)
            if (b.max_degree() < degree_) throw ArgumentError("univariate basis degree too small");
    }

    std::size_t dimension() const noexcept { return density_.dimension(); }
    unsigned degree() const noexcept { return degree_; }
    const JointDensity& density() const noexcept { return density_; }
    const MultivariateMap& map() const noexcept { return map_; }
    const OrthonormalBasis1D& univariate(std::size_t j) const { return univariate_.at(j); }
    std::span<const MultiIndex> index_set() const noexcept { return index_set_; }
    std::size_t size() const noexcept { return index_set_.size(); }

    /// Position of `m` in the index set.
    std::size_t position(const MultiIndex& m) const {
        if (m.size() != dimension()) throw ArgumentError("multi-index dimension mismatch");
        std::size_t k = 0;
        for (unsigned d : m.degrees) {
            if (d > degree_) throw RangeError("multi-index outside the tensor index set");
            k = k * (degree_ + 1) + d;
        }
        return k;
    }

    /// table[j][d] = psi_d of dimension j at reference coordinate s_j.
    std::vector<std::vector<double>> reference_table(std::span<const double> s) const {
        std::vector<std::vector<double>> table(dimension(), std::vector<double>(degree_ + 1));
        for (std::size_t j = 0; j < dimension(); ++j) univariate_[j].fill(s[j], table[j]);
        return table;
    }

    /// Values of every basis function at a physical point y.
    std::vector<double> evaluate_all(std::span<const double> y) const {
        check_point(y);
        const auto table = reference_table(map_.inverse(y));
        std::vector<double> out(index_set_.size());
        for (std::size_t k = 0; k < index_set_.size(); ++k) {
            double v = 1.0;
            for (std::size_t j = 0; j < dimension(); ++j) v *= table[j][index_set_[k].degrees[j]];
            out[k] = v;
        }
        return out;
    }

    double evaluate(const MultiIndex& m, std::span<const double> y) const {
        position(m);
        check_point(y);
        const auto s = map_.inverse(y);
        double v = 1.0;
        for (std::size_t j = 0; j < dimension(); ++j) v *= univariate_[j].evaluate(m.degrees[j], s[j]);
        return v;
    }

private:
    void check_point(std::span<const double> y) const {
        if (y.size() != dimension())
            throw ArgumentError("point has " + std::to_string(y.size()) + " coordinates, basis has " +
                                std::to_string(dimension()));
        for (double v : y)
            if (!(v >= -1.0 && v <= 1.0)) throw DomainError("point coordinate " + std::to_string(v) + " outside [-1,1]");
    }

    JointDensity density_;
    MultivariateMap map_;
    std::vector<OrthonormalBasis1D> univariate_;
    unsigned degree_;
    std::vector<MultiIndex> index_set_;
};

inline PCBasis build_basis(const JointDensity& density, const MultivariateMap& map, unsigned degree) {
    if (density.dimension() != map.dimension()) throw ArgumentError("density and map dimensions differ");
    std::vector<OrthonormalBasis1D> univariate;
    univariate.reserve(density.dimension());
    for (std::size_t j = 0; j < density.dimension(); ++j)
        univariate.emplace_back(transform_density(density[j], map[j]), degree);
    return PCBasis(density, map, std::move(univariate), degree);
}

inline double evaluate_basis_function(const PCBasis& basis, const MultiIndex& m, std::span<const double> y) {
    return basis.evaluate(m, y);
}

struct SurrogateMetadata {
    std::string model;
    std::size_t quadrature_nodes_per_dim = 0;
    std::string built;
};

/// Expansion coefficients over a basis, stored in index-set order.
class Surrogate {
public:
    Surrogate(PCBasis basis, std::vector<Complex> coefficients, SurrogateMetadata metadata = {})
        : basis_(std::move(basis)), coefficients_(std::move(coefficients)), metadata_(std::move(metadata)) {
        if (coefficients_.size() != basis_.size())
            throw ArgumentError("coefficient count " + std::to_string(coefficients_.size()) +
                                " does not match index set size " + std::to_string(basis_.size()));
        for (const auto& c : coefficients_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw NumericalError("surrogate coefficient is not finite");
    }

    const PCBasis& basis() const noexcept { return basis_; }
    std::span<const Complex> coefficients() const noexcept { return coefficients_; }
    Complex coefficient(const MultiIndex& m) const { return coefficients_[basis_.position(m)]; }
    const SurrogateMetadata& metadata() const noexcept { return metadata_; }
    SurrogateMetadata& metadata() noexcept { return metadata_; }

    Complex operator()(std::span<const double> y) const {
        const auto phi = basis_.evaluate_all(y);
        Complex sum(0.0, 0.0);
        for (std::size_t k = 0; k < phi.size(); ++k) sum += coefficients_[k] * phi[k];
        return sum;
    }

    /// The surrogate as a model, e.g. for re-projection.
    ParametricModel as_model() const {
        Surrogate copy = *this;
        return {basis_.dimension(), [copy](std::span<const double> y) { return copy(y); }, "surrogate"};
    }

private:
    PCBasis basis_;
    std::vector<Complex> coefficients_;
    SurrogateMetadata metadata_;
};

inline Complex evaluate(const Surrogate& s, std::span<const double> y) { return s(y); }

/// The (mapped) tensor Gauss grid a projection with `nodes_per_dim` uses.
inline TensorQuadrature projection_grid(const PCBasis& basis, std::size_t nodes_per_dim) {
    std::vector<QuadratureRule1D> rules;
    rules.reserve(basis.dimension());
    for (std::size_t j = 0; j < basis.dimension(); ++j) {
        const auto& g = basis.map()[j];
        // The univariate basis already holds the transformed density's recurrence.
        const auto& rec = basis.univariate(j).recurrence();
        QuadratureRule1D rule;
        if (rec.size() >= nodes_per_dim) {
            GaussNodes gn = golub_welsch(rec, nodes_per_dim);
            rule.reference_nodes = gn.nodes;
            rule.nodes = std::move(gn.nodes);
            rule.weights = std::move(gn.weights);
            for (double& y : rule.nodes) y = g.forward(y);
            rule.density_tag = basis.density()[j].describe();
            rule.mapped = !g.is_identity();
        } else {
            rule = mapped_rule(basis.density()[j], g, nodes_per_dim);
        }
        rules.push_back(std::move(rule));
    }
    return TensorQuadrature(std::move(rules));
}

/// Evaluates `model` at every node of `grid`, optionally on several threads.
/// Results are stored by node index, so scheduling never affects the output.
inline std::vector<Complex> evaluate_on_grid(const ParametricModel& model, const TensorQuadrature& grid,
                                             unsigned threads = 1) {
    const std::size_t n = grid.size();
    std::vector<Complex> values(n);
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            try {
                const Complex v = model(grid.node(k));
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NumericalError("non-finite model value");
                values[k] = v;
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t t = 0; t < workers; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
            throw ModelEvaluationError(k, e.what());
        }
    }
    return values;
}

/// Pseudo-spectral projection from model values at the nodes of
/// `projection_grid(basis, n)`: s_m = sum_i Phi_m(y_i) Q(y_i) w_i.
inline std::vector<Complex> project_values(const PCBasis& basis, const TensorQuadrature& grid,
                                           std::span<const Complex> values) {
    if (grid.dimension() != basis.dimension()) throw ArgumentError("grid and basis dimensions differ");
    if (values.size() != grid.size()) throw ArgumentError("one value per grid node is required");
    const std::size_t dim = basis.dimension();
    const unsigned p = basis.degree();

    // psi[j][i * (p+1) + d]: degree d in dimension j at factor node i
    std::vector<std::vector<double>> psi(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const auto& rule = grid.factor_rules()[j];
        psi[j].resize(rule.size() * (p + 1));
        for (std::size_t i = 0; i < rule.size(); ++i)
            basis.univariate(j).fill(rule.reference_nodes[i], std::span<double>(psi[j]).subspan(i * (p + 1), p + 1));
    }

    std::vector<Complex> weighted(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) weighted[k] = values[k] * grid.weight(k);

    std::vector<std::vector<std::size_t>> positions(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) positions[k] = grid.unflatten(k);

    const auto indices = basis.index_set();
    std::vector<Complex> coefficients(indices.size());
    for (std::size_t m = 0; m < indices.size(); ++m) {
        Complex acc(0.0, 0.0);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double phi = 1.0;
            for (std::size_t j = 0; j < dim; ++j) phi *= psi[j][positions[k][j] * (p + 1) + indices[m].degrees[j]];
            acc += weighted[k] * phi;
        }
        coefficients[m] = acc;
    }
    return coefficients;
}

struct ProjectionOptions {
    unsigned threads = 1;
};

/// Projects `model` onto `basis` with a (mapped) Gauss rule of
/// `nodes_per_dim` nodes in every dimension; the model is evaluated exactly
/// once per tensor node.
inline Surrogate project(const ParametricModel& model, const PCBasis& basis, std::size_t nodes_per_dim,
                         ProjectionOptions options = {}) {
    if (model.dimension != basis.dimension()) throw ArgumentError("model and basis dimensions differ");
    if (nodes_per_dim == 0) throw ArgumentError("projection needs at least one node per dimension");
    const TensorQuadrature grid = projection_grid(basis, nodes_per_dim);
    const auto values = evaluate_on_grid(model, grid, options.threads);
    return Surrogate(basis, project_values(basis, grid, values), {model.label, nodes_per_dim, {}});
}

/// Default node count p + 1 per dimension.
inline Surrogate project(const ParametricModel& model, const PCBasis& basis) {
    return project(model, basis, basis.degree() + 1);
}

/// max |s_m|^2 over ||m||_inf = w, for w = 0..p.
inline std::vector<double> coefficient_decay(const Surrogate& s) {
    std::vector<double> out(s.basis().degree() + 1, 0.0);
    const auto indices = s.basis().index_set();
    for (std::size_t k = 0; k < indices.size(); ++k) {
        auto& slot = out[indices[k].max_norm()];
        slot = std::max(slot, std::norm(s.coefficients()[k]));
    }
    return out;
}

/// Least-squares slope of ln(decay[w]) against w. Levels at or below
/// `relative_floor * max(decay)` (symmetry zeros, round-off) are skipped.
inline double decay_slope(std::span<const double> decay, double relative_floor = 1e-26) {
    const double top = decay.empty() ? 0.0 : *std::max_element(decay.begin(), decay.end());
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t w = 0; w < decay.size(); ++w) {
        if (decay[w] > relative_floor * top && decay[w] > 0.0) {
            xs.push_back(static_cast<double>(w));
            ys.push_back(std::log(decay[w]));
        }
    }
    if (xs.size() < 2) throw NumericalError("decay fit needs at least two resolved levels");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace cmpce
