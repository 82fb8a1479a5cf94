#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cmpce/pce.hpp"
#include "oracles.hpp"

using namespace cmpce;

namespace {

PCBasis basis1(const UnivariateDensity& d, const ConformalMap1D& g, unsigned p) {
    return build_basis(JointDensity::iid(d, 1), MultivariateMap::uniform(g, 1), p);
}

ParametricModel fn1(std::function<double(double)> f) {
    return {1, [f](std::span<const double> y) { return Complex(f(y[0]), 0.0); }, "fn"};
}

// Plain gPC projection written directly from Legendre polynomials and
// Newton-based Gauss-Legendre nodes, as an independent reference.
std::vector<double> reference_legendre_projection(const std::function<double(double)>& f, unsigned p,
                                                  int nodes) {
    auto [x, w] = oracle::gauss_legendre(nodes);
    std::vector<double> c(p + 1, 0.0);
    for (int i = 0; i < nodes; ++i) {
        double p0 = 1.0;
        double p1 = x[i];
        for (unsigned m = 0; m <= p; ++m) {
            double pm;
            if (m == 0)
                pm = 1.0;
            else if (m == 1)
                pm = x[i];
            else {
                const double p2 = ((2.0 * m - 1.0) * x[i] * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
                pm = p2;
            }
            c[m] += 0.5 * w[i] * f(x[i]) * pm * std::sqrt(2.0 * m + 1.0);
        }
    }
    return c;
}

}  // namespace

TEST(PCE, TensorIndexSetOrder) {
    const auto set = tensor_index_set(2, 2);
    ASSERT_EQ(set.size(), 9u);
    EXPECT_EQ(set[0].degrees, (std::vector<unsigned>{0, 0}));
    EXPECT_EQ(set[1].degrees, (std::vector<unsigned>{0, 1}));
    EXPECT_EQ(set[3].degrees, (std::vector<unsigned>{1, 0}));
    EXPECT_EQ(set[8].degrees, (std::vector<unsigned>{2, 2}));
}

TEST(PCE, BuildBasisExamples) {
    const auto legendre = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 2);
    EXPECT_EQ(legendre.size(), 3u);
    const std::vector<double> y{0.3};
    EXPECT_NEAR(legendre.evaluate(MultiIndex{{2}}, y), std::sqrt(5.0) * (3 * 0.09 - 1) / 2, 1e-15);

    const auto constant = basis1(UnivariateDensity::uniform(), ConformalMap1D::sausage9(), 0);
    EXPECT_EQ(constant.size(), 1u);
    EXPECT_EQ(constant.evaluate(MultiIndex{{0}}, y), 1.0);

    const auto two = build_basis(JointDensity::iid(UnivariateDensity::uniform(), 2),
                                 MultivariateMap::uniform(ConformalMap1D::sausage9(), 2), 3);
    EXPECT_EQ(two.size(), 16u);

    EXPECT_THROW(build_basis(JointDensity::iid(UnivariateDensity::uniform(), 2),
                             MultivariateMap::uniform(ConformalMap1D::sausage9(), 1), 3),
                 ArgumentError);
}

TEST(PCE, EvaluateBasisFunctionExamples) {
    const auto b = build_basis(JointDensity::iid(UnivariateDensity::uniform(), 2),
                               MultivariateMap::uniform(ConformalMap1D::sausage9(), 2), 3);
    const std::vector<double> y{0.1, -0.7};
    EXPECT_EQ(evaluate_basis_function(b, MultiIndex{{0, 0}}, y), 1.0);

    const auto plain = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 2);
    EXPECT_NEAR(evaluate_basis_function(plain, MultiIndex{{1}}, std::vector<double>{1.0}), 1.732051, 5e-7);

    const auto mapped = basis1(UnivariateDensity::uniform(), ConformalMap1D::sausage9(), 2);
    const double up = evaluate_basis_function(mapped, MultiIndex{{1}}, std::vector<double>{1.0});
    const double down = evaluate_basis_function(mapped, MultiIndex{{1}}, std::vector<double>{-1.0});
    EXPECT_GT(up, 0.0);
    EXPECT_NEAR(down, -up, 1e-14);

    EXPECT_THROW(evaluate_basis_function(b, MultiIndex{{0, 0}}, std::vector<double>{0.1, 1.2}), DomainError);
    EXPECT_THROW(evaluate_basis_function(b, MultiIndex{{4, 0}}, y), RangeError);
}

TEST(PCE, MappedBasisIsOrthonormalUnderInputDensity) {
    const auto g = ConformalMap1D::sausage9();
    for (const auto& d : {UnivariateDensity::uniform(), UnivariateDensity::beta(4, 4)}) {
        const auto b = basis1(d, g, 6);
        for (unsigned i = 0; i <= 6; ++i)
            for (unsigned j = i; j <= 6; ++j) {
                // integrate in y directly; Phi uses the numerical inverse
                const double e = oracle::integrate(
                    [&](double y) {
                        const std::vector<double> p{y};
                        return b.evaluate(MultiIndex{{i}}, p) * b.evaluate(MultiIndex{{j}}, p) * d.pdf(y);
                    },
                    -1.0, 1.0, 64, 30);
                EXPECT_NEAR(e, i == j ? 1.0 : 0.0, 1e-9) << d.describe() << " " << i << "," << j;
            }
    }
}

TEST(PCE, ProjectExamples) {
    const auto plain = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 3);
    const auto psi2 = fn1([](double y) { return std::sqrt(5.0) * (3 * y * y - 1) / 2; });
    const auto s = project(psi2, plain, 5);
    const std::vector<double> expected{0, 0, 1, 0};
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(s.coefficients()[k].real(), expected[k], 1e-12);

    for (const auto& g : {ConformalMap1D::identity(), ConformalMap1D::sausage9()}) {
        const auto b = build_basis(JointDensity::iid(UnivariateDensity::beta(4, 4), 2), MultivariateMap::uniform(g, 2), 4);
        const ParametricModel c{2, [](std::span<const double>) { return Complex(2.5, -1.0); }, "c"};
        const auto sc = project(c, b);
        EXPECT_NEAR(sc.coefficients()[0].real(), 2.5, 1e-13);
        EXPECT_NEAR(sc.coefficients()[0].imag(), -1.0, 1e-13);
        for (std::size_t k = 1; k < sc.coefficients().size(); ++k) EXPECT_LT(std::abs(sc.coefficients()[k]), 1e-13);
    }

    const auto linear = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 1);
    const auto sl = project(fn1([](double y) { return y; }), linear);
    EXPECT_NEAR(sl.coefficients()[1].real(), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(sl.coefficients()[1].real(), 0.5773503, 5e-8);
    EXPECT_NEAR(evaluate(sl, std::vector<double>{0.25}).real(), 0.25, 1e-13);
}

TEST(PCE, ProjectReportsFailingNode) {
    const auto b = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 3);
    const auto bad = fn1([](double y) -> double {
        if (y > 0.5) throw std::runtime_error("solver diverged");
        return y;
    });
    try {
        project(bad, b, 4);
        FAIL() << "expected ModelEvaluationError";
    } catch (const ModelEvaluationError& e) {
        EXPECT_EQ(e.index(), 3u);
        EXPECT_NE(std::string(e.what()).find("solver diverged"), std::string::npos);
    }
}

TEST(PCE, ModelEvaluatedOncePerNodeAndThreadingIsDeterministic) {
    const auto b = build_basis(JointDensity::iid(UnivariateDensity::uniform(), 2),
                               MultivariateMap::uniform(ConformalMap1D::sausage9(), 2), 4);
    std::atomic<int> calls{0};
    const ParametricModel m{2,
                            [&](std::span<const double> y) {
                                ++calls;
                                return Complex(std::exp(y[0]) * std::cos(y[1]), y[0] * y[1]);
                            },
                            "m"};
    const auto serial = project(m, b, 6);
    EXPECT_EQ(calls.load(), 36);
    const auto parallel = project(m, b, 6, {4});
    for (std::size_t k = 0; k < serial.coefficients().size(); ++k)
        EXPECT_EQ(serial.coefficients()[k], parallel.coefficients()[k]);
}

TEST(PCE, PolynomialReproduction) {
    // degree-3 polynomial in y is exactly represented by the plain basis
    const auto b = build_basis(JointDensity::iid(UnivariateDensity::beta(4, 4), 2),
                               MultivariateMap::uniform(ConformalMap1D::identity(), 2), 3);
    auto poly = [](double a, double c) { return 1.0 + a - 2 * a * c + 0.5 * a * a * a * c * c + c * c * c; };
    const ParametricModel m{2, [&](std::span<const double> y) { return Complex(poly(y[0], y[1]), 0.0); }, "poly"};
    const auto s = project(m, b);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> y{u(rng), u(rng)};
        EXPECT_NEAR(s(y).real(), poly(y[0], y[1]), 1e-11);
    }
}

TEST(PCE, ProjectionIdempotence) {
    const auto b = build_basis(JointDensity::iid(UnivariateDensity::uniform(), 2),
                               MultivariateMap::uniform(ConformalMap1D::sausage9(), 2), 5);
    const ParametricModel m{2, [](std::span<const double> y) { return Complex(1.0 / (1.0 + 4 * y[0] * y[0]) + y[1], 0.0); }, "m"};
    const auto s = project(m, b);
    const auto again = project(s.as_model(), b);
    for (std::size_t k = 0; k < s.coefficients().size(); ++k)
        EXPECT_NEAR(std::abs(again.coefficients()[k] - s.coefficients()[k]), 0.0, 1e-11);
}

TEST(PCE, IdentityMapMatchesReferencePlainProjection) {
    auto f = [](double y) { return std::exp(std::sin(2 * y)) / (1.0 + 6.25 * y * y); };
    for (unsigned p : {3u, 8u, 14u}) {
        const auto s = project(fn1(f), basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), p));
        const auto ref = reference_legendre_projection(f, p, static_cast<int>(p) + 1);
        for (unsigned m = 0; m <= p; ++m) EXPECT_NEAR(s.coefficients()[m].real(), ref[m], 1e-13) << p << " " << m;
    }
}

TEST(PCE, MeanZeroPropertyOfNonConstantFunctions) {
    for (const auto& g : {ConformalMap1D::identity(), ConformalMap1D::sausage9()})
        for (const auto& d : {UnivariateDensity::uniform(), UnivariateDensity::beta(4, 4)}) {
            const auto b = build_basis(JointDensity::iid(d, 2), MultivariateMap::uniform(g, 2), 6);
            const ParametricModel one{2, [](std::span<const double>) { return Complex(1.0, 0.0); }, "one"};
            const auto s = project(one, b);
            for (std::size_t k = 1; k < s.coefficients().size(); ++k) EXPECT_LT(std::abs(s.coefficients()[k]), 1e-13);
        }
}

TEST(PCE, CoefficientDecay) {
    const auto b = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 4);
    const auto c = coefficient_decay(project(fn1([](double) { return 3.0; }), b));
    EXPECT_NEAR(c[0], 9.0, 1e-12);
    for (std::size_t w = 1; w < c.size(); ++w) EXPECT_LT(c[w], 1e-24);

    const auto d1 = coefficient_decay(project(fn1([](double y) { return std::sqrt(3.0) * y; }), b));
    EXPECT_NEAR(d1[1], 1.0, 1e-12);
    for (std::size_t w : {0u, 2u, 3u, 4u}) EXPECT_LE(d1[w], 1e-24);

    const auto runge = basis1(UnivariateDensity::uniform(), ConformalMap1D::identity(), 16);
    const auto dr = coefficient_decay(project(fn1([](double y) { return 1.0 / (1.0 + 6.25 * y * y); }), runge));
    EXPECT_LT(decay_slope(dr), 0.0);
    EXPECT_THROW(decay_slope(std::vector<double>{1.0, 0.0, 0.0}), NumericalError);
}
