#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "condop/errors.hpp"
#include "condop/gallery.hpp"
#include "instances.hpp"

using namespace condop;

namespace {

ProductGrid unit_grid(std::size_t nx, std::size_t ny) {
  return make_product_grid(trapezoid(0.0, 1.0, nx), trapezoid(0.0, 1.0, ny));
}

}  // namespace

TEST(Trapezoid, WeightsAndErrors) {
  const AxisRule r = trapezoid(0.0, 2.0, 5);
  ASSERT_EQ(r.nodes.size(), 5u);
  EXPECT_DOUBLE_EQ(r.nodes[4], 2.0);
  EXPECT_DOUBLE_EQ(r.weights[0], 0.25);
  EXPECT_DOUBLE_EQ(r.weights[2], 0.5);
  EXPECT_THROW(trapezoid(0.0, 1.0, 1), DomainError);
  EXPECT_THROW(trapezoid(1.0, 1.0, 3), DomainError);
}

TEST(ProductCondexp, LinearInT) {
  const ProductGrid g = unit_grid(5, 101);
  const ProductCondexp e = product_condexp(g, sample_on_grid(g, [](double x, double t) { return Scalar(x * t); }));
  EXPECT_DOUBLE_EQ(e.y_mass, 1.0);
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j)
      EXPECT_NEAR(e.result[g.index(i, j)].real(), g.x.nodes[i] / 2.0, 1e-14);
}

TEST(ProductCondexp, Sine) {
  const ProductGrid g = make_product_grid(trapezoid(0.0, 1.0, 3), trapezoid(0.0, std::numbers::pi, 2001));
  const ProductCondexp e = product_condexp(g, sample_on_grid(g, [](double, double t) { return Scalar(std::sin(t)); }));
  EXPECT_NEAR(e.y_mass, std::numbers::pi, 1e-12);
  EXPECT_NEAR(e.result[0].real(), 2.0 / std::numbers::pi, 1e-6);
  EXPECT_NEAR(e.result[0].real() * e.y_mass, 2.0, 1e-6);
}

TEST(ProductCondexp, StructuralProperties) {
  const ProductGrid g = unit_grid(4, 9);
  std::mt19937_64 rng(3);
  const Function c = sample_on_grid(g, [](double x, double) { return Scalar(1.0 + x * x); });
  const ProductCondexp ec = product_condexp(g, c);
  EXPECT_LE((ec.result.values() - c.values()).cwiseAbs().maxCoeff(), 1e-14);

  const Function f(g.space, testkit::random_vector(rng, g.space.size()));
  const Function h(g.space, testkit::random_vector(rng, g.space.size()));
  const Vector ef = product_condexp(g, f).result.values();
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 1; j < g.ny(); ++j) EXPECT_EQ(ef[g.index(i, j)], ef[g.index(i, 0)]);

  const Scalar a(0.5, -2.0);
  const Vector lhs = product_condexp(g, Function(g.space, f.values() * a + h.values())).result.values();
  const Vector rhs = ef * a + product_condexp(g, h).result.values();
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(product_condexp(g, Function::zero(make_space({1.0}))), DomainError);
}

TEST(KernelAsCondexp, ConstantKernelGivesMean) {
  const KernelSpec k = user_kernel([](double, double) { return Scalar(1.0); }, {0.0, 1.0}, trapezoid(0.0, 2.0, 201));
  Vector f(201);
  for (Eigen::Index j = 0; j < 201; ++j) f[j] = k.y.nodes[static_cast<std::size_t>(j)];
  const KernelResult r = kernel_as_condexp(k, f);
  EXPECT_NEAR(r.via_condexp[0].real(), 2.0, 1e-12);
  EXPECT_NEAR(r.via_condexp[0].real() / r.y_mass, 1.0, 1e-12);
}

TEST(KernelAsCondexp, Laplace) {
  const std::vector<double> xs{0.5, 1.0, 2.0};
  const KernelSpec k = laplace_kernel(xs);
  EXPECT_EQ(k.y.nodes.size(), 40001u);
  const KernelResult r = kernel_as_condexp(k, Vector::Ones(40001));
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(r.via_condexp[static_cast<Eigen::Index>(i)].real(), 1.0 / xs[i], 1e-3);
  EXPECT_LE(r.relative_difference, 1e-12);
}

TEST(KernelAsCondexp, ConvolutionWithDelta) {
  const KernelSpec k = convolution_kernel({1.0, 0.0, 0.0, 0.0, 0.0});
  Vector f(5);
  f << 1.0, Scalar(2.0, 1.0), -3.0, 0.5, 7.0;
  const KernelResult r = kernel_as_condexp(k, f);
  EXPECT_LE((r.via_condexp - f).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_DOUBLE_EQ(r.y_mass, 5.0);

  const KernelSpec shift = convolution_kernel({0.0, 1.0, 0.0, 0.0, 0.0});
  const KernelResult s = kernel_as_condexp(shift, f);
  EXPECT_NEAR(std::abs(s.via_condexp[0] - f[1]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.via_condexp[4] - f[0]), 0.0, 1e-14);
  EXPECT_THROW(convolution_kernel({}), DomainError);
}

TEST(KernelAsCondexp, TwoPathIdentity) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const double c1 = g(rng), c2 = g(rng), c3 = g(rng);
    const std::size_t ny = 3 + static_cast<std::size_t>(trial);
    const KernelSpec k = user_kernel([=](double x, double y) { return Scalar(c1 + c2 * x * y, c3 * std::cos(x - y)); },
                                     {0.1, 0.7, 1.3}, trapezoid(-1.0, 2.0, ny));
    const KernelResult r = kernel_as_condexp(k, testkit::random_vector(rng, ny));
    EXPECT_LE(r.relative_difference, 1e-12);
  }
}

TEST(KernelAsCondexp, Errors) {
  const KernelSpec k = user_kernel([](double x, double) { return Scalar(1.0 / x); }, {0.0}, trapezoid(0.0, 1.0, 3));
  EXPECT_THROW(kernel_as_condexp(k, Vector::Ones(3)), DomainError);
  EXPECT_THROW(kernel_as_condexp(k, Vector::Ones(2)), DomainError);
}

TEST(Laplace, Demo) {
  const LaplaceReport r = laplace_demo(1.0, {0.5, 1.0, 2.0, 50.0});
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.exact, 1.0 / (row.x + 1.0));
    EXPECT_LE(row.abs_err / row.exact, 1e-2);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(r.rows[i].abs_err, 1e-3);
  EXPECT_GT(r.rows[0].budget_constant, 0.0);

  EXPECT_THROW(laplace_demo(1.0, {0.0}), DomainError);
  EXPECT_THROW(laplace_demo(0.0, {1.0}), DomainError);
  EXPECT_THROW(laplace_transform([](double) { return Scalar(1.0); }, {-1.0}), DomainError);
}

TEST(Laplace, Transform) {
  const Vector v = laplace_transform([](double t) { return Scalar(std::exp(-2.0 * t)); }, {1.0, 3.0});
  EXPECT_NEAR(v[0].real(), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(v[1].real(), 0.2, 1e-6);
}
