#pragma once

#include <functional>
#include <string>
#include <vector>

#include "condop/condexp.hpp"

namespace condop {

/// Nodes with quadrature weights on one axis.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite trapezoid rule with n >= 2 nodes on [a, b].
AxisRule trapezoid(double a, double b, std::size_t n);

/// X x Y grid. The y weights are normalized to a probability measure and
/// `y_mass` keeps the factor. Blocks are the columns {x} x Y.
struct ProductGrid {
  AxisRule x;
  AxisRule y;  // normalized weights
  double y_mass = 1.0;
  MeasureSpace space;
  PartitionAlgebra partition;

  std::size_t index(std::size_t i, std::size_t j) const { return i * y.nodes.size() + j; }
  std::size_t nx() const { return x.nodes.size(); }
  std::size_t ny() const { return y.nodes.size(); }
};

ProductGrid make_product_grid(AxisRule x, AxisRule y);

struct ProductCondexp {
  Function result;
  double y_mass;  // multiply by this to get the unnormalized y integral
};

/// E(f)(x, .) = integral of f(x, t) against the normalized y measure.
ProductCondexp product_condexp(const ProductGrid& grid, const Function& f);

/// Samples g(x, y) at every grid point.
Function sample_on_grid(const ProductGrid& grid, const std::function<Scalar(double, double)>& g);

struct KernelSpec {
  std::string name;  // laplace, convolution, user
  std::function<Scalar(double, double)> kernel;
  AxisRule x;  // output points; the x weights do not enter the result
  AxisRule y;  // quadrature in y, unnormalized
};

/// k(x, y) = exp(-x y) on [0, T] with trapezoid step h.
KernelSpec laplace_kernel(std::vector<double> probes, double T = 40.0, double h = 1e-3);
/// k(x, y) = w(y - x mod n) on Z_n with counting measure.
KernelSpec convolution_kernel(std::vector<Scalar> w);
KernelSpec user_kernel(std::function<Scalar(double, double)> k, std::vector<double> probes, AxisRule y);

struct KernelResult {
  Vector via_condexp;  // y_mass * E(k f')(x, .)
  Vector direct;       // sum_j k(x, y_j) f(y_j) w_j
  double relative_difference = 0.0;
  double y_mass = 1.0;
};

KernelResult kernel_as_condexp(const KernelSpec& spec, const Vector& f_on_y);

/// Laplace transform of f through the conditional-expectation path.
Vector laplace_transform(const std::function<Scalar(double)>& f, const std::vector<double>& probes, double T = 40.0,
                         double h = 1e-3);

struct LaplaceRow {
  double x = 0.0;
  double computed = 0.0;
  double exact = 0.0;
  double abs_err = 0.0;
  double budget_constant = 0.0;  // abs_err / (h^2 + exp(-T (x + a)))
};

struct LaplaceReport {
  double a = 0.0;
  double T = 0.0;
  double h = 0.0;
  std::vector<LaplaceRow> rows;
};

/// Transform of exp(-a t) against the exact value 1 / (x + a).
LaplaceReport laplace_demo(double a, const std::vector<double>& probes, double T = 40.0, double h = 1e-3);

}  // namespace condop
