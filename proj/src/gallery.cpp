#include "condop/gallery.hpp"

#include <cmath>
#include <complex>
#include <numeric>

#include "condop/errors.hpp"

namespace condop {

AxisRule trapezoid(double a, double b, std::size_t n) {
  if (n < 2) throw DomainError("trapezoid rule needs at least 2 nodes");
  if (!(std::isfinite(a) && std::isfinite(b) && b > a)) throw DomainError("trapezoid interval must satisfy a < b");
  AxisRule r;
  r.nodes.resize(n);
  r.weights.assign(n, (b - a) / static_cast<double>(n - 1));
  for (std::size_t i = 0; i < n; ++i)
    r.nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  r.weights.front() *= 0.5;
  r.weights.back() *= 0.5;
  return r;
}

namespace {

void check_axis(const AxisRule& r, const char* name) {
  if (r.nodes.empty() || r.nodes.size() != r.weights.size())
    throw DomainError(std::string(name) + " axis needs matching nonempty nodes and weights");
  for (std::size_t i = 0; i < r.weights.size(); ++i)
    if (!(r.weights[i] > 0.0) || !std::isfinite(r.weights[i]) || !std::isfinite(r.nodes[i]))
      throw DomainError(std::string(name) + " axis weight at index " + std::to_string(i) + " must be positive and finite");
}

MeasureSpace grid_space(const AxisRule& x, const AxisRule& y) {
  std::vector<double> w;
  w.reserve(x.nodes.size() * y.nodes.size());
  for (double wx : x.weights)
    for (double wy : y.weights) w.push_back(wx * wy);
  return make_space(std::move(w), PointKind::cell);
}

PartitionAlgebra column_blocks(const MeasureSpace& space, std::size_t nx, std::size_t ny) {
  std::vector<std::size_t> assign(nx * ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) assign[i * ny + j] = i;
  return make_partition(space, assign);
}

ProductGrid build_grid(AxisRule x, AxisRule y) {
  check_axis(x, "x");
  check_axis(y, "y");
  const double mass = static_cast<double>(std::accumulate(y.weights.begin(), y.weights.end(), 0.0L));
  for (double& w : y.weights) w /= mass;
  MeasureSpace space = grid_space(x, y);
  PartitionAlgebra part = column_blocks(space, x.nodes.size(), y.nodes.size());
  return ProductGrid{std::move(x), std::move(y), mass, std::move(space), std::move(part)};
}

}  // namespace

ProductGrid make_product_grid(AxisRule x, AxisRule y) { return build_grid(std::move(x), std::move(y)); }

ProductCondexp product_condexp(const ProductGrid& grid, const Function& f) {
  if (!f.space().same_as(grid.space)) throw DomainError("f lives on a different space than the grid");
  return {cond_exp(grid.partition, f), grid.y_mass};
}

Function sample_on_grid(const ProductGrid& grid, const std::function<Scalar(double, double)>& g) {
  Vector v(static_cast<Eigen::Index>(grid.nx() * grid.ny()));
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.ny(); ++j)
      v[static_cast<Eigen::Index>(grid.index(i, j))] = g(grid.x.nodes[i], grid.y.nodes[j]);
  return Function(grid.space, std::move(v));
}

namespace {

AxisRule probe_axis(std::vector<double> probes) {
  if (probes.empty()) throw DomainError("need at least one probe");
  std::vector<double> ones(probes.size(), 1.0);
  return AxisRule{std::move(probes), std::move(ones)};
}

}  // namespace

KernelSpec laplace_kernel(std::vector<double> probes, double T, double h) {
  if (!(T > 0.0) || !(h > 0.0) || !std::isfinite(T)) throw DomainError("laplace grid needs T > 0 and h > 0");
  const auto n = static_cast<std::size_t>(std::llround(T / h)) + 1;
  return {"laplace", [](double x, double y) { return Scalar(std::exp(-x * y)); }, probe_axis(std::move(probes)),
          trapezoid(0.0, T, n)};
}

KernelSpec convolution_kernel(std::vector<Scalar> w) {
  const std::size_t n = w.size();
  if (n == 0) throw DomainError("convolution needs a nonempty group");
  std::vector<double> pts(n);
  std::iota(pts.begin(), pts.end(), 0.0);
  auto k = [w = std::move(w), n](double x, double y) {
    const auto d = (static_cast<long long>(y) - static_cast<long long>(x)) % static_cast<long long>(n);
    return w[static_cast<std::size_t>(d < 0 ? d + static_cast<long long>(n) : d)];
  };
  return {"convolution", std::move(k), probe_axis(pts), AxisRule{pts, std::vector<double>(n, 1.0)}};
}

KernelSpec user_kernel(std::function<Scalar(double, double)> k, std::vector<double> probes, AxisRule y) {
  return {"user", std::move(k), probe_axis(std::move(probes)), std::move(y)};
}

KernelResult kernel_as_condexp(const KernelSpec& spec, const Vector& f_on_y) {
  if (static_cast<std::size_t>(f_on_y.size()) != spec.y.nodes.size())
    throw DomainError("f must have one value per y node");
  const ProductGrid grid = make_product_grid(spec.x, spec.y);
  const std::size_t nx = grid.nx(), ny = grid.ny();

  Vector uf(static_cast<Eigen::Index>(nx * ny));
  KernelResult out;
  out.direct = Vector::Zero(static_cast<Eigen::Index>(nx));
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const Scalar k = spec.kernel(grid.x.nodes[i], grid.y.nodes[j]);
      if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
        throw DomainError("kernel is not finite at grid point (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      uf[static_cast<Eigen::Index>(grid.index(i, j))] = k * f_on_y[static_cast<Eigen::Index>(j)];
    }
    std::complex<long double> acc(0.0L);
    for (std::size_t j = 0; j < ny; ++j)
      acc += std::complex<long double>(uf[static_cast<Eigen::Index>(grid.index(i, j))]) *
             static_cast<long double>(spec.y.weights[j]);
    out.direct[static_cast<Eigen::Index>(i)] = Scalar(acc);
  }

  const Vector avg = block_averages(grid.partition, uf);
  out.via_condexp = avg * grid.y_mass;
  out.y_mass = grid.y_mass;
  const double scale = out.direct.cwiseAbs().maxCoeff();
  const double diff = (out.via_condexp - out.direct).cwiseAbs().maxCoeff();
  out.relative_difference = scale > 0.0 ? diff / scale : diff;
  return out;
}

Vector laplace_transform(const std::function<Scalar(double)>& f, const std::vector<double>& probes, double T,
                         double h) {
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (!(probes[i] > 0.0)) throw DomainError("probe at index " + std::to_string(i) + " must be positive");
  const KernelSpec spec = laplace_kernel(probes, T, h);
  Vector fy(static_cast<Eigen::Index>(spec.y.nodes.size()));
  for (std::size_t j = 0; j < spec.y.nodes.size(); ++j) fy[static_cast<Eigen::Index>(j)] = f(spec.y.nodes[j]);
  return kernel_as_condexp(spec, fy).via_condexp;
}

LaplaceReport laplace_demo(double a, const std::vector<double>& probes, double T, double h) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("a must be positive");
  const Vector computed = laplace_transform([a](double t) { return Scalar(std::exp(-a * t)); }, probes, T, h);
  LaplaceReport r{a, T, h, {}};
  for (std::size_t i = 0; i < probes.size(); ++i) {
    LaplaceRow row;
    row.x = probes[i];
    row.computed = computed[static_cast<Eigen::Index>(i)].real();
    row.exact = 1.0 / (row.x + a);
    row.abs_err = std::abs(row.computed - row.exact);
    row.budget_constant = row.abs_err / (h * h + std::exp(-T * (row.x + a)));
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace condop
