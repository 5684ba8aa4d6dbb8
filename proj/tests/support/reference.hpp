#pragma once

// Naive reference formulas, written directly from the definitions and kept
// free of the library's kernels. Long double accumulation throughout.

#include <cmath>
#include <complex>
#include <vector>

#include "condop/condexp.hpp"

namespace ref {

using condop::PartitionAlgebra;
using condop::Scalar;
using condop::Vector;

using CL = std::complex<long double>;

/// E(f)(x) = sum_{y ~ x} f(y) mu(y) / sum_{y ~ x} mu(y), by scanning all pairs.
inline Vector cond_exp(const PartitionAlgebra& part, const Vector& f) {
  const auto& s = part.space();
  const std::size_t n = s.size();
  Vector out(f.size());
  for (std::size_t x = 0; x < n; ++x) {
    CL num = 0;
    long double den = 0;
    for (std::size_t y = 0; y < n; ++y) {
      if (part.block_of(y) != part.block_of(x)) continue;
      num += CL(f[y].real(), f[y].imag()) * static_cast<long double>(s.weight(y));
      den += s.weight(y);
    }
    const CL r = num / den;
    out[static_cast<Eigen::Index>(x)] = Scalar(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  }
  return out;
}

inline double lp_norm(const std::vector<double>& mu, const Vector& f, double p) {
  long double acc = 0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    acc += std::pow(static_cast<long double>(std::abs(f[static_cast<Eigen::Index>(i)])), p) * mu[i];
  return static_cast<double>(std::pow(acc, 1.0L / p));
}

inline std::vector<double> weights(const condop::MeasureSpace& s) {
  return std::vector<double>(s.weights().begin(), s.weights().end());
}

/// w E(u f).
inline Vector apply(const PartitionAlgebra& part, const Vector& u, const Vector& w, const Vector& f) {
  return w.cwiseProduct(cond_exp(part, u.cwiseProduct(f)));
}

/// Diagonal closed forms for u on singleton blocks.
/// q < p: (sum |u|^r mu)^(1/r), 1/r = 1/q - 1/p.
inline double diag_norm_down(const std::vector<double>& mu, const std::vector<double>& u, double p, double q) {
  const long double r = 1.0L / (1.0L / q - 1.0L / p);
  long double acc = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += std::pow(static_cast<long double>(std::abs(u[i])), r) * mu[i];
  return static_cast<double>(std::pow(acc, 1.0L / r));
}

/// max_x |u_x| mu_x^(1/q - 1/p): the norm for p < q and the minimum modulus for q < p
/// (single-point probes are extremal in both cases), over max/min respectively.
inline double diag_point_extreme(const std::vector<double>& mu, const std::vector<double>& u, double p, double q,
                                 bool take_max) {
  long double best = take_max ? -1.0L : INFINITY;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const long double v = std::abs(u[i]) * std::pow(static_cast<long double>(mu[i]), 1.0L / q - 1.0L / p);
    best = take_max ? std::max(best, v) : std::min(best, v);
  }
  return static_cast<double>(best);
}

}  // namespace ref
