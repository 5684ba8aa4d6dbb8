#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "condop/measure.hpp"

namespace condop {

using Scalar = std::complex<double>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXcd;

/// Complex-valued function on a finite measure space, stored pointwise.
class Function {
 public:
  Function(MeasureSpace space, Vector values);

  static Function zero(const MeasureSpace& space);
  static Function constant(const MeasureSpace& space, Scalar c);
  static Function from_real(const MeasureSpace& space, const std::vector<double>& values);
  static Function indicator(const MeasureSpace& space, const std::vector<std::size_t>& points);

  const MeasureSpace& space() const { return space_; }
  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  Scalar operator[](std::size_t x) const { return values_[static_cast<Eigen::Index>(x)]; }

  bool is_zero() const;

 private:
  MeasureSpace space_;
  Vector values_;
};

Function hadamard(const Function& a, const Function& b);

/// True iff f is constant on every block, by exact comparison of stored values.
bool is_A_measurable(const PartitionAlgebra& partition, const Function& f);

/// E^A f: the mu-weighted average of f over the block containing each point.
Function cond_exp(const PartitionAlgebra& partition, const Function& f);

/// Raw kernel behind cond_exp. Blocks are processed in parallel; each block's
/// sum is accumulated serially in point order, so results are bit-identical to
/// serial::cond_exp_values for any thread count.
Vector cond_exp_values(const PartitionAlgebra& partition, const Vector& f);
RealVector cond_exp_values(const PartitionAlgebra& partition, const RealVector& f);

/// Per-block averages (one entry per block) instead of pointwise values.
Vector block_averages(const PartitionAlgebra& partition, const Vector& f);

namespace serial {
Vector cond_exp_values(const PartitionAlgebra& partition, const Vector& f);
}  // namespace serial

}  // namespace condop
