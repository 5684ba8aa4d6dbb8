#include "condop/condexp.hpp"

#include <complex>
#include <string>

#include "condop/errors.hpp"

namespace condop {

Function::Function(MeasureSpace space, Vector values) : space_(std::move(space)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != space_.size())
    throw DomainError("function has " + std::to_string(values_.size()) + " values on a " +
                      std::to_string(space_.size()) + "-point space");
  if (!values_.allFinite()) throw DomainError("function values must be finite");
}

Function Function::zero(const MeasureSpace& space) {
  return Function(space, Vector::Zero(static_cast<Eigen::Index>(space.size())));
}

Function Function::constant(const MeasureSpace& space, Scalar c) {
  return Function(space, Vector::Constant(static_cast<Eigen::Index>(space.size()), c));
}

Function Function::from_real(const MeasureSpace& space, const std::vector<double>& values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return Function(space, std::move(v));
}

Function Function::indicator(const MeasureSpace& space, const std::vector<std::size_t>& points) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.size()));
  for (std::size_t x : points) {
    if (x >= space.size()) throw DomainError("indicator point " + std::to_string(x) + " out of range");
    v[static_cast<Eigen::Index>(x)] = 1.0;
  }
  return Function(space, std::move(v));
}

bool Function::is_zero() const { return (values_.array() == Scalar(0.0)).all(); }

Function hadamard(const Function& a, const Function& b) {
  if (!a.space().same_as(b.space())) throw DomainError("pointwise product of functions on different spaces");
  return Function(a.space(), a.values().cwiseProduct(b.values()));
}

bool is_A_measurable(const PartitionAlgebra& partition, const Function& f) {
  if (!partition.space().same_as(f.space())) throw DomainError("function and partition live on different spaces");
  for (const auto& blk : partition.blocks()) {
    const Scalar first = f[blk.front()];
    for (std::size_t x : blk)
      if (f[x] != first) return false;
  }
  return true;
}

namespace {

template <class Vec>
Vec cond_exp_impl(const PartitionAlgebra& partition, const Vec& f) {
  const auto& space = partition.space();
  Vec out(f.size());
  const auto nb = static_cast<long>(partition.num_blocks());
#pragma omp parallel for schedule(dynamic, 16)
  for (long b = 0; b < nb; ++b) {
    const auto& blk = partition.block(static_cast<std::size_t>(b));
    typename Vec::Scalar acc(0.0);
    for (std::size_t x : blk) acc += f[static_cast<Eigen::Index>(x)] * space.weight(x);
    const typename Vec::Scalar avg = acc / partition.block_measure(static_cast<std::size_t>(b));
    for (std::size_t x : blk) out[static_cast<Eigen::Index>(x)] = avg;
  }
  return out;
}

void check_size(const PartitionAlgebra& partition, Eigen::Index n) {
  if (static_cast<std::size_t>(n) != partition.space().size())
    throw DomainError("vector of length " + std::to_string(n) + " on a " +
                      std::to_string(partition.space().size()) + "-point space");
}

}  // namespace

Vector cond_exp_values(const PartitionAlgebra& partition, const Vector& f) {
  check_size(partition, f.size());
  return cond_exp_impl(partition, f);
}

RealVector cond_exp_values(const PartitionAlgebra& partition, const RealVector& f) {
  check_size(partition, f.size());
  return cond_exp_impl(partition, f);
}

Vector block_averages(const PartitionAlgebra& partition, const Vector& f) {
  check_size(partition, f.size());
  const auto& space = partition.space();
  Vector out(static_cast<Eigen::Index>(partition.num_blocks()));
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    std::complex<long double> acc(0.0L);
    for (std::size_t x : partition.block(b))
      acc += std::complex<long double>(f[static_cast<Eigen::Index>(x)]) * static_cast<long double>(space.weight(x));
    out[static_cast<Eigen::Index>(b)] = Scalar(acc / static_cast<long double>(partition.block_measure(b)));
  }
  return out;
}

Function cond_exp(const PartitionAlgebra& partition, const Function& f) {
  if (!partition.space().same_as(f.space())) throw DomainError("function and partition live on different spaces");
  return Function(f.space(), cond_exp_values(partition, f.values()));
}

namespace serial {

Vector cond_exp_values(const PartitionAlgebra& partition, const Vector& f) {
  check_size(partition, f.size());
  const auto& space = partition.space();
  Vector out(f.size());
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    Scalar acc(0.0);
    for (std::size_t x : partition.block(b)) acc += f[static_cast<Eigen::Index>(x)] * space.weight(x);
    const Scalar avg = acc / partition.block_measure(b);
    for (std::size_t x : partition.block(b)) out[static_cast<Eigen::Index>(x)] = avg;
  }
  return out;
}

}  // namespace serial

}  // namespace condop
