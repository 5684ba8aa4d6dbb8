#include "condop/weighted_ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "condop/errors.hpp"
#include "condop/oracle.hpp"

namespace condop {

std::string_view to_string(ExponentCase c) {
  switch (c) {
    case ExponentCase::same: return "same";
    case ExponentCase::down: return "down";
    case ExponentCase::up: return "up";
  }
  return "?";
}

std::string_view to_string(Codomain c) { return c == Codomain::sigma ? "sigma" : "algebra"; }

ExponentPair::ExponentPair(double p, double q) : p_(p), q_(q) {
  if (!(std::isfinite(p) && p > 1.0) || !(std::isfinite(q) && q > 1.0))
    throw DomainError("exponents must lie in (1, inf), got p=" + std::to_string(p) + " q=" + std::to_string(q));
}

ExponentCase ExponentPair::exponent_case() const {
  if (p_ == q_) return ExponentCase::same;
  return q_ < p_ ? ExponentCase::down : ExponentCase::up;
}

std::optional<double> ExponentPair::r() const {
  if (!(q_ < p_)) return std::nullopt;
  return 1.0 / (1.0 / q_ - 1.0 / p_);
}

std::optional<double> ExponentPair::s() const {
  if (!(p_ < q_)) return std::nullopt;
  return 1.0 / (1.0 / p_ - 1.0 / q_);
}

CondOperator::CondOperator(PartitionAlgebra partition, Function u, Function w, ExponentPair exponents,
                           Codomain codomain)
    : partition_(std::move(partition)), u_(std::move(u)), w_(std::move(w)), exponents_(exponents), codomain_(codomain) {
  if (!u_.space().same_as(partition_.space())) throw DomainError("u lives on a different space than the partition");
  if (!w_.space().same_as(partition_.space())) throw DomainError("w lives on a different space than the partition");
  if (codomain_ == Codomain::algebra && !is_A_measurable(partition_, w_))
    throw DomainError("codomain L^q(A) requires an A-measurable w");
}

CondOperator CondOperator::em_u(PartitionAlgebra partition, Function u, ExponentPair exponents) {
  Function one = Function::constant(partition.space(), 1.0);
  return CondOperator(std::move(partition), std::move(u), std::move(one), exponents, Codomain::algebra);
}

bool CondOperator::w_is_one() const { return (w_.values().array() == Scalar(1.0)).all(); }

std::size_t CondOperator::codomain_dim() const {
  return codomain_ == Codomain::sigma ? dim() : partition_.num_blocks();
}

CondOperator CondOperator::with_u(Function u) const {
  return CondOperator(partition_, std::move(u), w_, exponents_, codomain_);
}

CondOperator CondOperator::with_codomain(Codomain c) const {
  return CondOperator(partition_, u_, w_, exponents_, c);
}

Vector apply_values(const CondOperator& op, const Vector& f) {
  if (static_cast<std::size_t>(f.size()) != op.dim()) throw DomainError("input vector has the wrong length");
  Vector uf = op.u().values().cwiseProduct(f);
  return op.w().values().cwiseProduct(cond_exp_values(op.partition(), uf));
}

Function apply(const CondOperator& op, const Function& f) {
  if (!f.space().same_as(op.space())) throw DomainError("function lives on a different space than the operator");
  return Function(f.space(), apply_values(op, f.values()));
}

Vector adjoint_values(const CondOperator& op, const Vector& g) {
  if (static_cast<std::size_t>(g.size()) != op.dim()) throw DomainError("input vector has the wrong length");
  Vector wg = op.w().values().conjugate().cwiseProduct(g);
  return op.u().values().conjugate().cwiseProduct(cond_exp_values(op.partition(), wg));
}

namespace {

RealVector weight_vector(const MeasureSpace& space) {
  RealVector w(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) w[static_cast<Eigen::Index>(i)] = space.weight(i);
  return w;
}

// entry(x, y) = w(x) u(y) mu(y) / mu(block(x)) when x, y share a block.
Scalar entry(const CondOperator& op, std::size_t x, std::size_t y) {
  const auto& part = op.partition();
  const std::size_t b = part.block_of(x);
  if (part.block_of(y) != b) return 0.0;
  return op.w()[x] * op.u()[y] * (op.space().weight(y) / part.block_measure(b));
}

}  // namespace

OperatorMatrix matrix_of(const CondOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  OperatorMatrix m{Matrix::Zero(n, n), weight_vector(op.space()), weight_vector(op.space())};
  const auto& part = op.partition();
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index x = 0; x < n; ++x) {
    for (std::size_t y : part.block(part.block_of(static_cast<std::size_t>(x))))
      m.entries(x, static_cast<Eigen::Index>(y)) = entry(op, static_cast<std::size_t>(x), y);
  }
  return m;
}

namespace serial {

OperatorMatrix matrix_of(const CondOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  OperatorMatrix m{Matrix::Zero(n, n), weight_vector(op.space()), weight_vector(op.space())};
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      m.entries(x, y) = entry(op, static_cast<std::size_t>(x), static_cast<std::size_t>(y));
  return m;
}

}  // namespace serial

double lp_norm_weighted(const RealVector& weights, const Vector& f, double p) {
  if (weights.size() != f.size()) throw DomainError("weights and function differ in length");
  if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
  thread_local std::vector<double> mag;
  mag.resize(static_cast<std::size_t>(f.size()));
  double scale = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double a = std::sqrt(std::norm(f[i]));
    if (!std::isfinite(a) || (a == 0.0 && f[i] != Scalar(0.0))) a = std::abs(f[i]);
    mag[static_cast<std::size_t>(i)] = a;
    scale = std::max(scale, a);
  }
  if (scale == 0.0) return 0.0;
  if (std::isinf(p)) return scale;
  double acc = 0.0;
  if (p == 2.0) {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double r = mag[static_cast<std::size_t>(i)] / scale;
      acc += r * r * weights[i];
    }
    return scale * std::sqrt(acc);
  }
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double a = mag[static_cast<std::size_t>(i)];
    if (a != 0.0) acc += std::pow(a / scale, p) * weights[i];
  }
  return scale * std::pow(acc, 1.0 / p);
}

double lp_norm(const MeasureSpace& space, const Vector& f, double p) {
  return lp_norm_weighted(weight_vector(space), f, p);
}

double lp_norm(const Function& f, double p) { return lp_norm(f.space(), f.values(), p); }

double sup_norm(const Function& f) { return f.size() ? f.values().cwiseAbs().maxCoeff() : 0.0; }

Function conditional_power_mean(const PartitionAlgebra& partition, const Function& u, double e) {
  if (!partition.space().same_as(u.space())) throw DomainError("function and partition live on different spaces");
  const auto& space = partition.space();
  Vector out(static_cast<Eigen::Index>(space.size()));
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    const auto& blk = partition.block(b);
    double scale = 0.0;
    for (std::size_t x : blk) scale = std::max(scale, std::abs(u[x]));
    double value = 0.0;
    if (scale > 0.0) {
      double acc = 0.0;
      for (std::size_t x : blk) acc += std::pow(std::abs(u[x]) / scale, e) * space.weight(x);
      value = scale * std::pow(acc / partition.block_measure(b), 1.0 / e);
    }
    for (std::size_t x : blk) out[static_cast<Eigen::Index>(x)] = value;
  }
  return Function(space, std::move(out));
}

Function v_weight(const CondOperator& op) {
  const auto& ex = op.exponents();
  const double e = ex.exponent_case() == ExponentCase::same ? ex.p_conj() : ex.q_conj();
  return conditional_power_mean(op.partition(), op.u(), e);
}

Function reduce_to_EMv(const CondOperator& op) {
  Function wq = conditional_power_mean(op.partition(), op.w(), op.exponents().q());
  return hadamard(op.u(), wq);
}

RatioEstimate opnorm_pq(const CondOperator& op, const OracleConfig& cfg) { return maximize_ratio(op, cfg); }

}  // namespace condop
