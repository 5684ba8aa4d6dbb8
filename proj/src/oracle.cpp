#include "condop/oracle.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include <Eigen/SVD>

#include "condop/errors.hpp"

namespace condop {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RealVector sqrt_weights(const RealVector& w) { return w.cwiseSqrt(); }

// x |x|^(e-2), with 0 at 0.
Vector duality_power(const Vector& x, double e) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    out[i] = a == 0.0 ? Scalar(0.0) : x[i] * std::pow(a, e - 2.0);
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

WeightedSvd weighted_svd(const OperatorMatrix& m, double rank_tolerance_factor) {
  const RealVector so = sqrt_weights(m.codomain_weights);
  const RealVector si = sqrt_weights(m.domain_weights);
  Matrix a = so.asDiagonal() * m.entries * si.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  WeightedSvd out;
  out.singular_values = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV();
  const double smax = out.singular_values.size() ? out.singular_values[0] : 0.0;
  out.threshold = rank_tolerance_factor * smax;
  out.rank = 0;
  if (smax > 0.0)
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
      if (out.singular_values[i] > out.threshold) ++out.rank;
  return out;
}

int numeric_rank(const OperatorMatrix& m, double rank_tolerance_factor) {
  return weighted_svd(m, rank_tolerance_factor).rank;
}

int numeric_rank(const Matrix& entries, const RealVector& domain_weights, const RealVector& codomain_weights,
                 double rank_tolerance_factor) {
  return numeric_rank(OperatorMatrix{entries, domain_weights, codomain_weights}, rank_tolerance_factor);
}

Matrix range_basis(const OperatorMatrix& m, double rank_tolerance_factor) {
  WeightedSvd s = weighted_svd(m, rank_tolerance_factor);
  return sqrt_weights(m.codomain_weights).cwiseInverse().asDiagonal() * s.left.leftCols(s.rank);
}

Matrix kernel_basis_values(const OperatorMatrix& m, double rank_tolerance_factor) {
  WeightedSvd s = weighted_svd(m, rank_tolerance_factor);
  const Eigen::Index n = s.right.cols();
  return sqrt_weights(m.domain_weights).cwiseInverse().asDiagonal() * s.right.rightCols(n - s.rank);
}

namespace detail {

double ratio(const RatioProblem& prob, const Vector& c) {
  const Vector f = prob.lift(c);
  const double fn = lp_norm_weighted(prob.domain_weights, f, prob.p);
  if (fn == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return lp_norm_weighted(prob.codomain_weights, prob.forward(f), prob.q) / fn;
}

namespace {

bool normalize(const RatioProblem& prob, Vector& c) {
  const double n = lp_norm_weighted(prob.domain_weights, prob.lift(c), prob.p);
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  c /= n;
  return true;
}

bool better(Goal goal, double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  return goal == Goal::minimize ? candidate < incumbent : candidate > incumbent;
}

// Gradient of log ||T B c||_q - log ||B c||_p with respect to the real inner
// product Re<a, b> on C^dim.
Vector log_ratio_gradient(const RatioProblem& prob, const Vector& c, bool& degenerate) {
  const Vector f = prob.lift(c);
  const Vector g = prob.forward(f);
  const double fn = lp_norm_weighted(prob.domain_weights, f, prob.p);
  const double gn = lp_norm_weighted(prob.codomain_weights, g, prob.q);
  degenerate = gn == 0.0 || fn == 0.0;
  if (degenerate) return Vector::Zero(c.size());
  Vector a = duality_power(g / gn, prob.q).cwiseProduct(prob.codomain_weights.cast<Scalar>()) / gn;
  Vector b = duality_power(f / fn, prob.p).cwiseProduct(prob.domain_weights.cast<Scalar>()) / fn;
  return prob.lift_adjoint(prob.adjoint(a) - b);
}

}  // namespace

std::vector<Vector> starting_points(const RatioProblem& prob, const OracleConfig& cfg) {
  std::vector<Vector> starts;
  starts.reserve(static_cast<std::size_t>(cfg.restarts) + static_cast<std::size_t>(prob.dim) + prob.extra_starts.size());
  for (int i = 0; i < cfg.restarts; ++i) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1)));
    std::normal_distribution<double> gauss;
    Vector c(prob.dim);
    for (Eigen::Index k = 0; k < prob.dim; ++k) c[k] = Scalar(gauss(rng), gauss(rng));
    starts.push_back(std::move(c));
  }
  for (Eigen::Index k = 0; k < prob.dim; ++k) starts.push_back(Vector::Unit(prob.dim, k));
  for (const auto& e : prob.extra_starts) starts.push_back(e);
  return starts;
}

RestartResult run_restart(const RatioProblem& prob, Goal goal, Vector c, const OracleConfig& cfg) {
  RestartResult res;
  if (!normalize(prob, c)) {
    res.value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  double value = ratio(prob, c);
  const double sign = goal == Goal::maximize ? 1.0 : -1.0;
  double t = cfg.initial_step;
  int stall = 0;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (goal == Goal::minimize && value == 0.0) break;
    bool degenerate = false;
    const Vector dir = sign * log_ratio_gradient(prob, c, degenerate);
    if (degenerate) break;
    const double dn = dir.norm();
    if (dn == 0.0 || !std::isfinite(dn)) break;
    const double cn = c.norm();
    bool accepted = false;
    Vector trial;
    double tv = value;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      trial = c + (t * cn / dn) * dir;
      if (normalize(prob, trial)) {
        tv = ratio(prob, trial);
        if (better(goal, tv, value)) {
          accepted = true;
          break;
        }
      }
      t *= cfg.step_shrink;
    }
    if (!accepted) break;
    const double improvement = std::abs(tv - value);
    c = std::move(trial);
    value = tv;
    t = std::min(2.0 * t, cfg.initial_step);
    if (improvement <= 1e-13 * std::abs(value)) {
      if (++stall >= 10) break;
    } else {
      stall = 0;
    }
  }
  res.converged = it < cfg.max_iterations;
  res.value = value;
  res.coords = std::move(c);
  return res;
}

namespace {

RatioEstimate reduce(const RatioProblem& prob, Goal goal, const std::vector<RestartResult>& results,
                     const OracleConfig& cfg) {
  RatioEstimate est;
  est.method = "optimizer";
  std::size_t best = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (std::isnan(results[i].value)) continue;
    if (best == results.size() || better(goal, results[i].value, results[best].value)) best = i;
  }
  if (best == results.size()) {
    est.method = "degenerate";
    est.value = goal == Goal::minimize ? kInf : 0.0;
    return est;
  }
  est.value = results[best].value;
  est.certificate = prob.lift(results[best].coords);
  est.converged = results[best].converged;

  double lo = kInf, hi = -kInf;
  const std::size_t nrand = std::min<std::size_t>(static_cast<std::size_t>(cfg.restarts), results.size());
  for (std::size_t i = 0; i < nrand; ++i) {
    if (std::isnan(results[i].value)) continue;
    lo = std::min(lo, results[i].value);
    hi = std::max(hi, results[i].value);
  }
  est.restarts_disagree = nrand > 1 && hi > 0.0 && (hi - lo) > 1e-6 * hi;

  bool corroborated = false;
  if (prob.dim <= cfg.dense_sampling_dimension_cap) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ 0xD1B54A32D192ED03ULL));
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    double sampled = goal == Goal::minimize ? kInf : 0.0;
    for (int s = 0; s < cfg.dense_samples; ++s) {
      Vector c(prob.dim);
      // Half of the samples are pushed toward the coordinate faces, where
      // the extremizers of the diagonal cases live.
      const bool sparse = (s & 1) != 0;
      for (Eigen::Index k = 0; k < prob.dim; ++k) {
        Scalar z(gauss(rng), gauss(rng));
        if (sparse) z *= std::pow(unif(rng), 4.0);
        c[k] = z;
      }
      const double r = ratio(prob, c);
      if (better(goal, r, sampled)) sampled = r;
    }
    corroborated = goal == Goal::minimize ? sampled >= est.value * (1.0 - 1e-9)
                                          : sampled <= est.value * (1.0 + 1e-9);
  }
  est.upper_bound_only = !corroborated;
  return est;
}

}  // namespace

RatioEstimate optimize_ratio(const RatioProblem& prob, Goal goal, const OracleConfig& cfg) {
  const std::vector<Vector> starts = starting_points(prob, cfg);
  std::vector<RestartResult> results(starts.size());
  const auto n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i)
    results[static_cast<std::size_t>(i)] = run_restart(prob, goal, starts[static_cast<std::size_t>(i)], cfg);
  return reduce(prob, goal, results, cfg);
}

RatioProblem make_problem(const CondOperator& op, const Matrix* basis) {
  auto shared = std::make_shared<const CondOperator>(op);
  RatioProblem prob;
  const auto n = static_cast<Eigen::Index>(op.dim());
  RealVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = op.space().weight(static_cast<std::size_t>(i));
  prob.domain_weights = w;
  prob.codomain_weights = w;
  prob.p = op.exponents().p();
  prob.q = op.exponents().q();
  prob.forward = [shared](const Vector& f) { return apply_values(*shared, f); };
  // Plain conjugate transpose of the matrix: mu * T*(y / mu).
  prob.adjoint = [shared, w](const Vector& y) {
    Vector scaled = y.cwiseQuotient(w.cast<Scalar>());
    return Vector(adjoint_values(*shared, scaled).cwiseProduct(w.cast<Scalar>()));
  };
  if (basis == nullptr) {
    // f = D^{-1/2} c, so c lives in mu-orthonormal coordinates.
    const RealVector inv_sqrt = w.cwiseSqrt().cwiseInverse();
    prob.dim = n;
    prob.lift = [inv_sqrt](const Vector& c) { return Vector(c.cwiseProduct(inv_sqrt.cast<Scalar>())); };
    prob.lift_adjoint = prob.lift;
  } else {
    const Matrix b = *basis;
    prob.dim = b.cols();
    prob.lift = [b](const Vector& c) { return Vector(b * c); };
    prob.lift_adjoint = [b](const Vector& f) { return Vector(b.adjoint() * f); };
    // Weighted projections of the point indicators onto span(b).
    for (Eigen::Index x = 0; x < n; ++x) {
      Vector c = b.row(x).adjoint() * w[x];
      if (c.norm() > 1e-12) prob.extra_starts.push_back(std::move(c));
    }
  }
  return prob;
}

}  // namespace detail

namespace serial {

RatioEstimate optimize_ratio(const detail::RatioProblem& prob, detail::Goal goal, const OracleConfig& cfg) {
  const std::vector<Vector> starts = detail::starting_points(prob, cfg);
  std::vector<detail::RestartResult> results;
  results.reserve(starts.size());
  for (const auto& s : starts) results.push_back(detail::run_restart(prob, goal, s, cfg));
  return detail::reduce(prob, goal, results, cfg);
}

}  // namespace serial

namespace {

bool is_two_two(const CondOperator& op) { return op.exponents().p() == 2.0 && op.exponents().q() == 2.0; }

RatioEstimate degenerate(double value) {
  RatioEstimate e;
  e.value = value;
  e.method = "degenerate";
  return e;
}

RatioEstimate exact_from_svd(const WeightedSvd& s, const OperatorMatrix& m, Eigen::Index k) {
  RatioEstimate e;
  e.method = "exact-svd";
  e.value = s.singular_values[k];
  e.certificate = sqrt_weights(m.domain_weights).cwiseInverse().asDiagonal() * s.right.col(k);
  return e;
}

}  // namespace

RatioEstimate min_modulus(const CondOperator& op, bool restrict_to_kernel_complement, const OracleConfig& cfg) {
  const OperatorMatrix m = matrix_of(op);
  const WeightedSvd s = weighted_svd(m, cfg.rank_tolerance_factor);
  const auto n = static_cast<Eigen::Index>(op.dim());
  if (restrict_to_kernel_complement && s.rank == 0) return degenerate(kInf);
  if (is_two_two(op)) {
    const Eigen::Index k = restrict_to_kernel_complement ? s.rank - 1 : n - 1;
    return exact_from_svd(s, m, k);
  }
  if (!restrict_to_kernel_complement || s.rank == n) {
    if (!restrict_to_kernel_complement && s.rank < n) {
      // Nontrivial kernel: the infimum is attained at 0 by a kernel vector.
      RatioEstimate e = exact_from_svd(s, m, n - 1);
      e.value = 0.0;
      e.method = "kernel";
      return e;
    }
    return detail::optimize_ratio(detail::make_problem(op, nullptr), detail::Goal::minimize, cfg);
  }
  const Matrix basis = sqrt_weights(m.domain_weights).cwiseInverse().asDiagonal() * s.right.leftCols(s.rank);
  return detail::optimize_ratio(detail::make_problem(op, &basis), detail::Goal::minimize, cfg);
}

RatioEstimate maximize_ratio(const CondOperator& op, const OracleConfig& cfg) {
  if (is_two_two(op)) {
    const OperatorMatrix m = matrix_of(op);
    const WeightedSvd s = weighted_svd(m, cfg.rank_tolerance_factor);
    return exact_from_svd(s, m, 0);
  }
  if (op.u().is_zero() || op.w().is_zero()) return degenerate(0.0);
  return detail::optimize_ratio(detail::make_problem(op, nullptr), detail::Goal::maximize, cfg);
}

double distance_to_range(const CondOperator& op, const Function& g, const OracleConfig& cfg) {
  if (!g.space().same_as(op.space())) throw DomainError("g lives on a different space than the operator");
  const OperatorMatrix m = matrix_of(op);
  const Matrix basis = range_basis(m, cfg.rank_tolerance_factor);
  const RealVector& w = m.codomain_weights;
  const double q = op.exponents().q();
  const Vector& gv = g.values();
  if (basis.cols() == 0) return lp_norm_weighted(w, gv, q);

  // Weighted least squares: the basis is mu-orthonormal.
  Vector c = basis.adjoint() * w.cast<Scalar>().cwiseProduct(gv);
  Vector resid = gv - basis * c;
  double best = lp_norm_weighted(w, resid, q);
  if (q == 2.0 || best == 0.0) return best;

  // Convex descent on ||g - R c||_q from the least-squares start.
  double t = cfg.initial_step;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double rn = lp_norm_weighted(w, resid, q);
    if (rn == 0.0) break;
    const Vector grad = -(basis.adjoint() * duality_power(resid / rn, q).cwiseProduct(w.cast<Scalar>()));
    const double gn = grad.norm();
    if (gn == 0.0) break;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      const Vector trial = c - (t * std::max(1.0, c.norm()) / gn) * grad;
      const Vector tr = gv - basis * trial;
      const double v = lp_norm_weighted(w, tr, q);
      if (v < best) {
        const double gain = best - v;
        c = trial;
        resid = tr;
        best = v;
        accepted = gain > 1e-15 * best;
        break;
      }
      t *= cfg.step_shrink;
    }
    if (!accepted) break;
    t = std::min(2.0 * t, cfg.initial_step);
  }
  return best;
}

}  // namespace condop
