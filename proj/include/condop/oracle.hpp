#pragma once

#include <functional>
#include <vector>

#include "condop/oracle_types.hpp"
#include "condop/weighted_ops.hpp"

namespace condop {

/// SVD of D_out^{1/2} M D_in^{-1/2}, so that l2 singular values match the
/// L^2(mu) geometry of domain and codomain.
struct WeightedSvd {
  RealVector singular_values;  // descending
  Matrix left;                 // columns: codomain singular vectors (l2-orthonormal)
  Matrix right;                // columns: domain singular vectors (l2-orthonormal)
  double threshold = 0.0;      // rank_tolerance_factor * largest singular value
  int rank = 0;
};

WeightedSvd weighted_svd(const OperatorMatrix& m, double rank_tolerance_factor);

/// Number of weighted singular values above rank_tolerance_factor * sigma_max.
int numeric_rank(const OperatorMatrix& m, double rank_tolerance_factor = 1e-9);
int numeric_rank(const Matrix& entries, const RealVector& domain_weights, const RealVector& codomain_weights,
                 double rank_tolerance_factor = 1e-9);

/// Columns form a mu-orthonormal basis (point values) of the numeric range / kernel.
Matrix range_basis(const OperatorMatrix& m, double rank_tolerance_factor);
Matrix kernel_basis_values(const OperatorMatrix& m, double rank_tolerance_factor);

/// inf ||Tf||_q / ||f||_p over f != 0, optionally over the mu-orthogonal
/// complement of the kernel. Exact SVD when p = q = 2, otherwise multi-start
/// projected gradient on the L^p sphere.
RatioEstimate min_modulus(const CondOperator& op, bool restrict_to_kernel_complement, const OracleConfig& cfg = {});

/// sup ||Tf||_q / ||f||_p.
RatioEstimate maximize_ratio(const CondOperator& op, const OracleConfig& cfg = {});

/// min over the range of ||g - Tf||_q.
double distance_to_range(const CondOperator& op, const Function& g, const OracleConfig& cfg = {});

// Generic ratio search used by min_modulus / maximize_ratio. Exposed so the
// restart loop can be benchmarked and checked against its serial reference.
namespace detail {

enum class Goal { minimize, maximize };

/// Search space f = B c for coordinates c in C^dim.
struct RatioProblem {
  Eigen::Index dim = 0;
  std::function<Vector(const Vector&)> lift;          // c -> f
  std::function<Vector(const Vector&)> lift_adjoint;  // plain conjugate transpose of lift
  std::function<Vector(const Vector&)> forward;       // f -> Tf
  std::function<Vector(const Vector&)> adjoint;       // plain conjugate transpose of T
  RealVector domain_weights;
  RealVector codomain_weights;
  double p = 2.0;
  double q = 2.0;
  std::vector<Vector> extra_starts;  // in c coordinates
};

struct RestartResult {
  double value = 0.0;
  Vector coords;
  bool converged = true;
};

double ratio(const RatioProblem& prob, const Vector& c);

/// All starting points in restart order: seeded random samples, then the
/// coordinate indicators, then the problem's extra starts.
std::vector<Vector> starting_points(const RatioProblem& prob, const OracleConfig& cfg);

RestartResult run_restart(const RatioProblem& prob, Goal goal, Vector start, const OracleConfig& cfg);

/// Runs every restart (in parallel) and reduces to the best; ties go to the
/// lowest restart index.
RatioEstimate optimize_ratio(const RatioProblem& prob, Goal goal, const OracleConfig& cfg);

RatioProblem make_problem(const CondOperator& op, const Matrix* basis);

}  // namespace detail

namespace serial {
RatioEstimate optimize_ratio(const detail::RatioProblem& prob, detail::Goal goal, const OracleConfig& cfg);
}  // namespace serial

}  // namespace condop
