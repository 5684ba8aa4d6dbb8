#pragma once

#include <cstdint>
#include <string>

#include "condop/condexp.hpp"

namespace condop {

/// Knobs for the brute-force numerics in oracle.hpp.
struct OracleConfig {
  std::uint64_t seed = 0;
  int restarts = 32;          // random sphere samples, on top of the coordinate indicators
  int max_iterations = 2000;  // per restart
  double initial_step = 1.0;
  double step_shrink = 0.5;   // backtracking halving
  int max_backtracks = 60;
  double rank_tolerance_factor = 1e-9;
  int dense_sampling_dimension_cap = 6;
  int dense_samples = 20000;
};

/// An attained ratio ||Tf||_q / ||f||_p together with the probe f that attains it.
struct RatioEstimate {
  double value = 0.0;
  Vector certificate;  // point values of the attaining f (empty for degenerate cases)
  // `exact-svd` (p = q = 2), `optimizer`, or `degenerate` (empty search space).
  std::string method;
  // The value is an attained ratio but tightness is unproven: no exact path and
  // dense sampling did not corroborate it, or restarts disagreed.
  bool upper_bound_only = false;
  bool restarts_disagree = false;
  bool converged = true;
};

}  // namespace condop
