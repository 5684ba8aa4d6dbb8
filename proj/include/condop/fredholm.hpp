#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "condop/oracle.hpp"
#include "condop/weighted_ops.hpp"

namespace condop {

struct FredholmReport {
  Codomain codomain = Codomain::algebra;
  int kernel_dim = 0;
  int range_rank = 0;
  int codim = 0;  // relative to the declared codomain
  int index = 0;  // kernel_dim - codim
  double bounded_below = 0.0;  // 0 when not injective
  bool bounded_below_flagged = false;
  bool invertible = false;
  // dim N(T*) from the adjoint formula conj(u) E(conj(w) g); filled for p = q = 2.
  std::optional<int> adjoint_kernel_dim;
  std::vector<std::string> audit_failures;
};

/// mu-orthonormal basis of the numeric kernel.
std::vector<Function> kernel_basis(const CondOperator& op, const OracleConfig& cfg = {});

FredholmReport range_analysis(const CondOperator& op, const OracleConfig& cfg = {});

struct Invertibility {
  bool invertible = false;
  double bounded_below = 0.0;
};

Invertibility is_invertible(const CondOperator& op, const OracleConfig& cfg = {});

struct WitnessFamily {
  std::vector<Function> witnesses;
  std::vector<std::string> notes;
};

/// f_n = f chi_{S(f) ∩ A_n}: disjointly supported kernel elements built from
/// one kernel element f.
WitnessFamily kernel_witness_family(const CondOperator& op, const Function& f,
                                    const std::vector<std::vector<std::size_t>>& subblocks);

/// g_n = g0 chi_{E_n} for g0 annihilating the range; each g_n lies in N(T*).
WitnessFamily cokernel_witness_family(const CondOperator& op, const Function& g0,
                                      const std::vector<std::vector<std::size_t>>& pieces);

enum class SweepVerdict { fredholm_fails, invertible_uniform, inconclusive };

std::string_view to_string(SweepVerdict v);

struct SweepRow {
  int level = 0;
  double mesh = 0.0;
  FredholmReport report;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  SweepVerdict verdict = SweepVerdict::inconclusive;
};

/// A function of the interval coordinate, sampled at cell midpoints.
using IntervalRule = std::function<Scalar(double)>;

/// Fredholm analysis of E M_u at levels [first, last] of a family of cells.
/// `fredholm-fails` when kernel_dim or codim strictly increases over the last
/// three levels; `invertible-uniform` when the index is 0 everywhere and the
/// bounded-below constant never drops below half its first-level value.
SweepTable dichotomy_sweep(const RefinementFamily& family, int first_level, int last_level, const IntervalRule& u_rule,
                           ExponentPair exponents, const OracleConfig& cfg = {});

SweepVerdict sweep_verdict(const std::vector<SweepRow>& rows);

}  // namespace condop
