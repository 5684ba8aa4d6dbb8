#pragma once

#include <optional>
#include <string>
#include <vector>

#include "condop/condexp.hpp"

namespace condop {

/// A linear operator on a finite space given only by its matrix.
struct AbstractOperator {
  MeasureSpace space;
  Matrix matrix;  // (output point, input point)

  AbstractOperator(MeasureSpace s, Matrix m);
};

struct HypothesisReport {
  bool positive = false;            // all entries real and >= -1e-12
  double idempotence_residual = 0;  // max |T^2 - T| / max |T|
  double unit_residual = 0;         // max |T1 - 1|
  double multiplicativity_residual = 0;  // worst T(f Tg) - Tf Tg over probes, relative
  double sublattice_residual = 0;        // worst dist(|Tf|, R(T)) / ||Tf||
  bool idempotent = false;
  bool preserves_unit = false;
  bool multiplicative = false;
  bool sublattice = false;
  std::vector<std::string> notes;
  std::vector<std::string> failures;

  /// T(f Tg) = Tf Tg: the hypothesis that yields T = E(w .).
  bool multiplicative_hypothesis() const { return multiplicative; }
  /// Positive idempotent, T1 = 1, sublattice range.
  bool projection_hypotheses() const { return positive && idempotent && preserves_unit && sublattice; }
};

HypothesisReport verify_projection_hypotheses(const AbstractOperator& t, int probes, std::uint64_t seed = 0);

struct RecoveredStructure {
  PartitionAlgebra partition;
  Function w;
  std::optional<Function> k;
  bool ew_is_one = false;   // E(w) = 1 per block
  bool ewk_is_one = false;  // E(wk) = 1 per block
  bool ek_is_one = false;   // E(k) = 1 per block
  double rebuild_residual = 0.0;
};

/// Matrix of f -> k E(w f) (k = 1 when absent).
Matrix build_conditional_matrix(const PartitionAlgebra& partition, const Function& w, const Function* k = nullptr);

/// Recovers (partition, w) with T = E(w .). Requires T(f Tg) = Tf Tg
/// unless `attempt` is set. Throws NotConditionalType on any failure.
RecoveredStructure recover_structure(const AbstractOperator& t, bool attempt = false);

/// Recovers (partition, w, k) with T = k E(w .), gauge-fixed by E(k) = 1.
RecoveredStructure recover_factored(const AbstractOperator& t);

}  // namespace condop
