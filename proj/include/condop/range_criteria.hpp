#pragma once

#include <optional>
#include <string>
#include <vector>

#include "condop/oracle.hpp"
#include "condop/weighted_ops.hpp"

namespace condop {

/// Supports of v, E(u) and E(|u|^p') after thresholding at 1e-12 * max.
struct SupportSets {
  std::vector<std::size_t> S_v;            // points where v != 0
  std::vector<std::size_t> N_v;            // atom blocks where v != 0
  std::vector<std::size_t> active_blocks;  // every block (atom or cell) where v != 0
  std::vector<std::size_t> N_Eu;           // atom blocks where E(u) != 0
  std::vector<std::size_t> Z;              // points where E(|u|^p') = 0
  bool B_active = false;                   // v != 0 somewhere on cell points
  bool Eu_on_B = false;                    // E(u) != 0 somewhere on cell points
};

SupportSets support_sets(const CondOperator& op);

/// Relative zero threshold used for every support computation.
constexpr double kSupportThreshold = 1e-12;

// Truth of a condition on a single finite instance. Claims about the
// non-atomic part cannot be settled at one resolution and stay `undetermined`
// until a refinement family decides them.
enum class Truth { yes, no, undetermined };

std::string_view to_string(Truth t);

/// Conditions (1)-(4) of the cross-exponent classification, in this order:
/// (1) closed range, (2) finite rank, (3) v-support finiteness,
/// (4) E(u)-support finiteness.
struct ChainEvaluation {
  Truth closed_range = Truth::undetermined;
  Truth finite_rank = Truth::undetermined;
  Truth v_condition = Truth::undetermined;
  Truth eu_condition = Truth::undetermined;
  bool implications_hold = true;  // (3)->(2)->(1)->(4) on the determined conditions
};

struct ClassifierReport {
  ExponentCase case_tag = ExponentCase::same;
  double delta = 0.0;  // min of v over S_v (0 when S_v is empty)
  SupportSets supports;
  std::optional<ChainEvaluation> chain;
  int rank = 0;
  double bounded_below = 0.0;  // min modulus on the kernel complement
  bool bounded_below_flagged = false;
  bool injective = false;
  std::optional<double> bounded_below_full;  // unrestricted, recorded when injective

  // Sufficient-condition path for p = q.
  bool hypothesis_b = false;
  double delta_b = 0.0;
  std::optional<double> preimage_residual;

  std::optional<double> takagi_b;
  std::optional<double> norm_membership;

  bool closed_range_verdict = false;
  std::vector<std::string> notes;
  std::vector<std::string> audit_failures;

  bool audit_passed() const { return audit_failures.empty(); }
};

/// Failures of the report's internal consistency: rank against |N_v| when
/// condition (3) holds, rank against the active-block count, the implication
/// chain, the preimage round trip and delta against the bounded-below constant.
std::vector<std::string> audit_report(const ClassifierReport& report);

/// p = q, w = 1. Necessary direction (delta >= bounded-below constant when
/// injective) and sufficient direction with the explicit preimage
/// g -> (g / E(u)) chi_S.
ClassifierReport check_same_exponent(const CondOperator& op, const OracleConfig& cfg = {});

/// (g / E(u)) chi_S for an A-measurable g; throws PreconditionError outside
/// the sufficient hypothesis.
Function same_exponent_preimage(const CondOperator& op, const Function& g);

/// q < p (`down`) or p < q (`up`): evaluates conditions (1)-(4) on the instance.
ClassifierReport classify_cross_exponent(const CondOperator& op, ExponentCase direction, const OracleConfig& cfg = {});

struct TakagiQuantities {
  double b = 0.0;                // extended real: may be +inf
  double norm_membership = 0.0;  // ||E(u)||_r (down) or ||1/E(u)||_s over S (up)
  std::string note;
};

TakagiQuantities takagi_quantities(const CondOperator& op);

/// Equivalences for A-measurable u (E(u) = u).
ClassifierReport ameasurable_equivalences(const CondOperator& op, const OracleConfig& cfg = {});

struct SurjectivityReport {
  bool passed = false;  // Z is empty
  std::vector<std::size_t> Z;
  struct Certificate {
    std::size_t block;
    double distance;
    double indicator_norm;
  };
  std::vector<Certificate> certificates;  // one per block inside Z
  std::vector<std::string> audit_failures;
};

/// Surjectivity onto L^p(A) forces E(|u|^p') > 0 everywhere; for every block
/// inside Z, certifies chi_F lies at distance ||chi_F||_q from the range.
SurjectivityReport surjectivity_necessary(const CondOperator& op, const OracleConfig& cfg = {});

}  // namespace condop
