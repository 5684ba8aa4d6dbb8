#pragma once

#include <optional>
#include <string_view>

#include "condop/condexp.hpp"
#include "condop/oracle_types.hpp"

namespace condop {

enum class ExponentCase { same, down, up };  // p = q, q < p, p < q

std::string_view to_string(ExponentCase c);

/// Exponents of T : L^p -> L^q with their conjugates and the auxiliary r, s.
class ExponentPair {
 public:
  ExponentPair(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }
  double p_conj() const { return p_ / (p_ - 1.0); }
  double q_conj() const { return q_ / (q_ - 1.0); }
  ExponentCase exponent_case() const;

  /// 1/r = 1/q - 1/p, defined for q < p.
  std::optional<double> r() const;
  /// 1/s = 1/p - 1/q, defined for p < q.
  std::optional<double> s() const;

 private:
  double p_;
  double q_;
};

enum class Codomain { sigma, algebra };

std::string_view to_string(Codomain c);

/// f -> w E(u f) from L^p(Sigma) to L^q(Sigma) or L^q(A).
class CondOperator {
 public:
  CondOperator(PartitionAlgebra partition, Function u, Function w, ExponentPair exponents, Codomain codomain);

  /// E M_u with w = 1 and codomain L^q(A).
  static CondOperator em_u(PartitionAlgebra partition, Function u, ExponentPair exponents);

  const PartitionAlgebra& partition() const { return partition_; }
  const MeasureSpace& space() const { return partition_.space(); }
  std::size_t dim() const { return partition_.space().size(); }
  const Function& u() const { return u_; }
  const Function& w() const { return w_; }
  const ExponentPair& exponents() const { return exponents_; }
  Codomain codomain() const { return codomain_; }
  bool w_is_one() const;

  /// Dimension of the declared codomain: number of points or number of blocks.
  std::size_t codomain_dim() const;

  CondOperator with_u(Function u) const;
  CondOperator with_codomain(Codomain c) const;

 private:
  PartitionAlgebra partition_;
  Function u_;
  Function w_;
  ExponentPair exponents_;
  Codomain codomain_;
};

Function apply(const CondOperator& op, const Function& f);
Vector apply_values(const CondOperator& op, const Vector& f);

/// Adjoint in the pairing <f, g> = sum f conj(g) mu:  T* g = conj(u) E(conj(w) g).
Vector adjoint_values(const CondOperator& op, const Vector& g);

/// Dense realization of an operator together with the point weights that
/// define the L^p geometry of its domain and codomain.
struct OperatorMatrix {
  Matrix entries;  // (output point, input point)
  RealVector domain_weights;
  RealVector codomain_weights;
};

OperatorMatrix matrix_of(const CondOperator& op);

namespace serial {
OperatorMatrix matrix_of(const CondOperator& op);
}  // namespace serial

/// (sum |f|^p mu)^(1/p). Scaled by max |f| to stay finite for large p.
double lp_norm(const MeasureSpace& space, const Vector& f, double p);
double lp_norm(const Function& f, double p);
double sup_norm(const Function& f);
double lp_norm_weighted(const RealVector& weights, const Vector& f, double p);

/// (E(|u|^e'))^(1/e') with e' = p' when p = q, else q'.
Function v_weight(const CondOperator& op);

/// Pointwise (E(|u|^e))^(1/e) for an explicit exponent.
Function conditional_power_mean(const PartitionAlgebra& partition, const Function& u, double e);

/// v = u (E(|w|^q))^(1/q); ||w E(u f)||_q = ||E(v f)||_q for every f.
Function reduce_to_EMv(const CondOperator& op);

/// sup ||Tf||_q / ||f||_p, via oracle::maximize_ratio.
RatioEstimate opnorm_pq(const CondOperator& op, const OracleConfig& cfg = {});

}  // namespace condop
