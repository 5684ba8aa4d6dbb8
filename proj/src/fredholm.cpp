#include "condop/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "condop/errors.hpp"

namespace condop {

std::string_view to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::fredholm_fails: return "fredholm-fails";
    case SweepVerdict::invertible_uniform: return "invertible-uniform";
    case SweepVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

RealVector point_weights(const MeasureSpace& space) {
  RealVector w(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) w[static_cast<Eigen::Index>(i)] = space.weight(i);
  return w;
}

// Matrix of g -> conj(u) E(conj(w) g), built column by column from the formula.
Matrix adjoint_matrix(const CondOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a.col(j) = adjoint_values(op, Vector::Unit(n, j));
  return a;
}

double l2(const RealVector& w, const Vector& f) { return lp_norm_weighted(w, f, 2.0); }

std::vector<bool> membership(std::size_t n, const std::vector<std::vector<std::size_t>>& sets, const char* what) {
  std::vector<bool> seen(n, false);
  for (const auto& s : sets)
    for (std::size_t x : s) {
      if (x >= n) throw DomainError(std::string(what) + " contains point " + std::to_string(x) + " out of range");
      if (seen[x]) throw DomainError(std::string(what) + " are not pairwise disjoint (point " + std::to_string(x) + ")");
      seen[x] = true;
    }
  return seen;
}

}  // namespace

std::vector<Function> kernel_basis(const CondOperator& op, const OracleConfig& cfg) {
  const Matrix k = kernel_basis_values(matrix_of(op), cfg.rank_tolerance_factor);
  std::vector<Function> out;
  out.reserve(static_cast<std::size_t>(k.cols()));
  for (Eigen::Index j = 0; j < k.cols(); ++j) out.emplace_back(op.space(), k.col(j));
  return out;
}

FredholmReport range_analysis(const CondOperator& op, const OracleConfig& cfg) {
  FredholmReport r;
  r.codomain = op.codomain();
  const OperatorMatrix m = matrix_of(op);
  const WeightedSvd s = weighted_svd(m, cfg.rank_tolerance_factor);
  const int n = static_cast<int>(op.dim());
  r.range_rank = s.rank;
  r.kernel_dim = n - s.rank;
  r.codim = static_cast<int>(op.codomain_dim()) - s.rank;
  r.index = r.kernel_dim - r.codim;
  r.invertible = r.kernel_dim == 0 && r.codim == 0;
  if (r.kernel_dim == 0) {
    const RatioEstimate bb = min_modulus(op, false, cfg);
    r.bounded_below = bb.value;
    r.bounded_below_flagged = bb.upper_bound_only;
  }

  const ExponentPair& ex = op.exponents();
  if (ex.p() == 2.0 && ex.q() == 2.0) {
    const Matrix tstar = adjoint_matrix(op);
    const RealVector w = point_weights(op.space());
    if (op.codomain() == Codomain::sigma) {
      r.adjoint_kernel_dim = n - numeric_rank(tstar, w, w, cfg.rank_tolerance_factor);
    } else {
      const auto& part = op.partition();
      const auto nb = static_cast<Eigen::Index>(part.num_blocks());
      Matrix blocks = Matrix::Zero(n, nb);
      RealVector bw(nb);
      for (Eigen::Index b = 0; b < nb; ++b) {
        bw[b] = part.block_measure(static_cast<std::size_t>(b));
        for (std::size_t x : part.block(static_cast<std::size_t>(b))) blocks(static_cast<Eigen::Index>(x), b) = 1.0;
      }
      r.adjoint_kernel_dim =
          static_cast<int>(nb) - numeric_rank(Matrix(tstar * blocks), bw, w, cfg.rank_tolerance_factor);
    }
    if (*r.adjoint_kernel_dim != r.codim)
      r.audit_failures.push_back("codim " + std::to_string(r.codim) + " differs from dim N(T*) = " +
                                 std::to_string(*r.adjoint_kernel_dim));
  }
  if (r.kernel_dim + r.range_rank != n) r.audit_failures.push_back("rank-nullity violated");
  return r;
}

Invertibility is_invertible(const CondOperator& op, const OracleConfig& cfg) {
  if (op.codomain() != Codomain::algebra) throw PreconditionError("is_invertible needs codomain L^q(A)");
  const FredholmReport r = range_analysis(op, cfg);
  return {r.invertible, r.bounded_below};
}

WitnessFamily kernel_witness_family(const CondOperator& op, const Function& f,
                                    const std::vector<std::vector<std::size_t>>& subblocks) {
  if (!f.space().same_as(op.space())) throw DomainError("f lives on a different space than the operator");
  membership(op.dim(), subblocks, "subblocks");
  const RealVector w = point_weights(op.space());
  const double opnorm = weighted_svd(matrix_of(op), 1e-9).singular_values[0];
  auto in_kernel = [&](const Vector& v) { return l2(w, apply_values(op, v)) <= 1e-9 * opnorm * l2(w, v); };
  if (!in_kernel(f.values())) throw PreconditionError("f is not in the kernel of T");

  WitnessFamily out;
  for (std::size_t i = 0; i < subblocks.size(); ++i) {
    Vector fn = Vector::Zero(f.values().size());
    bool hits = false;
    for (std::size_t x : subblocks[i]) {
      if (f[x] != Scalar(0.0)) {
        fn[static_cast<Eigen::Index>(x)] = f[x];
        hits = true;
      }
    }
    if (!hits) {
      out.notes.push_back("subblock " + std::to_string(i) + " misses S(f); witness omitted");
      continue;
    }
    if (!in_kernel(fn))
      throw PreconditionError("witness from subblock " + std::to_string(i) +
                              " leaves the kernel (subblock is not A-measurable relative to u f)");
    out.witnesses.emplace_back(op.space(), std::move(fn));
  }
  return out;
}

WitnessFamily cokernel_witness_family(const CondOperator& op, const Function& g0,
                                      const std::vector<std::vector<std::size_t>>& pieces) {
  if (!g0.space().same_as(op.space())) throw DomainError("g0 lives on a different space than the operator");
  membership(op.dim(), pieces, "pieces");
  WitnessFamily out;
  if (g0.is_zero()) return out;

  const OperatorMatrix m = matrix_of(op);
  const RealVector& w = m.codomain_weights;
  const WeightedSvd s = weighted_svd(m, 1e-9);
  const double opnorm = s.singular_values[0];
  const double g0n = l2(w, g0.values());
  // Pairing against an orthonormal basis of R(T).
  const Matrix range = range_basis(m, 1e-9);
  const Vector pairing = range.adjoint() * w.cast<Scalar>().cwiseProduct(g0.values());
  if (pairing.size() > 0 && pairing.cwiseAbs().maxCoeff() > 1e-9 * g0n)
    throw PreconditionError("g0 does not annihilate the range of T");

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Vector gn = Vector::Zero(g0.values().size());
    for (std::size_t x : pieces[i]) gn[static_cast<Eigen::Index>(x)] = g0[x];
    if ((gn.array() == Scalar(0.0)).all()) {
      out.notes.push_back("piece " + std::to_string(i) + " misses S(g0); witness omitted");
      continue;
    }
    if (l2(w, adjoint_values(op, gn)) > 1e-9 * std::max(opnorm, 1.0) * l2(w, gn))
      throw PreconditionError("g0 restricted to piece " + std::to_string(i) + " is not in N(T*)");
    out.witnesses.emplace_back(op.space(), std::move(gn));
  }
  return out;
}

SweepVerdict sweep_verdict(const std::vector<SweepRow>& rows) {
  const std::size_t n = rows.size();
  if (n >= 3) {
    auto increasing = [&](auto field) {
      return field(rows[n - 3]) < field(rows[n - 2]) && field(rows[n - 2]) < field(rows[n - 1]);
    };
    if (increasing([](const SweepRow& r) { return r.report.kernel_dim; }) ||
        increasing([](const SweepRow& r) { return r.report.codim; }))
      return SweepVerdict::fredholm_fails;
  }
  if (n == 0) return SweepVerdict::inconclusive;
  const double first = rows.front().report.bounded_below;
  bool uniform = first > 0.0;
  for (const auto& r : rows)
    uniform = uniform && r.report.index == 0 && r.report.invertible && r.report.bounded_below >= 0.5 * first;
  return uniform ? SweepVerdict::invertible_uniform : SweepVerdict::inconclusive;
}

SweepTable dichotomy_sweep(const RefinementFamily& family, int first_level, int last_level, const IntervalRule& u_rule,
                           ExponentPair exponents, const OracleConfig& cfg) {
  if (first_level > last_level) throw DomainError("empty level range");
  SweepTable table;
  for (int level = first_level; level <= last_level; ++level) {
    const RefinementLevel& lv = family.at_level(level);
    if (!lv.space.all_cells()) throw DomainError("dichotomy sweep needs a family of cells only");
    Vector u(static_cast<Eigen::Index>(lv.space.size()));
    for (std::size_t x = 0; x < lv.space.size(); ++x) u[static_cast<Eigen::Index>(x)] = u_rule(lv.space.coordinate(x));
    const CondOperator op = CondOperator::em_u(lv.partition, Function(lv.space, std::move(u)), exponents);
    table.rows.push_back({level, lv.mesh, range_analysis(op, cfg)});
  }
  table.verdict = sweep_verdict(table.rows);
  return table;
}

}  // namespace condop
