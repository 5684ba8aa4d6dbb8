#include "condop/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "condop/errors.hpp"
#include "condop/oracle.hpp"

namespace condop {

AbstractOperator::AbstractOperator(MeasureSpace s, Matrix m) : space(std::move(s)), matrix(std::move(m)) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (matrix.rows() != n || matrix.cols() != n)
    throw DomainError("operator matrix must be " + std::to_string(n) + "x" + std::to_string(n));
}

namespace {

constexpr double kRowTolerance = 1e-10;

RealVector point_weights(const MeasureSpace& space) {
  RealVector w(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) w[static_cast<Eigen::Index>(i)] = space.weight(i);
  return w;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Vector random_probe(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Scalar(g(rng), g(rng));
  return v;
}

// Groups equal rows; blocks are numbered by their lowest point index.
std::vector<std::size_t> cluster_rows(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  std::vector<std::size_t> assign(static_cast<std::size_t>(n), static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (Eigen::Index x = 0; x < n; ++x) {
    if (assign[static_cast<std::size_t>(x)] != static_cast<std::size_t>(-1)) continue;
    const std::size_t id = next++;
    assign[static_cast<std::size_t>(x)] = id;
    const double sx = rows.row(x).cwiseAbs().maxCoeff();
    for (Eigen::Index y = x + 1; y < n; ++y) {
      if (assign[static_cast<std::size_t>(y)] != static_cast<std::size_t>(-1)) continue;
      const double sy = rows.row(y).cwiseAbs().maxCoeff();
      const double diff = (rows.row(x) - rows.row(y)).cwiseAbs().maxCoeff();
      if (diff <= kRowTolerance * std::max(sx, sy)) assign[static_cast<std::size_t>(y)] = id;
    }
  }
  return assign;
}

PartitionAlgebra partition_or_reject(const MeasureSpace& space, const std::vector<std::size_t>& assign) {
  try {
    return make_partition(space, assign);
  } catch (const DomainError& e) {
    throw NotConditionalType(std::string("row classes do not form a valid partition: ") + e.what());
  }
}

bool blockwise_one(const PartitionAlgebra& part, const Vector& f) {
  const Vector avg = block_averages(part, f);
  return avg.size() == 0 || (avg.array() - Scalar(1.0)).abs().maxCoeff() <= 1e-10;
}

double rebuild_or_reject(const AbstractOperator& t, const Matrix& rebuilt) {
  const double scale = max_abs(t.matrix);
  const double resid = max_abs(Matrix(rebuilt - t.matrix));
  const double rel = scale > 0.0 ? resid / scale : resid;
  if (!(rel <= 1e-9))
    throw NotConditionalType("rebuilt operator differs from the input by " + std::to_string(rel) + " (relative)");
  return rel;
}

}  // namespace

HypothesisReport verify_projection_hypotheses(const AbstractOperator& t, int probes, std::uint64_t seed) {
  if (probes < 1) throw DomainError("need at least one probe");
  HypothesisReport r;
  const Matrix& m = t.matrix;
  const auto n = m.rows();
  const double scale = std::max(max_abs(m), 1e-300);

  r.positive = true;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (m(i, j).real() < -1e-12 || std::abs(m(i, j).imag()) > 1e-12) r.positive = false;

  r.idempotence_residual = max_abs(Matrix(m * m - m)) / scale;
  r.idempotent = r.idempotence_residual <= 1e-10;
  r.unit_residual = max_abs(Vector(m * Vector::Ones(n) - Vector::Ones(n)));
  r.preserves_unit = r.unit_residual <= 1e-10;

  std::mt19937_64 rng(seed ^ 0xA0761D6478BD642FULL);
  const OperatorMatrix om{m, point_weights(t.space), point_weights(t.space)};
  const Matrix range = range_basis(om, 1e-9);
  const Vector w = om.codomain_weights.cast<Scalar>();
  for (int k = 0; k < probes; ++k) {
    const Vector f = random_probe(rng, n);
    const Vector g = random_probe(rng, n);
    const Vector tf = m * f;
    const Vector tg = m * g;
    const Vector lhs = m * f.cwiseProduct(tg);
    const double denom = std::max(max_abs(tf) * max_abs(tg), 1e-300);
    r.multiplicativity_residual =
        std::max(r.multiplicativity_residual, max_abs(Vector(lhs - tf.cwiseProduct(tg))) / denom);

    const Vector mod = tf.cwiseAbs().cast<Scalar>();
    const Vector proj = range * (range.adjoint() * w.cwiseProduct(mod));
    const double tn = lp_norm_weighted(om.codomain_weights, tf, 2.0);
    if (tn > 0.0)
      r.sublattice_residual =
          std::max(r.sublattice_residual, lp_norm_weighted(om.codomain_weights, Vector(mod - proj), 2.0) / tn);
  }
  r.multiplicative = r.multiplicativity_residual <= 1e-10;
  r.sublattice = r.sublattice_residual <= 1e-9;
  r.notes.push_back("order continuity holds automatically on finite spaces");
  r.notes.push_back("w in L^p' carries no finite-space content");

  if (!r.positive) r.failures.push_back("positivity");
  if (!r.idempotent) r.failures.push_back("T^2 = T");
  if (!r.preserves_unit) r.failures.push_back("T1 = 1");
  if (!r.multiplicative) r.failures.push_back("T(f Tg) = Tf Tg");
  if (!r.sublattice) r.failures.push_back("range is a sublattice");
  return r;
}

Matrix build_conditional_matrix(const PartitionAlgebra& partition, const Function& w, const Function* k) {
  const auto& space = partition.space();
  if (!w.space().same_as(space) || (k && !k->space().same_as(space)))
    throw DomainError("weights live on a different space than the partition");
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    const double mb = partition.block_measure(b);
    for (std::size_t x : partition.block(b)) {
      const Scalar kx = k ? (*k)[x] : Scalar(1.0);
      for (std::size_t y : partition.block(b))
        m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = kx * w[y] * (space.weight(y) / mb);
    }
  }
  return m;
}

RecoveredStructure recover_structure(const AbstractOperator& t, bool attempt) {
  if (!attempt) {
    const HypothesisReport h = verify_projection_hypotheses(t, 4);
    if (!h.multiplicative_hypothesis())
      throw NotConditionalType("hypothesis T(f Tg) = Tf Tg fails (residual " +
                               std::to_string(h.multiplicativity_residual) + ")");
  }
  const PartitionAlgebra part = partition_or_reject(t.space, cluster_rows(t.matrix));
  Vector w(t.matrix.cols());
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    const auto x0 = static_cast<Eigen::Index>(part.block(b).front());
    for (std::size_t y : part.block(b))
      w[static_cast<Eigen::Index>(y)] =
          t.matrix(x0, static_cast<Eigen::Index>(y)) * (part.block_measure(b) / t.space.weight(y));
  }
  Function wf(t.space, std::move(w));
  const double resid = rebuild_or_reject(t, build_conditional_matrix(part, wf));
  RecoveredStructure out{part, wf, std::nullopt, false, false, false, resid};
  out.ew_is_one = blockwise_one(part, wf.values());
  return out;
}

RecoveredStructure recover_factored(const AbstractOperator& t) {
  const auto n = t.matrix.rows();
  const Vector t1 = t.matrix * Vector::Ones(n);
  for (Eigen::Index x = 0; x < n; ++x)
    if (!(t1[x].real() > 1e-12) || std::abs(t1[x].imag()) > 1e-12)
      throw PreconditionError("T1 is not strictly positive at point " + std::to_string(x));

  Matrix normalized = t.matrix;
  for (Eigen::Index x = 0; x < n; ++x) normalized.row(x) /= t1[x];
  const PartitionAlgebra part = partition_or_reject(t.space, cluster_rows(normalized));

  // On each block T1 = k E(w), so k is T1 rescaled to block average 1.
  const Vector et1 = cond_exp_values(part, t1);
  Vector k = t1.cwiseQuotient(et1);

  // Second gauge route: the dominant column of each block, rescaled the same way.
  Vector k_alt(n);
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    const auto& blk = part.block(b);
    Eigen::Index ystar = static_cast<Eigen::Index>(blk.front());
    double best = -1.0;
    for (std::size_t y : blk) {
      double colmax = 0.0;
      for (std::size_t x : blk) colmax = std::max(colmax, std::abs(t.matrix(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y))));
      if (colmax > best) {
        best = colmax;
        ystar = static_cast<Eigen::Index>(y);
      }
    }
    Scalar avg(0.0);
    for (std::size_t x : blk) avg += t.matrix(static_cast<Eigen::Index>(x), ystar) * t.space.weight(x);
    avg /= part.block_measure(b);
    if (std::abs(avg) == 0.0) throw NotConditionalType("block " + std::to_string(b) + " has a vanishing column pattern");
    for (std::size_t x : blk)
      k_alt[static_cast<Eigen::Index>(x)] = t.matrix(static_cast<Eigen::Index>(x), ystar) / avg;
  }
  if (max_abs(Vector(k_alt - k)) > 1e-10 * max_abs(k))
    throw NotConditionalType("rows are not proportional within blocks: entries do not factor as k(x) w(y)");

  Vector w(n);
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    const auto x0 = static_cast<Eigen::Index>(part.block(b).front());
    for (std::size_t y : part.block(b))
      w[static_cast<Eigen::Index>(y)] =
          t.matrix(x0, static_cast<Eigen::Index>(y)) * (part.block_measure(b) / (k[x0] * t.space.weight(y)));
  }
  Function wf(t.space, std::move(w));
  Function kf(t.space, std::move(k));
  const double resid = rebuild_or_reject(t, build_conditional_matrix(part, wf, &kf));
  RecoveredStructure out{part, wf, kf, false, false, false, resid};
  out.ew_is_one = blockwise_one(part, wf.values());
  out.ek_is_one = blockwise_one(part, kf.values());
  out.ewk_is_one = blockwise_one(part, wf.values().cwiseProduct(kf.values()));
  return out;
}

}  // namespace condop
