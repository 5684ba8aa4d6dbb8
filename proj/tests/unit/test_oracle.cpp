#include <gtest/gtest.h>

#include "condop/oracle.hpp"
#include "instances.hpp"
#include "reference.hpp"

using namespace condop;

namespace {

CondOperator em(const PartitionAlgebra& p, const std::vector<double>& u, double pe, double qe) {
  return CondOperator::em_u(p, Function::from_real(p.space(), u), ExponentPair(pe, qe));
}

PartitionAlgebra halves(const MeasureSpace& s) {
  const std::vector<std::size_t> a{0, 0, 1, 1};
  return make_partition(s, a);
}

double certificate_ratio(const CondOperator& op, const RatioEstimate& r) {
  const Vector tf = apply_values(op, r.certificate);
  return lp_norm(op.space(), tf, op.exponents().q()) / lp_norm(op.space(), r.certificate, op.exponents().p());
}

Matrix complement_basis(const CondOperator& op) {
  const OperatorMatrix m = matrix_of(op);
  const WeightedSvd s = weighted_svd(m, 1e-9);
  return m.domain_weights.cwiseSqrt().cwiseInverse().asDiagonal() * s.right.leftCols(s.rank);
}

}  // namespace

TEST(NumericRank, Examples) {
  const MeasureSpace s = make_space({0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(numeric_rank(matrix_of(em(halves(s), {1, 1, 1, 1}, 2, 2))), 2);
  EXPECT_EQ(numeric_rank(matrix_of(em(halves(s), {0, 0, 0, 0}, 2, 2))), 0);
  EXPECT_EQ(numeric_rank(matrix_of(em(singleton_partition(s), {1, 0, 2, 3}, 2, 2))), 3);
}

TEST(NumericRank, WeightingMatters) {
  // Tiny weights must not fake a rank drop once the geometry is weighted.
  const MeasureSpace s = make_space({1e-8, 1.0});
  EXPECT_EQ(numeric_rank(matrix_of(em(singleton_partition(s), {1, 1}, 2, 2))), 2);
}

TEST(MinModulus, ProjectionRestricted) {
  const MeasureSpace s = make_space({0.1, 0.2, 0.3, 0.4});
  const RatioEstimate r = min_modulus(em(halves(s), {1, 1, 1, 1}, 2, 2), true);
  EXPECT_EQ(r.method, "exact-svd");
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  const RatioEstimate full = min_modulus(em(halves(s), {1, 1, 1, 1}, 2, 2), false);
  EXPECT_NEAR(full.value, 0.0, 1e-12);
}

TEST(MinModulus, DiagonalSameExponent) {
  const MeasureSpace s = make_space({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const CondOperator op = em(singleton_partition(s), {0.3, 0.7, 2}, 3, 3);
  const RatioEstimate r = min_modulus(op, false);
  EXPECT_NEAR(r.value, 0.3, 1e-9);
  ASSERT_EQ(r.certificate.size(), 3);
  const RealVector mag = r.certificate.cwiseAbs();
  EXPECT_GT(mag[0], 1e3 * std::max(mag[1], mag[2]));
}

TEST(MinModulus, DiagonalAtomsDown) {
  const MeasureSpace s = make_space({0.5, 0.25, 0.125, 0.125});
  const std::vector<double> u{1.0, 0.8, 3.0, 0.6};
  const RatioEstimate r = min_modulus(em(singleton_partition(s), u, 3.0, 1.5), false);
  const double want = ref::diag_point_extreme(ref::weights(s), u, 3.0, 1.5, false);
  EXPECT_NEAR(r.value, want, 1e-6 * want);
}

TEST(MinModulus, DegenerateRestricted) {
  const MeasureSpace s = make_space({0.5, 0.5});
  const RatioEstimate r = min_modulus(em(trivial_partition(s), {0, 0}, 3, 2), true);
  EXPECT_EQ(r.method, "degenerate");
  EXPECT_TRUE(std::isinf(r.value));
}

TEST(MaximizeRatio, Examples) {
  const MeasureSpace s = make_space({0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(maximize_ratio(em(halves(s), {1, 1, 1, 1}, 2, 2)).value, 1.0, 1e-12);

  const std::vector<double> u{0.5, -3, 2, 1};
  const RatioEstimate down = maximize_ratio(em(singleton_partition(s), u, 3.5, 1.25));
  const double wd = ref::diag_norm_down(ref::weights(s), u, 3.5, 1.25);
  EXPECT_NEAR(down.value, wd, 1e-6 * wd);

  const RatioEstimate up = maximize_ratio(em(singleton_partition(s), u, 1.25, 3.5));
  const double wu = ref::diag_point_extreme(ref::weights(s), u, 1.25, 3.5, true);
  EXPECT_NEAR(up.value, wu, 1e-6 * wu);

  EXPECT_EQ(maximize_ratio(em(halves(s), {0, 0, 0, 0}, 3, 2)).value, 0.0);
}

TEST(DistanceToRange, Examples) {
  const MeasureSpace s = make_space({0.25, 0.25, 0.25, 0.25});
  const CondOperator op = em(halves(s), {0, 0, 1, 1}, 2, 2);
  const Function chi0 = Function::indicator(s, {0, 1});
  EXPECT_NEAR(distance_to_range(op, chi0), lp_norm(chi0, 2.0), 1e-14);

  std::mt19937_64 rng(1);
  const Function g = apply(op, Function(s, testkit::random_vector(rng, 4)));
  EXPECT_LE(distance_to_range(op, g), 1e-10);

  const CondOperator zero = em(halves(s), {0, 0, 0, 0}, 3, 1.5);
  const Function h = Function::from_real(s, {1, 2, 3, 4});
  EXPECT_NEAR(distance_to_range(zero, h), lp_norm(h, 1.5), 1e-14);
}

TEST(DistanceToRange, NonHilbertExponent) {
  // Range = A-measurable functions; the best L^3 approximation of g on a block
  // of two equal points is the midpoint of its two values.
  const MeasureSpace s = make_space({0.5, 0.5});
  const CondOperator op = em(trivial_partition(s), {1, 1}, 3, 3);
  const Function g = Function::from_real(s, {0, 2});
  EXPECT_NEAR(distance_to_range(op, g), 1.0, 1e-6);
}

TEST(Oracle, ExactAndOptimizerAgree) {
  std::mt19937_64 rng(41);
  OracleConfig cfg;
  cfg.restarts = 8;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 2 + trial % 7);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 4);
    const CondOperator op = CondOperator::em_u(p, Function(s, testkit::random_vector(rng, s.size())), ExponentPair(2, 2));
    const RatioEstimate exact_max = maximize_ratio(op, cfg);
    const RatioEstimate opt_max =
        detail::optimize_ratio(detail::make_problem(op, nullptr), detail::Goal::maximize, cfg);
    EXPECT_NEAR(opt_max.value, exact_max.value, 1e-6 * exact_max.value);

    const RatioEstimate exact_min = min_modulus(op, true, cfg);
    if (exact_min.method != "exact-svd") continue;
    const Matrix basis = complement_basis(op);
    const RatioEstimate opt_min =
        detail::optimize_ratio(detail::make_problem(op, &basis), detail::Goal::minimize, cfg);
    EXPECT_NEAR(opt_min.value, exact_min.value, 1e-6 * exact_min.value);
  }
}

TEST(Oracle, CertificatesAndOrdering) {
  std::mt19937_64 rng(43);
  OracleConfig cfg;
  cfg.restarts = 6;
  for (int trial = 0; trial < 40; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 2 + trial % 6);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 3);
    const double pe = 1.3 + 0.05 * trial, qe = 3.2 - 0.04 * trial;
    const CondOperator op = CondOperator::em_u(p, Function(s, testkit::random_vector(rng, s.size())), ExponentPair(pe, qe));
    const RatioEstimate hi = maximize_ratio(op, cfg);
    const RatioEstimate lo = min_modulus(op, true, cfg);
    if (lo.method == "degenerate") continue;
    EXPECT_LE(lo.value, hi.value * (1 + 1e-12));
    EXPECT_NEAR(certificate_ratio(op, hi), hi.value, 1e-12 * hi.value);
    EXPECT_NEAR(certificate_ratio(op, lo), lo.value, 1e-12 * std::max(lo.value, 1e-300));
  }
}

TEST(Oracle, DeterministicAndSerialIdentical) {
  std::mt19937_64 rng(47);
  OracleConfig cfg;
  cfg.seed = 99;
  cfg.restarts = 8;
  for (int trial = 0; trial < 10; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 3 + trial);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 3);
    const CondOperator op = CondOperator::em_u(p, Function(s, testkit::random_vector(rng, s.size())), ExponentPair(3, 1.5));
    const auto prob = detail::make_problem(op, nullptr);
    const RatioEstimate a = detail::optimize_ratio(prob, detail::Goal::maximize, cfg);
    const RatioEstimate b = detail::optimize_ratio(prob, detail::Goal::maximize, cfg);
    const RatioEstimate c = serial::optimize_ratio(prob, detail::Goal::maximize, cfg);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.value, c.value);
    EXPECT_TRUE((a.certificate.array() == c.certificate.array()).all());
  }
}

TEST(Oracle, StartingPointsIncludeIndicators) {
  const MeasureSpace s = make_space({0.2, 0.3, 0.5});
  const auto prob = detail::make_problem(em(singleton_partition(s), {1, 2, 3}, 3, 2), nullptr);
  OracleConfig cfg;
  cfg.restarts = 4;
  const auto starts = detail::starting_points(prob, cfg);
  ASSERT_EQ(starts.size(), 4u + 3u);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Vector& e = starts[static_cast<std::size_t>(4 + j)];
    EXPECT_EQ(e[j], Scalar(1.0));
    EXPECT_EQ(e.cwiseAbs().sum(), 1.0);
  }
}
