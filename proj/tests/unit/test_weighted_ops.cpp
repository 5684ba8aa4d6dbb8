#include <gtest/gtest.h>

#include "condop/errors.hpp"
#include "condop/weighted_ops.hpp"
#include "instances.hpp"
#include "reference.hpp"

using namespace condop;

namespace {

MeasureSpace uniform4() { return make_space({0.25, 0.25, 0.25, 0.25}); }

PartitionAlgebra halves(const MeasureSpace& s) {
  const std::vector<std::size_t> a{0, 0, 1, 1};
  return make_partition(s, a);
}

CondOperator em(const PartitionAlgebra& p, std::vector<double> u, double pe = 2.0, double qe = 2.0) {
  return CondOperator::em_u(p, Function::from_real(p.space(), u), ExponentPair(pe, qe));
}

}  // namespace

TEST(ExponentPair, ConjugatesAndAuxiliary) {
  const ExponentPair e(3.0, 1.5);
  EXPECT_NEAR(1.0 / e.p() + 1.0 / e.p_conj(), 1.0, 1e-14);
  EXPECT_NEAR(1.0 / e.q() + 1.0 / e.q_conj(), 1.0, 1e-14);
  EXPECT_EQ(e.exponent_case(), ExponentCase::down);
  ASSERT_TRUE(e.r().has_value());
  EXPECT_NEAR(*e.r(), 3.0, 1e-14);
  EXPECT_FALSE(e.s().has_value());

  const ExponentPair up(1.5, 3.0);
  EXPECT_EQ(up.exponent_case(), ExponentCase::up);
  EXPECT_NEAR(*up.s(), 3.0, 1e-14);
  EXPECT_FALSE(up.r().has_value());
  EXPECT_EQ(ExponentPair(2, 2).exponent_case(), ExponentCase::same);
  EXPECT_THROW(ExponentPair(1.0, 2.0), DomainError);
  EXPECT_THROW(ExponentPair(2.0, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(Apply, IdentityWeightsGiveCondExp) {
  const MeasureSpace s = uniform4();
  const Function f = Function::from_real(s, {2, 4, 6, 8});
  const Function got = apply(em(halves(s), {1, 1, 1, 1}), f);
  const Function want = cond_exp(halves(s), f);
  EXPECT_TRUE((got.values().array() == want.values().array()).all());
}

TEST(Apply, HandExample) {
  const MeasureSpace s = uniform4();
  const Function out = apply(em(halves(s), {1, -1, 2, 0}), Function::constant(s, 1.0));
  const std::vector<double> want{0, 0, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(out[i] - want[i]), 0.0, 1e-15);
}

TEST(Apply, ZeroSymbolAnnihilates) {
  const MeasureSpace s = uniform4();
  EXPECT_TRUE(apply(em(halves(s), {0, 0, 0, 0}), Function::from_real(s, {1, 2, 3, 4})).is_zero());
}

TEST(Apply, SpaceMismatch) {
  const MeasureSpace s = uniform4();
  EXPECT_THROW(apply(em(halves(s), {1, 1, 1, 1}), Function::constant(make_space({1.0}), 1.0)), DomainError);
}

TEST(CondOperator, AlgebraCodomainNeedsMeasurableW) {
  const MeasureSpace s = uniform4();
  EXPECT_THROW(CondOperator(halves(s), Function::constant(s, 1.0), Function::from_real(s, {1, 2, 3, 3}),
                            ExponentPair(2, 2), Codomain::algebra),
               DomainError);
  EXPECT_NO_THROW(CondOperator(halves(s), Function::constant(s, 1.0), Function::from_real(s, {1, 2, 3, 3}),
                               ExponentPair(2, 2), Codomain::sigma));
}

TEST(MatrixOf, Examples) {
  const MeasureSpace two = make_space({0.5, 0.5});
  const OperatorMatrix e = matrix_of(em(trivial_partition(two), {1, 1}));
  EXPECT_TRUE((e.entries.array() == Scalar(0.5)).all());

  const MeasureSpace s = uniform4();
  const OperatorMatrix d = matrix_of(em(singleton_partition(s), {1, -2, 3, 0.5}));
  const std::vector<double> u{1, -2, 3, 0.5};
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(d.entries(i, j), i == j ? Scalar(u[i]) : Scalar(0.0));

  EXPECT_TRUE(matrix_of(em(halves(s), {0, 0, 0, 0})).entries.isZero(0.0));
}

TEST(MatrixOf, AgreesWithApplyAndSerial) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 1 + trial % 40);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 8);
    const Vector u = testkit::random_vector(rng, s.size());
    const Vector w = testkit::random_vector(rng, s.size());
    const CondOperator op(p, Function(s, u), Function(s, w), ExponentPair(2, 3), Codomain::sigma);
    const OperatorMatrix m = matrix_of(op);
    const OperatorMatrix ms = serial::matrix_of(op);
    EXPECT_TRUE((m.entries.array() == ms.entries.array()).all());
    for (int k = 0; k < 100; ++k) {
      const Vector f = testkit::random_vector(rng, s.size());
      const Vector a = apply_values(op, f);
      const Vector b = m.entries * f;
      const Vector c = ref::apply(p, u, w, f);
      const double scale = std::max(testkit::max_abs(c), 1e-300);
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * scale);
      EXPECT_LE((a - c).cwiseAbs().maxCoeff(), 1e-12 * scale);
    }
  }
}

TEST(AdjointValues, MatchesWeightedPairing) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 2 + trial % 20);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 6);
    const CondOperator op(p, Function(s, testkit::random_vector(rng, s.size())),
                          Function(s, testkit::random_vector(rng, s.size())), ExponentPair(2, 2), Codomain::sigma);
    const Vector f = testkit::random_vector(rng, s.size());
    const Vector g = testkit::random_vector(rng, s.size());
    const Vector tf = apply_values(op, f), tsg = adjoint_values(op, g);
    Scalar lhs(0), rhs(0);
    for (std::size_t x = 0; x < s.size(); ++x) {
      const auto i = static_cast<Eigen::Index>(x);
      lhs += tf[i] * std::conj(g[i]) * s.weight(x);
      rhs += f[i] * std::conj(tsg[i]) * s.weight(x);
    }
    EXPECT_LE(std::abs(lhs - rhs), 1e-11 * (1.0 + std::abs(lhs)));
  }
}

TEST(LpNorm, Examples) {
  Vector f(2);
  f << 1.0, 1.0;
  EXPECT_NEAR(lp_norm(make_space({0.5, 0.5}), f, 2.0), 1.0, 1e-15);
  f << 3.0, 4.0;
  const MeasureSpace s = make_space({1.0, 1.0});
  EXPECT_NEAR(lp_norm(s, f, 2.0), 5.0, 1e-14);
  EXPECT_NEAR(lp_norm(s, Vector(2.0 * f), 3.0), 2.0 * lp_norm(s, f, 3.0), 1e-13);
  EXPECT_EQ(lp_norm(s, Vector::Zero(2), 2.5), 0.0);
  EXPECT_NEAR(sup_norm(Function(s, f)), 4.0, 0.0);
  // Large exponents stay finite.
  f << 1e200, 1e200;
  EXPECT_TRUE(std::isfinite(lp_norm(s, f, 60.0)));
}

TEST(VWeight, Examples) {
  const MeasureSpace s = uniform4();
  const Function v = v_weight(em(halves(s), {1, -1, 2, 0}));
  const std::vector<double> want{1, 1, std::sqrt(2.0), std::sqrt(2.0)};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(v[i].real(), want[i], 1e-15);

  const Function va = v_weight(em(halves(s), {-3, -3, 0.5, 0.5}, 3.0, 3.0));
  const std::vector<double> wa{3, 3, 0.5, 0.5};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(va[i].real(), wa[i], 1e-14);

  EXPECT_TRUE(v_weight(em(halves(s), {0, 0, 0, 0})).is_zero());
}

TEST(VWeight, ExponentSelection) {
  // p = 3, q = 1.5: q' = 3 is used, not p' = 1.5.
  const MeasureSpace s = uniform4();
  const Function v = v_weight(em(halves(s), {1, 0, 0, 0}, 3.0, 1.5));
  EXPECT_NEAR(v[0].real(), std::pow(0.5, 1.0 / 3.0), 1e-14);
}

TEST(ReduceToEMv, Examples) {
  const MeasureSpace s = uniform4();
  const PartitionAlgebra p = halves(s);
  const Function u = Function::from_real(s, {1, -1, 2, 0.5});
  const CondOperator ones(p, u, Function::constant(s, 1.0), ExponentPair(2, 2), Codomain::sigma);
  const Function v1 = reduce_to_EMv(ones);
  EXPECT_LE((v1.values() - u.values()).cwiseAbs().maxCoeff(), 1e-15);

  const CondOperator op(p, u, Function::from_real(s, {0, 2, 0, 0}), ExponentPair(2, 2), Codomain::sigma);
  const Function v = reduce_to_EMv(op);
  const std::vector<double> want{std::sqrt(2.0), -std::sqrt(2.0), 0, 0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(v[i] - want[i]), 0.0, 1e-15);

  const CondOperator zero(p, u, Function::zero(s), ExponentPair(2, 2), Codomain::sigma);
  EXPECT_TRUE(reduce_to_EMv(zero).is_zero());
}

TEST(ReduceToEMv, NormIdentity) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 1 + trial % 30);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 6);
    const double q = 1.2 + 0.03 * trial;
    const CondOperator op(p, Function(s, testkit::random_vector(rng, s.size())),
                          Function(s, testkit::random_vector(rng, s.size())), ExponentPair(2.0, q), Codomain::sigma);
    const CondOperator red = CondOperator::em_u(p, reduce_to_EMv(op), ExponentPair(2.0, q));
    for (int k = 0; k < 10; ++k) {
      const Vector f = testkit::random_vector(rng, s.size());
      const double a = lp_norm(s, apply_values(op, f), q), b = lp_norm(s, apply_values(red, f), q);
      EXPECT_LE(std::abs(a - b), 1e-10 * std::max(a, 1e-300));
    }
  }
}

TEST(NormDomination, SameExponent) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 1 + trial % 30);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 6);
    const double e = 1.3 + 0.02 * trial;
    const CondOperator op = CondOperator::em_u(p, Function(s, testkit::random_vector(rng, s.size())), ExponentPair(e, e));
    const Vector v = v_weight(op).values();
    for (int k = 0; k < 10; ++k) {
      const Vector f = testkit::random_vector(rng, s.size());
      EXPECT_LE(lp_norm(s, apply_values(op, f), e), lp_norm(s, Vector(v.cwiseProduct(f)), e) * (1 + 1e-12));
    }
  }
}

TEST(OpnormPq, Examples) {
  const MeasureSpace s = make_space({0.1, 0.2, 0.3, 0.4});
  const std::vector<std::size_t> a{0, 1, 1, 0};
  const RatioEstimate e = opnorm_pq(em(make_partition(s, a), {1, 1, 1, 1}));
  EXPECT_NEAR(e.value, 1.0, 1e-8);

  const RatioEstimate d = opnorm_pq(em(singleton_partition(s), {0.5, -3, 2, 1}, 3.0, 3.0));
  EXPECT_NEAR(d.value, 3.0, 1e-6 * 3.0);

  const std::vector<double> u{0.5, -3, 2, 1};
  const RatioEstimate h = opnorm_pq(em(singleton_partition(s), u, 3.0, 1.5));
  const double want = ref::diag_norm_down(ref::weights(s), u, 3.0, 1.5);
  EXPECT_NEAR(h.value, want, 1e-6 * want);
}
