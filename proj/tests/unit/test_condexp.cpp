#include <gtest/gtest.h>

#include "condop/condexp.hpp"
#include "condop/errors.hpp"
#include "instances.hpp"
#include "reference.hpp"

using namespace condop;

namespace {

PartitionAlgebra halves(const MeasureSpace& s) {
  const std::vector<std::size_t> a{0, 0, 1, 1};
  return make_partition(s, a);
}

void expect_values(const Function& f, const std::vector<double>& want, double tol = 1e-15) {
  ASSERT_EQ(f.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(std::abs(f[i] - Scalar(want[i])), 0.0, tol) << i;
}

}  // namespace

TEST(CondExp, UniformBlockAverages) {
  const MeasureSpace s = make_space({0.25, 0.25, 0.25, 0.25});
  expect_values(cond_exp(halves(s), Function::from_real(s, {2, 4, 6, 8})), {3, 3, 7, 7});
}

TEST(CondExp, FixesMeasurable) {
  const MeasureSpace s = make_space({0.25, 0.25, 0.25, 0.25});
  expect_values(cond_exp(halves(s), Function::from_real(s, {5, 5, 7, 7})), {5, 5, 7, 7});
}

TEST(CondExp, WeightedAverage) {
  const MeasureSpace s = make_space({0.1, 0.3, 0.3, 0.3});
  expect_values(cond_exp(halves(s), Function::from_real(s, {4, 0, 0, 0})), {1, 1, 0, 0}, 1e-15);
}

TEST(CondExp, SpaceMismatch) {
  const MeasureSpace s = make_space({0.25, 0.25, 0.25, 0.25});
  const MeasureSpace t = make_space({0.5, 0.5});
  EXPECT_THROW(cond_exp(halves(s), Function::from_real(t, {1, 2})), DomainError);
}

TEST(Function, RejectsNonFinite) {
  const MeasureSpace s = make_space({0.5, 0.5});
  Vector v(2);
  v << 1.0, Scalar(std::numeric_limits<double>::infinity());
  EXPECT_THROW(Function(s, v), DomainError);
  EXPECT_THROW(Function(s, Vector::Zero(3)), DomainError);
}

TEST(CondExp, MatchesReferenceAndParallelIsBitIdentical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 1 + trial % 64);
    const PartitionAlgebra p = testkit::random_partition(rng, s, 1 + trial % 16);
    const Vector f = testkit::random_vector(rng, s.size());
    const Vector got = cond_exp_values(p, f);
    const Vector want = ref::cond_exp(p, f);
    EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, testkit::max_abs(f)));
    const Vector ser = serial::cond_exp_values(p, f);
    EXPECT_TRUE((got.array() == ser.array()).all()) << "parallel and serial kernels differ";
  }
}

// Property suite over random instances.
class CondExpProperties : public ::testing::TestWithParam<double> {};

TEST_P(CondExpProperties, Axioms) {
  const double p = GetParam();
  const double pc = p / (p - 1.0);
  std::mt19937_64 rng(static_cast<std::uint64_t>(p * 1000));
  for (int trial = 0; trial < 150; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 1 + trial % 64);
    const PartitionAlgebra part = testkit::random_partition(rng, s, 1 + trial % 16);
    const std::size_t n = s.size();
    const Vector f = testkit::random_vector(rng, n);
    const Vector g = testkit::random_vector(rng, n);
    const Vector ef = cond_exp_values(part, f);
    const double scale = std::max({1.0, testkit::max_abs(f), testkit::max_abs(g)});

    // Module property with g replaced by E(g), which is A-measurable.
    const Vector eg = cond_exp_values(part, g);
    const Vector lhs = cond_exp_values(part, Vector(f.cwiseProduct(eg)));
    EXPECT_LE((lhs - ef.cwiseProduct(eg)).cwiseAbs().maxCoeff(), 1e-12 * scale * scale);

    // Power inequality and conditional Hoelder.
    const RealVector af = f.cwiseAbs(), ag = g.cwiseAbs();
    const RealVector efp = cond_exp_values(part, RealVector(af.array().pow(p)));
    const RealVector egq = cond_exp_values(part, RealVector(ag.array().pow(pc)));
    const Vector efg = cond_exp_values(part, Vector(f.cwiseProduct(g)));
    for (std::size_t x = 0; x < n; ++x) {
      const auto i = static_cast<Eigen::Index>(x);
      EXPECT_LE(std::pow(std::abs(ef[i]), p), efp[i] + 1e-12 * std::pow(scale, p));
      EXPECT_LE(std::abs(efg[i]), std::pow(efp[i], 1.0 / p) * std::pow(egq[i], 1.0 / pc) + 1e-12 * scale * scale);
    }

    // Positivity and support inclusion.
    RealVector pos = af;
    for (std::size_t x = 0; x < n; x += 3) pos[static_cast<Eigen::Index>(x)] = 0.0;
    const RealVector epos = cond_exp_values(part, pos);
    for (std::size_t x = 0; x < n; ++x) {
      const auto i = static_cast<Eigen::Index>(x);
      EXPECT_GE(epos[i], 0.0);
      if (pos[i] > 0.0) EXPECT_GT(epos[i], 0.0);
      EXPECT_GT(cond_exp_values(part, RealVector(af.array() + 0.5))[i], 0.0);
    }

    // Idempotence and range.
    EXPECT_LE((cond_exp_values(part, ef) - ef).cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_TRUE(is_A_measurable(part, cond_exp(part, Function(s, f))));

    // Averaging identity: block integrals are preserved.
    for (std::size_t b = 0; b < part.num_blocks(); ++b) {
      Scalar a(0), c(0);
      for (std::size_t x : part.block(b)) {
        a += f[static_cast<Eigen::Index>(x)] * s.weight(x);
        c += ef[static_cast<Eigen::Index>(x)] * s.weight(x);
      }
      EXPECT_LE(std::abs(a - c), 1e-12 * scale * part.block_measure(b) * 4);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Exponents, CondExpProperties, ::testing::Values(1.5, 2.0, 3.0));

TEST(CondExp, OutputIsExactlyMeasurable) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace s = testkit::random_space(rng, 2 + trial % 30);
    const PartitionAlgebra part = testkit::random_partition(rng, s, 1 + trial % 7);
    EXPECT_TRUE(is_A_measurable(part, cond_exp(part, Function(s, testkit::random_vector(rng, s.size())))));
  }
}

TEST(CondExp, BlockAverages) {
  const MeasureSpace s = make_space({0.1, 0.3, 0.3, 0.3});
  const Vector avg = block_averages(halves(s), Function::from_real(s, {4, 0, 1, 2}).values());
  ASSERT_EQ(avg.size(), 2);
  EXPECT_NEAR(std::abs(avg[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(avg[1] - 1.5), 0.0, 1e-15);
}
