#include "cocycle/compact.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace cocycle {
namespace {

CompactModel<double> model(CompactKind kind, CoefficientFamily family, double c, double exponent) {
  return CompactModel<double>{kind, family, c, exponent};
}

const auto kHalvingDiagonal = model(CompactKind::diagonal, CoefficientFamily::geometric, 1.0, 0.5);
const auto kHalvingShift = model(CompactKind::weighted_shift, CoefficientFamily::geometric, 1.0, 0.5);
const auto kInverseSquareDiagonal = model(CompactKind::diagonal, CoefficientFamily::power, 1.0, 2.0);

Operator<double> embed(const Operator<double>& m, Eigen::Index dim) {
  Operator<double> out = Operator<double>::Zero(dim, dim);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

TEST(Truncate, Examples) {
  const auto d = truncate(kHalvingDiagonal, 3);
  EXPECT_EQ(d.rank, 3);
  Operator<double> expected = Operator<double>::Zero(3, 3);
  expected.diagonal() << 0.5, 0.25, 0.125;
  EXPECT_EQ(d.matrix, expected);
  EXPECT_EQ(d.error, 1.0 / 16);

  const auto s = truncate(kHalvingShift, 2);
  Operator<double> shift(2, 2);
  shift << 0, 0, 0.5, 0;
  EXPECT_EQ(s.matrix, shift);
  EXPECT_EQ(s.error, 0.25);

  EXPECT_DOUBLE_EQ(truncate(kInverseSquareDiagonal, 10).error, 1.0 / 121);
}

TEST(Truncate, RejectsBadInput) {
  EXPECT_THROW(truncate(kHalvingDiagonal, 0), DomainError);
  EXPECT_THROW(truncate(model(CompactKind::diagonal, CoefficientFamily::geometric, 1, 1.0), 2), DomainError);
  EXPECT_THROW(truncate(model(CompactKind::diagonal, CoefficientFamily::power, 1, 0.0), 2), DomainError);
  EXPECT_THROW(truncate(model(CompactKind::diagonal, CoefficientFamily::power, NAN, 2.0), 2), InvalidInput);
}

TEST(Truncate, ErrorIsNonIncreasingAndDominatesDroppedCoefficients) {
  for (const auto& m : {kHalvingDiagonal, kHalvingShift, kInverseSquareDiagonal,
                        model(CompactKind::weighted_shift, CoefficientFamily::power, 3.0, 0.5),
                        model(CompactKind::diagonal, CoefficientFamily::geometric, -2.0, -0.7)}) {
    double previous = INFINITY;
    for (int rank = 1; rank <= 40; ++rank) {
      const auto t = truncate(m, rank);
      EXPECT_GE(t.error, 0);
      EXPECT_LE(t.error, previous);
      previous = t.error;
      for (long i = rank; i <= rank + 50; ++i) EXPECT_GE(m.tail_bound(i), std::abs(m.coefficient(i + 1)));
    }
  }
}

TEST(Truncate, SectionsDifferByAtMostTheErrorBound) {
  for (const auto& m : {kHalvingDiagonal, kHalvingShift, kInverseSquareDiagonal,
                        model(CompactKind::weighted_shift, CoefficientFamily::power, 2.0, 1.5)}) {
    for (int m1 = 1; m1 <= 12; ++m1) {
      for (int m2 = m1; m2 <= 24; m2 += 3) {
        const auto t1 = truncate(m, m1);
        const auto t2 = truncate(m, m2);
        const Operator<double> diff = t2.matrix - embed(t1.matrix, m2);
        const double norm = singular_values(diff)(1);
        EXPECT_LE(norm, t1.error * (1 + 1e-12)) << "m1=" << m1 << " m2=" << m2;
      }
    }
  }
}

TEST(SpectralConvergence, Examples) {
  for (const auto& row : spectral_convergence(kHalvingDiagonal, 1.0, {1, 2, 4})) EXPECT_EQ(row.rho, 0.5);
  for (const auto& row : spectral_convergence(kHalvingShift, 1.0, {1, 2, 5, 17})) EXPECT_EQ(row.rho, 0);
  // Oracle: product of the two largest coefficients, 1 * 1/4.
  const double oracle = kInverseSquareDiagonal.coefficient(1) * kInverseSquareDiagonal.coefficient(2);
  for (const auto& row : spectral_convergence(kInverseSquareDiagonal, 2.0, {2, 8, 32})) EXPECT_DOUBLE_EQ(row.rho, oracle);
}

TEST(SpectralConvergence, DiagonalStabilizesOnceTopCoefficientsAreIncluded) {
  for (double s : {0.5, 1.0, 1.5, 2.0, 3.0, 3.5}) {
    const int needed = static_cast<int>(std::ceil(s));
    const auto rows = spectral_convergence(kInverseSquareDiagonal, s, {needed, needed + 1, needed + 5, needed + 20});
    for (const auto& row : rows) EXPECT_NEAR(row.rho, rows.front().rho, 1e-15 * rows.front().rho);
  }
}

TEST(SpectralConvergence, RejectsBadRanks) {
  EXPECT_THROW(spectral_convergence(kHalvingDiagonal, 1.0, {}), DomainError);
  EXPECT_THROW(spectral_convergence(kHalvingDiagonal, 1.0, {2, 2}), DomainError);
  EXPECT_THROW(spectral_convergence(kHalvingDiagonal, 1.0, {0, 2}), DomainError);
  EXPECT_THROW(spectral_convergence(kHalvingDiagonal, 0.0, {1}), DomainError);
}

}  // namespace
}  // namespace cocycle
