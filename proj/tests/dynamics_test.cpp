#include "cocycle/dynamics.hpp"

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace cocycle {
namespace {

using testing::golden_mean_shift;
using testing::golden_pair;
using testing::mat2;
using testing::random_operator;

Subshift shift_from(std::initializer_list<std::initializer_list<int>> rows) {
  const auto q = static_cast<Eigen::Index>(rows.size());
  Subshift::Transition t(q, q);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (int v : row) t(i, j++) = v;
    ++i;
  }
  return Subshift(t);
}

std::vector<Subshift> test_shifts() {
  return {Subshift::full(1), Subshift::full(2), Subshift::full(3), golden_mean_shift(),
          shift_from({{0, 1, 1}, {1, 0, 1}, {1, 1, 1}}), shift_from({{1, 1, 0}, {0, 0, 1}, {1, 0, 1}})};
}

// Windows of `shift` with random operators of dimension d.
WindowCocycle<double> random_window_cocycle(const Subshift& shift, int w, int d, std::mt19937_64& rng) {
  std::map<Word, Operator<double>> table;
  for (const Word& word : admissible_words(shift, w)) table.emplace(word, random_operator(d, rng));
  return WindowCocycle<double>(shift, w, table);
}

TEST(Words, RoundTripText) {
  EXPECT_EQ(to_string(parse_word("0a1z")), "0a1z");
  EXPECT_EQ(parse_word("012").symbols, (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(parse_word("0-1"), InvalidInput);
}

TEST(Subshift, RejectsMalformedTransitions) {
  EXPECT_THROW(shift_from({{1, 2}, {1, 1}}), InvalidInput);
  EXPECT_THROW(shift_from({{1, 0}, {0, 0}}), InvalidInput);
  EXPECT_THROW(Subshift(Subshift::Transition(2, 3)), InvalidInput);
}

TEST(AdmissibleWords, Examples) {
  EXPECT_EQ(admissible_words(Subshift::full(2), 3).size(), 8u);
  // Oracle: binary strings of length 3 without "11".
  int no_double_one = 0;
  for (int bits = 0; bits < 8; ++bits) no_double_one += (bits & (bits >> 1)) == 0;
  EXPECT_EQ(admissible_words(golden_mean_shift(), 3).size(), static_cast<std::size_t>(no_double_one));
  for (int n = 1; n <= 5; ++n) EXPECT_EQ(admissible_words(Subshift::full(1), n).size(), 1u);
}

TEST(AdmissibleWords, LexicographicAndAdmissible) {
  for (const auto& shift : test_shifts()) {
    const auto words = admissible_words(shift, 5);
    for (std::size_t i = 0; i < words.size(); ++i) {
      EXPECT_TRUE(shift.admissible(words[i]));
      if (i > 0) EXPECT_LT(words[i - 1], words[i]);
    }
    // Oracle: total entry sum of T^(n-1).
    Subshift::Transition p = Subshift::Transition::Identity(shift.alphabet(), shift.alphabet());
    for (int i = 0; i < 4; ++i) p = p * shift.transition();
    EXPECT_EQ(static_cast<long>(words.size()), p.sum());
  }
}

TEST(PeriodicOrbits, Examples) {
  EXPECT_EQ(periodic_orbits(Subshift::full(2), 3).size(), 8u);
  Subshift::Transition g(2, 2);
  g << 1, 1, 1, 0;
  const Subshift::Transition g2 = g * g;
  EXPECT_EQ(g2(0, 0), 2);
  EXPECT_EQ(periodic_orbits(golden_mean_shift(), 2).size(), static_cast<std::size_t>(g2.trace()));
  EXPECT_EQ(periodic_orbits(golden_mean_shift(), 1).size(), static_cast<std::size_t>(g.trace()));
}

TEST(PeriodicOrbits, CountEqualsTraceOfTransitionPower) {
  for (const auto& shift : test_shifts()) {
    Subshift::Transition p = Subshift::Transition::Identity(shift.alphabet(), shift.alphabet());
    for (int k = 1; k <= 12; ++k) {
      p = p * shift.transition();
      if (shift.alphabet() == 3 && k > 9) break;  // 3^10 orbits is more than this test needs
      EXPECT_EQ(static_cast<long>(periodic_orbits(shift, k).size()), p.trace()) << "k=" << k;
      EXPECT_EQ(shift.fixed_point_count(k), p.trace());
    }
  }
}

TEST(PeriodicOrbits, PrimitiveFilter) {
  const auto all = periodic_orbits(Subshift::full(2), 4);
  const auto primitive = periodic_orbits(Subshift::full(2), 4, true);
  // 16 points of period dividing 4, minus the 4 of period dividing 2.
  EXPECT_EQ(all.size(), 16u);
  EXPECT_EQ(primitive.size(), 12u);
  EXPECT_FALSE(is_primitive(parse_word("0101")));
  EXPECT_TRUE(is_primitive(parse_word("0011")));
}

TEST(CocycleProduct, Examples) {
  const auto A = golden_pair();
  EXPECT_EQ(cocycle_product(A, Word{}), Operator<double>::Identity(2, 2));
  // A(1) A(0); its transpose A(0) A(1) = [[2,1],[1,1]] has the same spectrum.
  EXPECT_EQ(cocycle_product(A, parse_word("01")), mat2(1, 1, 1, 2));
  EXPECT_EQ(cocycle_product(A, parse_word("10")), mat2(2, 1, 1, 1));
  EXPECT_EQ(cocycle_product(A, parse_word("0")), mat2(1, 1, 0, 1));

  std::mt19937_64 rng(1);
  const auto W = random_window_cocycle(Subshift::full(2), 2, 2, rng);
  EXPECT_EQ(cocycle_product(W, parse_word("1")), Operator<double>::Identity(2, 2));
  EXPECT_EQ(cocycle_product(W, parse_word("10")), W.at(parse_word("10")));
}

TEST(CocycleProduct, RejectsInadmissibleWords) {
  std::mt19937_64 rng(2);
  const auto A = random_window_cocycle(golden_mean_shift(), 1, 2, rng);
  EXPECT_THROW(cocycle_product(A, parse_word("0110")), DomainError);
  const auto W = random_window_cocycle(Subshift::full(2), 3, 2, rng);
  EXPECT_THROW(cocycle_product(W, parse_word("0")), DomainError);
}

TEST(CocycleProduct, CocycleLawIsExact) {
  std::mt19937_64 rng(3);
  for (const auto& shift : test_shifts()) {
    for (int w = 1; w <= 3; ++w) {
      const auto A = random_window_cocycle(shift, w, 3, rng);
      for (const Word& word : admissible_words(shift, 6 + w - 1)) {
        for (int m = 0; m <= 6; ++m) {
          const int n = 6 - m;
          Word first, last;
          first.symbols.assign(word.symbols.begin(), word.symbols.begin() + m + w - 1);
          last.symbols.assign(word.symbols.begin() + m, word.symbols.end());
          // Same multiplication order as the full product, so equality is exact.
          Operator<double> expected = cocycle_product(A, first);
          for (int i = 0; i < n; ++i) expected = (A.at_window(last.symbols.begin() + i) * expected).eval();
          EXPECT_EQ(cocycle_product(A, word), expected);
          const Operator<double> split = cocycle_product(A, last) * cocycle_product(A, first);
          EXPECT_LE((split - expected).norm(), 1e-12 * (1 + expected.norm()));
        }
      }
    }
  }
}

TEST(CycleProduct, Examples) {
  std::mt19937_64 rng(4);
  const auto T = random_operator(3, rng);
  const auto C = WindowCocycle<double>::constant(Subshift::full(2), T);
  const Operator<double> cube = T * T * T;
  EXPECT_LE((cycle_product(C, PeriodicOrbit{parse_word("011")}) - cube).norm(), 1e-14 * cube.norm());
  const auto A = golden_pair();
  EXPECT_EQ(cycle_product(A, PeriodicOrbit{parse_word("01")}), mat2(1, 1, 1, 2));
  EXPECT_EQ(cycle_product(A, PeriodicOrbit{parse_word("10")}), mat2(2, 1, 1, 1));
  EXPECT_EQ(cycle_product(A, PeriodicOrbit{parse_word("1")}), A.at(parse_word("1")));
  const auto G = random_window_cocycle(golden_mean_shift(), 1, 2, rng);
  EXPECT_THROW(cycle_product(G, PeriodicOrbit{parse_word("1")}), DomainError);
  EXPECT_THROW(cycle_product(G, PeriodicOrbit{parse_word("10001")}), DomainError);
}

TEST(CycleProduct, MatchesUnrolledWord) {
  std::mt19937_64 rng(5);
  for (int w = 1; w <= 3; ++w) {
    const auto A = random_window_cocycle(golden_mean_shift(), w, 2, rng);
    for (int k = 1; k <= 6; ++k)
      for (const auto& p : periodic_orbits(golden_mean_shift(), k))
        EXPECT_EQ(cycle_product(A, p), cocycle_product(A, unroll(p, 1, w)));
  }
}

TEST(Window, WideningLeavesProductsBitIdentical) {
  std::mt19937_64 rng(6);
  for (const auto& shift : test_shifts()) {
    for (int w = 1; w <= 2; ++w) {
      const auto A = random_window_cocycle(shift, w, 3, rng);
      const auto wide = A.widened();
      EXPECT_EQ(wide.window(), w + 1);
      for (const Word& word : admissible_words(shift, 5 + w))
        EXPECT_EQ(cocycle_product(A, Word{{word.symbols.begin(), word.symbols.end() - 1}}),
                  cocycle_product(wide, word));
      for (int k = 1; k <= 4; ++k)
        for (const auto& p : periodic_orbits(shift, k)) EXPECT_EQ(cycle_product(A, p), cycle_product(wide, p));
    }
  }
}

TEST(WindowCocycle, RejectsIncompleteOrInconsistentTables) {
  std::map<Word, Operator<double>> table{{parse_word("0"), Operator<double>::Identity(2, 2)}};
  EXPECT_THROW(WindowCocycle<double>(Subshift::full(2), 1, table), InvalidInput);
  table.emplace(parse_word("1"), Operator<double>::Identity(3, 3));
  EXPECT_THROW(WindowCocycle<double>(Subshift::full(2), 1, table), InvalidInput);
  std::map<Word, Operator<double>> forbidden{{parse_word("00"), Operator<double>::Identity(1, 1)},
                                             {parse_word("01"), Operator<double>::Identity(1, 1)},
                                             {parse_word("10"), Operator<double>::Identity(1, 1)},
                                             {parse_word("11"), Operator<double>::Identity(1, 1)}};
  EXPECT_THROW(WindowCocycle<double>(golden_mean_shift(), 2, forbidden), InvalidInput);
}

TEST(HolderNorm, Examples) {
  const auto T = mat2(3, 1, 0, 2);
  const auto C = WindowCocycle<double>::constant(Subshift::full(3), T);
  EXPECT_DOUBLE_EQ(holder_norm(C, 1.0), singular_values(T)(1));
  EXPECT_DOUBLE_EQ(holder_norm(C, 0.3), singular_values(T)(1));

  const WindowCocycle<double> step(Subshift::full(2), 1,
                                   {{parse_word("0"), Operator<double>::Zero(2, 2)},
                                    {parse_word("1"), Operator<double>::Identity(2, 2)}});
  EXPECT_DOUBLE_EQ(holder_norm(step, 1.0), 2);
  EXPECT_THROW(holder_norm(step, 0.0), DomainError);
}

TEST(HolderNorm, LaterDisagreementWeighsMore) {
  // Two windows that first differ at coordinate 1: ratio ||I|| / 2^{-alpha}.
  const WindowCocycle<double> A(Subshift::full(2), 2,
                                {{parse_word("00"), Operator<double>::Zero(1, 1)},
                                 {parse_word("01"), Operator<double>::Identity(1, 1)},
                                 {parse_word("10"), Operator<double>::Identity(1, 1)},
                                 {parse_word("11"), Operator<double>::Identity(1, 1)}});
  EXPECT_DOUBLE_EQ(holder_norm(A, 1.0), 1 + 2);
  EXPECT_DOUBLE_EQ(holder_norm(A, 0.5), 1 + std::sqrt(2.0));
}

TEST(HolderNorm, IsANormOnTheTable) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto A = random_window_cocycle(Subshift::full(2), 2, 2, rng);
    const auto B = random_window_cocycle(Subshift::full(2), 2, 2, rng);
    EXPECT_NEAR(holder_norm(A.scaled(-2.5), 1.0), 2.5 * holder_norm(A, 1.0), 1e-12 * holder_norm(A, 1.0));
    EXPECT_LE(holder_norm(A.perturbed(B, 1.0), 1.0), (holder_norm(A, 1.0) + holder_norm(B, 1.0)) * (1 + 1e-12));
  }
}

TEST(SampleTrajectory, Examples) {
  const auto one = sample_trajectory(Subshift::full(1), uniform_weights(Subshift::full(1)), 7, 1);
  EXPECT_EQ(one, parse_word("0000000"));

  const auto word = sample_trajectory(Subshift::full(2), uniform_weights(Subshift::full(2)), 10000, 42);
  double ones = 0;
  for (int a : word.symbols) ones += a;
  EXPECT_NEAR(ones / 10000, 0.5, 0.02);

  Operator<double> w(2, 2);
  w << 0.3, 0.7, 1.0, 0.0;
  const auto gm = sample_trajectory(golden_mean_shift(), w, 5000, 9);
  EXPECT_EQ(to_string(gm).find("11"), std::string::npos);
  EXPECT_TRUE(golden_mean_shift().admissible(gm));
}

TEST(SampleTrajectory, DeterministicInSeed) {
  const auto w = uniform_weights(Subshift::full(3));
  EXPECT_EQ(sample_trajectory(Subshift::full(3), w, 500, 77), sample_trajectory(Subshift::full(3), w, 500, 77));
  EXPECT_NE(sample_trajectory(Subshift::full(3), w, 500, 77), sample_trajectory(Subshift::full(3), w, 500, 78));
}

TEST(SampleTrajectory, RejectsIncompatibleWeights) {
  Operator<double> w(2, 2);
  w << 0.5, 0.5, 0.5, 0.5;
  EXPECT_THROW(sample_trajectory(golden_mean_shift(), w, 10, 1), DomainError);
  w << 0.5, 0.6, 1.0, 0.0;
  EXPECT_THROW(sample_trajectory(golden_mean_shift(), w, 10, 1), DomainError);
  w << 1.5, -0.5, 1.0, 0.0;
  EXPECT_THROW(sample_trajectory(golden_mean_shift(), w, 10, 1), DomainError);
  EXPECT_THROW(sample_trajectory(Subshift::full(3), uniform_weights(Subshift::full(2)), 10, 1), DomainError);
}

TEST(StationaryDistribution, GoldenMeanUniformWeights) {
  // Oracle: pi solves pi P = pi for P = [[1/2,1/2],[1,0]], giving (2/3, 1/3).
  const auto pi = stationary_distribution(uniform_weights(golden_mean_shift()));
  EXPECT_NEAR(pi(0), 2.0 / 3, 1e-14);
  EXPECT_NEAR(pi(1), 1.0 / 3, 1e-14);
}

}  // namespace
}  // namespace cocycle
