#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "diskadapt/reliability.hpp"

using namespace diskadapt;

namespace {

// Exact mean absorption time (years) of the birth-death chain behind the
// MTTDL model: from i failed chunks, failures at (n - i) * lambda and one
// repair at mu; absorbing at f + 1 failures. Solved by forward elimination
// of T_i = a_i + b_i * T_{i+1}.
double exact_chain_mttdl(const Scheme& s, double afr_pct, double mttr_days) {
  const double lambda = afr_pct / 100.0;
  const double mu = 365.25 / mttr_days;
  const int f = s.f();
  std::vector<double> a(static_cast<std::size_t>(f) + 1), b(static_cast<std::size_t>(f) + 1);
  for (int i = 0; i <= f; ++i) {
    const double up = (s.n - i) * lambda;
    const double down = i > 0 ? mu : 0.0;
    const double rate = up + down;
    double ai = 1.0 / rate;
    double bi = up / rate;
    if (i > 0) {
      // T_{i-1} = a_{i-1} + b_{i-1} T_i substituted into the repair branch.
      const double p = down / rate;
      const double denom = 1.0 - p * b[static_cast<std::size_t>(i) - 1];
      ai = (ai + p * a[static_cast<std::size_t>(i) - 1]) / denom;
      bi = bi / denom;
    }
    a[static_cast<std::size_t>(i)] = ai;
    b[static_cast<std::size_t>(i)] = bi;
  }
  // T_{f+1} = 0, then back-substitute to T_0.
  double t = 0.0;
  for (int i = f; i >= 0; --i) t = a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)] * t;
  return t;
}

// Event-driven stripe simulation; returns the mean time to data loss.
double monte_carlo_mttdl(const Scheme& s, double afr_pct, double mttr_days, int losses, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double lambda = afr_pct / 100.0;
  const double mu = 365.25 / mttr_days;
  double total = 0.0;
  for (int run = 0; run < losses; ++run) {
    int failed = 0;
    double t = 0.0;
    while (failed <= s.f()) {
      const double up = (s.n - failed) * lambda;
      const double down = failed > 0 ? mu : 0.0;
      std::exponential_distribution<double> wait(up + down);
      t += wait(rng);
      std::uniform_real_distribution<double> u(0.0, up + down);
      failed += u(rng) < up ? 1 : -1;
    }
    total += t;
  }
  return total / losses;
}

}  // namespace

TEST(Scheme, BasicsAndParsing) {
  const Scheme s = parse_scheme("30-of-33");
  EXPECT_EQ(s.k, 30);
  EXPECT_EQ(s.n, 33);
  EXPECT_EQ(s.f(), 3);
  EXPECT_DOUBLE_EQ(s.overhead(), 1.1);
  EXPECT_EQ(s.name(), "30-of-33");
  EXPECT_THROW(parse_scheme("9-of-6"), std::invalid_argument);
  EXPECT_THROW(parse_scheme("6of9"), std::invalid_argument);
  EXPECT_THROW(parse_scheme("6-of-9x"), std::invalid_argument);
}

TEST(Mttdl, RatioToSevenOfTenIsFiveThirds) {
  for (double afr : {1.0, 2.0, 16.0}) {
    for (double mttr : {0.1, 0.2, 0.5}) {
      EXPECT_NEAR(mttdl({6, 9}, afr, mttr) / mttdl({7, 10}, afr, mttr), 5.0 / 3.0, 1e-12);
    }
  }
}

TEST(Mttdl, RatioToSixOfEightIsMttfOverNineMttr) {
  const double ratio = mttdl({6, 9}, 2.0, 0.2) / mttdl({6, 8}, 2.0, 0.2);
  const double mttf_days = 365.25 / 0.02;
  EXPECT_NEAR(ratio, mttf_days / (9 * 0.2), 1e-6 * ratio);
  EXPECT_GT(ratio, 0.9e4);
  EXPECT_LT(ratio, 1.1e4);
}

TEST(Mttdl, ScalesAsLambdaToMinusFPlusOne) {
  EXPECT_NEAR(mttdl({10, 13}, 2.0, 0.2) / mttdl({10, 13}, 4.0, 0.2), 16.0, 1e-9);
}

TEST(Mttdl, MonotoneInAfrAndFaultTolerance) {
  for (const Scheme& s : scheme_grid()) {
    double prev = std::numeric_limits<double>::infinity();
    for (double afr = 0.25; afr < 40; afr *= 1.3) {
      const double m = mttdl(s, afr, 0.2);
      EXPECT_LT(m, prev);
      prev = m;
    }
  }
  for (int k = 3; k <= 50; ++k) {
    EXPECT_LT(mttdl({k, k + 2}, 3.0, 0.2), mttdl({k, k + 3}, 3.0, 0.2));
    EXPECT_LT(mttdl({k, k + 3}, 3.0, 0.2), mttdl({k, k + 4}, 3.0, 0.2));
  }
  EXPECT_THROW(mttdl({6, 9}, 0.0, 0.2), std::invalid_argument);
  EXPECT_THROW(mttdl({6, 9}, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(mttdl({6, 6}, 1.0, 0.2), std::invalid_argument);
}

TEST(Mttdl, ModelAgreesWithExactMarkovChainAtTheAnchor) {
  // Direct simulation of a 3e9-year MTTDL is infeasible, so the anchor is
  // checked against the exact chain the approximation is derived from.
  const double model = mttdl({6, 9}, 16.0, 0.2);
  const double exact = exact_chain_mttdl({6, 9}, 16.0, 0.2);
  EXPECT_LT(std::max(model, exact) / std::min(model, exact), 3.0);
}

TEST(Mttdl, ModelAgreesWithStripeSimulationWhereLossIsObservable) {
  // High AFR and slow repair make losses frequent enough to sample.
  const Scheme s{4, 6};
  const double afr = 400.0;
  const double mttr = 10.0;
  const double model = mttdl(s, afr, mttr);
  const double simulated = monte_carlo_mttdl(s, afr, mttr, 4000, 99);
  EXPECT_LT(std::max(model, simulated) / std::min(model, simulated), 3.0);
  EXPECT_NEAR(simulated / exact_chain_mttdl(s, afr, mttr), 1.0, 0.1);
}

TEST(ToleratedAfr, AnchorAndClosedForms) {
  const ReliabilityConfig rc;
  EXPECT_DOUBLE_EQ(tolerated_afr({6, 9}, rc), 16.0);
  EXPECT_NEAR(tolerated_afr({7, 10}, rc), 16.0 * std::pow(3.0 / 5.0, 0.25), 1e-6 * 14.08);
  EXPECT_GT(tolerated_afr({6, 10}, rc), 16.0);
}

TEST(ToleratedAfr, BisectionConsistencyOverTheGrid) {
  const ReliabilityConfig rc;
  const double target = rc.target_mttdl();
  for (const Scheme& s : scheme_grid()) {
    const double afr = tolerated_afr(s, rc);
    EXPECT_NEAR(mttdl(s, afr, rc.mttr_days) / target, 1.0, 1e-5) << s.name();
  }
}

TEST(ToleratedAfr, MonotoneInFaultToleranceAndWidth) {
  const ReliabilityConfig rc;
  for (int k = 3; k <= 50; ++k) {
    EXPECT_LT(tolerated_afr({k, k + 2}, rc), tolerated_afr({k, k + 3}, rc));
    EXPECT_LT(tolerated_afr({k, k + 3}, rc), tolerated_afr({k, k + 4}, rc));
  }
  for (int f = 2; f <= 4; ++f) {
    for (int k = 3; k < 50; ++k) EXPECT_GT(tolerated_afr({k, k + f}, rc), tolerated_afr({k + 1, k + 1 + f}, rc));
  }
}

TEST(ToleratedAfr, ThrowsWhenTargetUnreachable) {
  // A tiny anchor AFR makes the target so large that a single-parity code
  // would need an AFR below the bracket.
  ReliabilityConfig rc;
  rc.afr0 = 1e-3;
  EXPECT_THROW(tolerated_afr({40, 41}, rc), std::domain_error);
}

TEST(ViableSchemes, AnchorIsExactlyViable) {
  const ReliabilityConfig rc;
  EXPECT_EQ(viable_schemes(16.0, rc, {{6, 9}}), (std::vector<Scheme>{Scheme{6, 9}}));
}

TEST(ViableSchemes, ReconstructionBoundAtTwoPercent) {
  ReliabilityConfig rc;
  // Isolate criterion (3) by lifting the width and repair limits.
  rc.max_repair_days = 100.0;
  rc.max_k = 100;
  std::vector<Scheme> wide;
  for (int k = 40; k <= 60; ++k) wide.push_back({k, k + 8});
  const auto v = viable_schemes(2.0, rc, wide);
  ASSERT_FALSE(v.empty());
  int max_k = 0;
  for (const auto& s : v) max_k = std::max(max_k, s.k);
  EXPECT_EQ(max_k, 48);
}

TEST(ViableSchemes, AboveAnchorRejectsSchemeZero) {
  const ReliabilityConfig rc;
  EXPECT_TRUE(viable_schemes(32.0, rc, {{6, 9}}).empty());
  EXPECT_THROW(viable_schemes(2.0, rc, {}), std::invalid_argument);
}

TEST(ViableSchemes, EachCriterionFilters) {
  ReliabilityConfig rc;
  // (1) fault tolerance below min_f.
  EXPECT_TRUE(viable_schemes(0.01, rc, {{10, 11}}).empty());
  // (2) wider than max_k.
  rc.max_k = 20;
  rc.max_repair_days = 10.0;
  EXPECT_TRUE(viable_schemes(0.5, rc, {{21, 25}}).empty());
  // (4) rebuild time grows with k: 0.2 * 31 / 6 > 1.0 day.
  const ReliabilityConfig def;
  EXPECT_TRUE(viable_schemes(0.5, def, {{31, 35}}).empty());
  EXPECT_FALSE(viable_schemes(0.5, def, {{30, 34}}).empty());
  // (5) reliability.
  EXPECT_TRUE(viable_schemes(1.0, def, {{30, 32}}).empty());
}

TEST(ViableSchemes, AntiMonotoneInAfr) {
  const ReliabilityConfig rc;
  const auto grid = scheme_grid();
  std::vector<Scheme> prev = viable_schemes(0.05, rc, grid);
  for (double afr = 0.1; afr < 40; afr *= 1.25) {
    const auto cur = viable_schemes(afr, rc, grid);
    const std::set<Scheme> prev_set(prev.begin(), prev.end());
    for (const auto& s : cur) EXPECT_TRUE(prev_set.count(s)) << s.name() << " at " << afr;
    prev = cur;
  }
}

TEST(SchemeTable, CachesAndPicksLowestOverhead) {
  const ReliabilityConfig rc;
  const SchemeTable table(rc, scheme_grid());
  EXPECT_DOUBLE_EQ(table.tolerated({6, 9}), 16.0);
  EXPECT_NEAR(table.tolerated({30, 33}), tolerated_afr({30, 33}, rc), 1e-12);
  EXPECT_EQ(table.best_at(1.5), (Scheme{30, 33}));
  EXPECT_EQ(table.best_at(100.0), rc.scheme0);
  EXPECT_DOUBLE_EQ(table.ceiling({30, 33}), std::min(tolerated_afr({30, 33}, rc), 16.0 * 6 / 30));
  for (double afr : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const Scheme best = table.best_at(afr);
    for (const auto& s : table.viable_at(afr)) EXPECT_LE(best.overhead(), s.overhead());
    EXPECT_EQ(table.viable_at(afr), viable_schemes(afr, rc, scheme_grid()));
  }
}
