#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "roco/environments.hpp"
#include "roco/learners.hpp"
#include "roco/order_statistics.hpp"
#include "roco/quantile_filter.hpp"
#include "roco/rng.hpp"
#include "test_envs.hpp"

using namespace roco;
using roco::testing::linear_stream;

namespace {

/// Sort-based oracle for the lower empirical quantile.
double sorted_quantile(std::vector<double> v, double q) {
  if (q <= 0.0 || v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(idx, 1) - 1];
}

}  // namespace

TEST(Bernstein, Examples) {
  EXPECT_EQ(bernstein_width(0.3, 1.0, 17), 0.0);
  // mpmath, 40 digits: sqrt(0.5) + 1/3 and the p = 0.9 case.
  EXPECT_NEAR(bernstein_width(0.5, std::exp(-2.0), 2), 1.040440114519880857, 1e-14);
  EXPECT_NEAR(bernstein_width(0.9, 1e-4, 100), 0.159459096150614777, 1e-14);
  EXPECT_THROW(bernstein_width(0.5, 0.5, 0), ContractViolation);
}

TEST(QuantileState, EmpiricalQuantileExamples) {
  QuantileState s(0.5, 1.0);
  for (double x : {3.0, 1.0, 5.0, 2.0, 4.0}) s.observe(x);
  EXPECT_EQ(s.empirical_quantile(0.5), 3.0);
  EXPECT_EQ(s.empirical_quantile(-0.2), 0.0);
  EXPECT_THROW(s.empirical_quantile(1.0000001), ContractViolation);
  QuantileState one(0.5, 1.0);
  one.observe(7.0);
  EXPECT_EQ(one.empirical_quantile(1.0), 7.0);
  EXPECT_EQ(QuantileState(0.5, 1.0).empirical_quantile(0.5), 0.0);
}

TEST(QuantileState, LcbExamples) {
  EXPECT_EQ(QuantileState(0.9, 1e-4).lcb(), 0.0);
  QuantileState s(0.9, 1e-4);
  for (int i = 100; i >= 1; --i) s.observe(i);
  // Level 0.9 - 0.15946 = 0.74054 -> 75th smallest.
  EXPECT_EQ(s.lcb(), 75.0);
  QuantileState m(0.5, 1.0);
  for (int i = 1; i <= 10; ++i) m.observe(i);
  EXPECT_EQ(m.lcb(), 5.0);
}

TEST(QuantileState, ParametersValidated) {
  EXPECT_THROW(QuantileState(0.0, 0.5), ConfigError);
  EXPECT_THROW(QuantileState(1.0, 0.5), ConfigError);
  EXPECT_THROW(QuantileState(0.5, 0.0), ConfigError);
  EXPECT_THROW(QuantileState(0.5, 1.5), ConfigError);
}

TEST(OrderStatistics, MatchesSortOracle) {
  Rng rng(41);
  for (std::size_t block : {1, 2, 3, 8, 512}) {
    OrderStatistics os(block);
    std::vector<double> ref;
    for (int i = 0; i < 2000; ++i) {
      const double x = rng.bernoulli(0.1) ? std::floor(rng.uniform(0, 5)) : rng.uniform(-3, 3);
      os.insert(x);
      ref.push_back(x);
      if (i % 97 == 0 || i < 40) {
        std::vector<double> sorted = ref;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t r = 1; r <= sorted.size(); r += 1 + sorted.size() / 50) ASSERT_EQ(os.select(r), sorted[r - 1]);
        ASSERT_EQ(os.select(sorted.size()), sorted.back());
      }
    }
    EXPECT_THROW(os.select(0), ContractViolation);
    EXPECT_THROW(os.select(ref.size() + 1), ContractViolation);
  }
}

TEST(QuantileState, StreamingQuantileMatchesSortEveryRound) {
  Rng rng(42);
  QuantileState s(0.5, 1.0);
  std::vector<double> ref;
  for (int t = 0; t < 2000; ++t) {
    const double x = rng.pareto(1.0, 1.5);
    s.observe(x);
    ref.push_back(x);
    ASSERT_EQ(s.t_seen(), ref.size());
    if (t < 300 || t % 13 == 0) {
      for (int qi = 1; qi <= 99; ++qi) {
        const double q = qi / 100.0;
        ASSERT_EQ(s.empirical_quantile(q), sorted_quantile(ref, q)) << t << " " << q;
      }
    }
  }
}

TEST(QuantileFilter, DecisionIsDefinitionalAndHistoryGrows) {
  Rng rng(43);
  std::vector<double> grads(3000);
  for (double& g : grads) g = rng.uniform(-1.0, 1.0) * (rng.bernoulli(0.1) ? 50.0 : 1.0);
  auto env = linear_stream(grads);
  AdaptiveOgd learner(env.domain());
  QuantileState shadow(0.8, 1.0 / (3000.0 * 3000.0));
  std::size_t passes = 0;
  std::vector<std::byte> prev = learner.state_bytes();
  const Trace tr = run_quantile_filter(env, learner, 0.8, 3000, FilterStatMode::kGradientNorm,
                                       [&](const RoundRecord& r, const OnlineLearner& l) {
                                         const double lcb = shadow.lcb();
                                         EXPECT_EQ(r.filter_stat, lcb);
                                         EXPECT_EQ(r.decision == Decision::kPassed, r.statistic <= lcb);
                                         EXPECT_EQ(r.statistic, r.grad_norm);
                                         if (r.decision == Decision::kFiltered) EXPECT_EQ(l.state_bytes(), prev);
                                         prev = l.state_bytes();
                                         shadow.observe(r.statistic);
                                         passes += r.decision == Decision::kPassed;
                                       });
  EXPECT_EQ(tr.size(), 3000u);
  EXPECT_EQ(tr.front().decision, Decision::kFiltered);
  EXPECT_GT(passes, 1500u);
}

TEST(QuantileFilter, ConstantStreamThresholdCrossing) {
  const double c = 0.5;
  const std::size_t T = 400;
  const double p = 0.7, delta = 1.0 / (static_cast<double>(T) * T);
  auto env = linear_stream(std::vector<double>(T, c));
  AdaptiveOgd learner(env.domain());
  const Trace tr = run_quantile_filter(env, learner, p, T, FilterStatMode::kGradientNorm);
  // Closed form: round t passes iff t - 1 >= 1 and p - u_{t-1} > 0.
  for (std::size_t t = 1; t <= T; ++t) {
    const bool expect_pass = t >= 2 && p - bernstein_width(p, delta, t - 1) > 0.0;
    ASSERT_EQ(tr[t - 1].decision == Decision::kPassed, expect_pass) << t;
  }
  EXPECT_EQ(tr.back().decision, Decision::kPassed);
}

TEST(QuantileFilter, FeatureModeUsesFeatureNorm) {
  HeavyTailLogisticEnv env(0.5, 500, 3);
  AdaptiveOgd learner(env.domain());
  const Trace tr = run_quantile_filter(env, learner, 0.9, 500, FilterStatMode::kFeatureNorm);
  for (const RoundRecord& r : tr) EXPECT_EQ(r.statistic, std::abs(r.event.features()[0]));
}

TEST(QuantileBound, Arithmetic) {
  const RegretBoundFn zero = [](double, double) { return 0.0; };
  EXPECT_EQ(theorem41_bound(zero, 0.0, 1.0, 0.5, 100), 0.0);
  // mpmath: 2*2*sqrt(90) + 2*(4 sqrt(2*0.09*100 ln 100) + 13/3 ln(100)^2 + 3).
  const RegretBoundFn b = [](double g, double n) { return 2.0 * 2.0 * g * std::sqrt(n); };
  EXPECT_NEAR(theorem41_bound(b, 2.0, 1.0, 0.9, 100), 300.58296862909204, 1e-9);
  // p = 1 - 1/sqrt(T), T = 1e4: p(1-p)T = 99 and the middle term is 170.81673892924120.
  EXPECT_NEAR(theorem41_bound(zero, 1.0, 1.0, 0.99, 10000) - (13.0 / 3.0) * std::pow(std::log(1e4), 2) - 3.0,
              170.81673892924120, 1e-9);
  EXPECT_THROW(theorem41_bound(zero, 1.0, 1.0, 0.5, 1), ContractViolation);
}
