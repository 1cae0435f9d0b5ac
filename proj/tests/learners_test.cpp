#include <gtest/gtest.h>

#include <cmath>

#include "roco/evaluation.hpp"
#include "roco/learners.hpp"
#include "roco/rng.hpp"

using namespace roco;

TEST(AdaptiveOgd, FirstStepClampsToBoundary) {
  AdaptiveOgdState s(Domain::interval(-1.0, 1.0));
  EXPECT_EQ(s.w, (Vector{0.0}));
  s = adaptive_ogd_update(s, Vector{1.0});
  EXPECT_DOUBLE_EQ(s.sum_sq, 1.0);
  EXPECT_DOUBLE_EQ(s.w[0], -1.0);  // 0 - (2 / sqrt 2) * 1 clamped
}

TEST(AdaptiveOgd, ZeroGradientIsNoOp) {
  AdaptiveOgdState s(Domain::interval(-1.0, 1.0));
  s = adaptive_ogd_update(s, Vector{0.25});
  const AdaptiveOgdState before = s;
  s = adaptive_ogd_update(s, Vector{0.0});
  EXPECT_EQ(s.w, before.w);
  EXPECT_EQ(s.sum_sq, before.sum_sq);
}

TEST(AdaptiveOgd, SecondStepSize) {
  // D = 20: the first step of length D / sqrt 2 clamps to the boundary.
  AdaptiveOgdState s(Domain::interval(-10.0, 10.0));
  s = adaptive_ogd_update(s, Vector{1.0});
  EXPECT_EQ(s.w[0], -10.0);
  s = adaptive_ogd_update(s, Vector{-0.5});
  EXPECT_DOUBLE_EQ(s.sum_sq, 1.25);
  EXPECT_DOUBLE_EQ(s.w[0], -10.0 + 20.0 / std::sqrt(2.5) * 0.5);
}

TEST(AdaptiveOgd, UnitDomainSecondStepIsOne) {
  AdaptiveOgdState s(Domain::interval(-1.0, 1.0));
  s = adaptive_ogd_update(s, Vector{1.0});
  s = adaptive_ogd_update(s, Vector{-1.0});
  EXPECT_DOUBLE_EQ(s.w[0], 0.0);  // -1 + (2 / 2) * 1
}

TEST(AdaptiveOgd, RegretBoundArithmetic) {
  EXPECT_EQ(adaptive_ogd_regret_bound(2.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(adaptive_ogd_regret_bound(2.0, 100.0), 40.0);
  EXPECT_NEAR(adaptive_ogd_regret_bound(1.0, 2.0), 2.8284271247461903, 1e-15);
}

TEST(ScOgd, StepSchedule) {
  StronglyConvexOgdState s(Domain::interval(-1.0, 1.0), 1.0);
  s = sc_ogd_update(s, Vector{0.5});
  EXPECT_DOUBLE_EQ(s.w[0], -0.5);
  EXPECT_EQ(s.passed_count, 1u);

  StronglyConvexOgdState t(Domain::interval(-10.0, 10.0), 2.0);
  t = sc_ogd_update(t, Vector{0.0});
  t = sc_ogd_update(t, Vector{0.0});
  EXPECT_EQ(t.w[0], 0.0);  // zero gradient still advances the counter
  EXPECT_EQ(t.passed_count, 2u);
  t = sc_ogd_update(t, Vector{1.0});
  EXPECT_DOUBLE_EQ(t.w[0], -1.0 / 6.0);
}

TEST(Learners, RegretBoundMonotoneAndConcave) {
  const AdaptiveOgd a(Domain::interval(-1.0, 1.0));
  const StronglyConvexOgd s(Domain::interval(-1.0, 1.0), 0.5);
  for (const OnlineLearner* l : {static_cast<const OnlineLearner*>(&a), static_cast<const OnlineLearner*>(&s)}) {
    for (double n = 1.0; n < 1000.0; n += 7.0) {
      EXPECT_LE(l->regret_bound(1.0, n), l->regret_bound(1.0, n + 1.0));
      EXPECT_LE(l->regret_bound(1.0, n), l->regret_bound(1.5, n));
      const double mid = l->regret_bound(1.0, n + 1.0);
      EXPECT_GE(mid + 1e-12, 0.5 * (l->regret_bound(1.0, n) + l->regret_bound(1.0, n + 2.0)));
    }
  }
}

TEST(Learners, CertifiedAdaptiveBoundOnRandomSequences) {
  Rng rng(21);
  const Domain domain = Domain::ball({0.0, 0.0}, 1.0);
  for (int seq = 0; seq < 100; ++seq) {
    AdaptiveOgd learner(domain);
    Trace trace;
    double sum_sq = 0.0;
    for (int t = 1; t <= 200; ++t) {
      RoundRecord r;
      r.t = t;
      r.w = learner.predict();
      ASSERT_TRUE(domain.contains(r.w));
      r.grad = {rng.uniform(-1.0, 1.0) + 0.3, rng.uniform(-1.0, 1.0)};
      r.grad_norm = norm2(r.grad);
      r.event = LossEvent(LinearLoss{r.grad});
      r.loss_value = r.event.value(r.w);
      sum_sq += r.grad_norm * r.grad_norm;
      learner.update(r.event, r.grad);
      trace.push_back(r);
    }
    const Vector u = best_comparator(trace, all_rounds(trace), domain);
    EXPECT_LE(robust_regret(trace, all_rounds(trace), u).linearized,
              adaptive_ogd_regret_bound(domain.diameter(), sum_sq) + 1e-6);
  }
}

TEST(Learners, StronglyConvexSummationBound) {
  Rng rng(22);
  const double sigma = 1.5;
  const Domain domain = Domain::interval(-2.0, 2.0);
  for (int seq = 0; seq < 100; ++seq) {
    StronglyConvexOgd learner(domain, sigma);
    Trace trace;
    for (int t = 1; t <= 200; ++t) {
      RoundRecord r;
      r.t = t;
      r.w = learner.predict();
      ASSERT_TRUE(domain.contains(r.w));
      r.event = LossEvent(SquaredLoss{{rng.uniform(-1.5, 1.5)}, sigma});
      r.grad = r.event.subgradient(r.w);
      r.grad_norm = norm2(r.grad);
      r.loss_value = r.event.value(r.w);
      learner.update(r.event, r.grad);
      trace.push_back(r);
    }
    const Vector u = best_comparator(trace, all_rounds(trace), domain);
    EXPECT_LE(robust_regret(trace, all_rounds(trace), u).regret, sc_ogd_passed_bound(trace, u, sigma) + 1e-6);
    EXPECT_LE(robust_regret(trace, all_rounds(trace), u).linearized, sc_ogd_passed_bound(trace, u, sigma) + 1e-6);
  }
}

TEST(Learners, StrongConvexityDistanceLemma) {
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const double sigma = rng.uniform(0.1, 5.0);
    const LossEvent f(SquaredLoss{{rng.uniform(-3, 3), rng.uniform(-3, 3)}, sigma});
    const Vector w{rng.uniform(-3, 3), rng.uniform(-3, 3)}, u{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    EXPECT_LE(distance2(w, u), (norm2(f.subgradient(w)) + norm2(f.subgradient(u))) / sigma + 1e-9);
  }
}

TEST(Learners, StateBytesTrackEveryField) {
  AdaptiveOgd a(Domain::interval(-1.0, 1.0));
  const auto before = a.state_bytes();
  a.update(LossEvent(LinearLoss{{0.0}}), Vector{0.0});
  EXPECT_EQ(a.state_bytes(), before);
  a.update(LossEvent(LinearLoss{{0.1}}), Vector{0.1});
  EXPECT_NE(a.state_bytes(), before);

  StronglyConvexOgd s(Domain::interval(-1.0, 1.0), 1.0);
  const auto sb = s.state_bytes();
  s.update(LossEvent(SquaredLoss{{0.0}, 1.0}), Vector{0.0});
  EXPECT_NE(s.state_bytes(), sb);  // the counter moved
}

TEST(Learners, CloneIsIndependent) {
  AdaptiveOgd a(Domain::interval(-1.0, 1.0));
  auto b = a.clone();
  a.update(LossEvent(LinearLoss{{1.0}}), Vector{1.0});
  EXPECT_EQ(b->predict(), (Vector{0.0}));
  EXPECT_NE(a.predict(), b->predict());
}
