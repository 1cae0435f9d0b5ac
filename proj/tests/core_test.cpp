#include <gtest/gtest.h>

#include <cmath>

#include "roco/core.hpp"
#include "roco/rng.hpp"

using namespace roco;

namespace {

Vector random_vec(Rng& rng, std::size_t d, double scale) {
  Vector v(d);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

std::vector<LossEvent> sample_events(Rng& rng, std::size_t d) {
  std::vector<LossEvent> out;
  out.emplace_back(LinearLoss{random_vec(rng, d, 3.0)});
  out.emplace_back(SquaredLoss{random_vec(rng, d, 2.0), rng.uniform(0.1, 3.0)});
  out.emplace_back(LogisticLoss{random_vec(rng, d, 4.0), rng.rademacher()});
  out.emplace_back(HingeLoss{random_vec(rng, d, 4.0), rng.rademacher()});
  return out;
}

}  // namespace

TEST(Domain, BallProjectionRescalesRadially) {
  const Domain ball = Domain::ball({0.0, 0.0}, 1.0);
  const Vector p = ball.project(Vector{3.0, 4.0});
  EXPECT_DOUBLE_EQ(p[0], 0.6);
  EXPECT_DOUBLE_EQ(p[1], 0.8);
}

TEST(Domain, BoxProjectionClamps) {
  const Domain box = Domain::box({-1.0, -1.0}, {1.0, 1.0});
  const Vector p = box.project(Vector{0.5, 2.0});
  EXPECT_EQ(p, (Vector{0.5, 1.0}));
}

TEST(Domain, InteriorPointIsFixed) {
  const Domain ball = Domain::ball({0.0, 0.0}, 1.0);
  EXPECT_EQ(ball.project(Vector{0.2, 0.1}), (Vector{0.2, 0.1}));
}

TEST(Domain, Diameters) {
  EXPECT_DOUBLE_EQ(Domain::ball({0.0}, 1.0).diameter(), 2.0);
  EXPECT_DOUBLE_EQ(Domain::box({-1.0}, {1.0}).diameter(), 2.0);
  EXPECT_DOUBLE_EQ(Domain::box({0.0, 0.0}, {3.0, 4.0}).diameter(), 5.0);
}

TEST(Domain, InvalidShapesRejected) {
  EXPECT_THROW(Domain::ball({0.0}, 0.0), ConfigError);
  EXPECT_THROW(Domain::box({1.0}, {1.0}), ConfigError);
  EXPECT_THROW(Domain::box({0.0, 0.0}, {1.0}), ConfigError);
}

TEST(Domain, DimensionMismatchIsConfigError) {
  const Domain ball = Domain::ball({0.0, 0.0}, 1.0);
  EXPECT_THROW(ball.project(Vector{1.0}), ConfigError);
}

TEST(Domain, ProjectionIsIdempotentAndContained) {
  Rng rng(7);
  const Domain domains[] = {Domain::ball({0.5, -1.0, 2.0}, 1.7), Domain::box({-1.0, 0.0, 2.0}, {1.0, 0.5, 7.0})};
  for (const Domain& d : domains) {
    for (int i = 0; i < 1000; ++i) {
      const Vector w = random_vec(rng, 3, 20.0);
      const Vector p = d.project(w);
      EXPECT_TRUE(d.contains(p));
      EXPECT_EQ(d.project(p), p);
    }
  }
}

TEST(Domain, ProjectionIsNearestPoint) {
  Rng rng(8);
  const Domain ball = Domain::ball({1.0, -2.0}, 1.5);
  for (int i = 0; i < 200; ++i) {
    const Vector w = random_vec(rng, 2, 6.0);
    const Vector p = ball.project(w);
    for (int j = 0; j < 50; ++j) {
      const Vector q = ball.project(random_vec(rng, 2, 6.0));
      EXPECT_LE(distance2(w, p), distance2(w, q) + 1e-12);
    }
  }
}

TEST(Norm, DualNormAndHolder) {
  Rng rng(9);
  EXPECT_EQ(L2Norm::dual_norm(Vector{0.0, 0.0}), 0.0);
  for (int i = 0; i < 1000; ++i) {
    const Vector w = random_vec(rng, 4, 5.0), g = random_vec(rng, 4, 5.0);
    EXPECT_GT(L2Norm::dual_norm(g), 0.0);
    EXPECT_LE(std::abs(dot(w, g)), L2Norm::norm(w) * L2Norm::dual_norm(g) * (1 + 1e-15));
  }
}

TEST(Loss, SpecExamples) {
  const LossEvent lin(LinearLoss{{2.0, -1.0}});
  EXPECT_EQ(lin.subgradient(Vector{0.3, 9.0}), (Vector{2.0, -1.0}));
  const LossEvent sq(SquaredLoss{{1.0}, 1.0});
  EXPECT_DOUBLE_EQ(sq.subgradient(Vector{0.0})[0], -1.0);
  const LossEvent logi(LogisticLoss{{1.0}, 1.0});
  EXPECT_DOUBLE_EQ(logi.subgradient(Vector{0.0})[0], -0.5);
  // Central difference of ln(1 + e^-w) at 0.
  const double h = 1e-6;
  const double fd = (std::log1p(std::exp(-h)) - std::log1p(std::exp(h))) / (2 * h);
  EXPECT_NEAR(logi.subgradient(Vector{0.0})[0], fd, 1e-9);
}

TEST(Loss, HingeKinkReturnsZero) {
  const LossEvent hinge(HingeLoss{{1.0, 0.0}, 1.0});
  EXPECT_EQ(hinge.subgradient(Vector{1.0, 0.5}), (Vector{0.0, 0.0}));
  EXPECT_EQ(hinge.subgradient(Vector{0.5, 0.0}), (Vector{-1.0, -0.0}));
}

TEST(Loss, FeaturesOnlyForMarginLosses) {
  EXPECT_EQ(LossEvent(LogisticLoss{{3.0}, -1.0}).features(), (Vector{3.0}));
  EXPECT_THROW(LossEvent(LinearLoss{{1.0}}).features(), ContractViolation);
}

TEST(Loss, SubgradientInequality) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    for (const LossEvent& e : sample_events(rng, 3)) {
      const Vector w = random_vec(rng, 3, 2.0), u = random_vec(rng, 3, 2.0);
      const Vector g = e.subgradient(w);
      Vector diff(3);
      for (int j = 0; j < 3; ++j) diff[j] = u[j] - w[j];
      EXPECT_GE(e.value(u), e.value(w) + dot(diff, g) - 1e-9);
    }
  }
}

TEST(Loss, SquaredLossIsStronglyConvex) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double sigma = rng.uniform(0.1, 4.0);
    const LossEvent e(SquaredLoss{random_vec(rng, 2, 2.0), sigma});
    const Vector w = random_vec(rng, 2, 2.0), u = random_vec(rng, 2, 2.0);
    const Vector g = e.subgradient(w);
    const Vector diff{u[0] - w[0], u[1] - w[1]};
    EXPECT_GE(e.value(u), e.value(w) + dot(diff, g) + 0.5 * sigma * squared_norm2(diff) - 1e-9);
  }
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  Rng rng(13);
  const double h = 1e-6;
  for (int i = 0; i < 500; ++i) {
    const LossEvent events[] = {LossEvent(SquaredLoss{random_vec(rng, 3, 2.0), rng.uniform(0.1, 3.0)}),
                                LossEvent(LogisticLoss{random_vec(rng, 3, 3.0), rng.rademacher()})};
    for (const LossEvent& e : events) {
      const Vector w = random_vec(rng, 3, 1.5);
      const Vector g = e.subgradient(w);
      for (int j = 0; j < 3; ++j) {
        Vector a = w, b = w;
        a[j] += h;
        b[j] -= h;
        const double fd = (e.value(a) - e.value(b)) / (2 * h);
        EXPECT_LE(std::abs(fd - g[j]), 1e-5 * std::max(std::abs(g[j]), 1e-3)) << "coordinate " << j;
      }
    }
  }
}

TEST(Loss, SoftplusIsStable) {
  EXPECT_DOUBLE_EQ(softplus(800.0), 800.0);
  EXPECT_GT(softplus(-800.0), -1.0);
  EXPECT_LT(softplus(-800.0), 1e-300);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
}

TEST(Rng, DeterministicPerSeedAndStream) {
  Rng a(5, Stream::kEvents), b(5, Stream::kEvents), c(5, Stream::kChoice);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, BelowIsInRangeAndUniformish) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = rng.below(7);
    ASSERT_LT(x, 7u);
    ++counts[x];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}
