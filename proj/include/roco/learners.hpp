#pragma once

// Projected online gradient descent in two tunings.

#include "roco/core.hpp"

namespace roco {

/// OGD with step D / sqrt(2 * sum of squared passed gradient norms).
struct AdaptiveOgdState {
  Vector w;
  double sum_sq = 0.0;
  Domain domain;

  explicit AdaptiveOgdState(Domain d) : w(d.center()), domain(std::move(d)) {}
};

/// A zero gradient leaves the state untouched (the step is undefined while
/// sum_sq is 0, and irrelevant anyway).
AdaptiveOgdState adaptive_ogd_update(AdaptiveOgdState state, ConstVec grad);
void adaptive_ogd_update_inplace(AdaptiveOgdState& state, ConstVec grad);

/// Certified linearized regret over the rounds fed to adaptive OGD:
/// 2 D sqrt(sum_sq_passed).
double adaptive_ogd_regret_bound(double diameter, double sum_sq_passed);

/// OGD with step 1/(sigma * n) at the n-th applied update.
struct StronglyConvexOgdState {
  Vector w;
  std::size_t passed_count = 0;
  double sigma = 1.0;
  Domain domain;

  StronglyConvexOgdState(Domain d, double sigma_);
};

StronglyConvexOgdState sc_ogd_update(StronglyConvexOgdState state, ConstVec grad);
void sc_ogd_update_inplace(StronglyConvexOgdState& state, ConstVec grad);

class AdaptiveOgd final : public OnlineLearner {
 public:
  explicit AdaptiveOgd(Domain domain) : state_(std::move(domain)) {}

  const Vector& predict() const override { return state_.w; }
  void update(const LossEvent& event, ConstVec grad) override;
  /// 2 D G sqrt(rounds)
  double regret_bound(double grad_bound, double rounds) const override;
  std::vector<std::byte> state_bytes() const override;
  std::unique_ptr<OnlineLearner> clone() const override;
  const Domain& domain() const override { return state_.domain; }
  std::string_view name() const override { return "adaptive-ogd"; }

  const AdaptiveOgdState& state() const { return state_; }

 private:
  AdaptiveOgdState state_;
};

class StronglyConvexOgd final : public OnlineLearner {
 public:
  StronglyConvexOgd(Domain domain, double sigma) : state_(std::move(domain), sigma) {}

  const Vector& predict() const override { return state_.w; }
  void update(const LossEvent& event, ConstVec grad) override;
  /// G^2 / (2 sigma) * (1 + ln rounds); 0 for rounds < 1. Bounds the actual
  /// regret on sigma-strongly convex losses.
  double regret_bound(double grad_bound, double rounds) const override;
  std::vector<std::byte> state_bytes() const override;
  std::unique_ptr<OnlineLearner> clone() const override;
  const Domain& domain() const override { return state_.domain; }
  std::string_view name() const override { return "sc-ogd"; }

  const StronglyConvexOgdState& state() const { return state_; }

 private:
  StronglyConvexOgdState state_;
};

}  // namespace roco
