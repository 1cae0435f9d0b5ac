#pragma once

// Loss-event streams: lower-bound constructions, Huber mixtures, heavy-tailed
// logistic features, i.i.d. gradients and spiked adversarial streams.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roco/core.hpp"
#include "roco/rng.hpp"

namespace roco {

/// Rounds are 1-based; `mask[t-1]` tells whether round t belongs to the set.
using RoundMask = std::vector<bool>;

struct AdversarialChoice {
  Vector u;
  RoundMask inliers;
};

/// Source of i.i.d. loss events, used for fresh risk estimation.
class LossDistribution {
 public:
  virtual ~LossDistribution() = default;
  virtual LossEvent sample(Rng& rng) const = 0;
  virtual std::unique_ptr<LossDistribution> clone() const = 0;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t horizon() const = 0;
  virtual const Domain& domain() const = 0;
  /// Loss for round t (1-based), or nullopt once t > horizon(). Must be called
  /// with t = 1, 2, ... in order.
  virtual std::optional<LossEvent> next_event(std::size_t t, ConstVec w) = 0;
  virtual std::string_view name() const = 0;

  virtual bool has_adversarial_choice() const { return false; }
  /// The construction's (u, S). Only valid after the run completes.
  virtual AdversarialChoice adversarial_choice() const {
    throw ContractViolation(std::string(name()) + ": no adversarial choice");
  }
  /// Hidden outlier indicators M_t of the rounds generated so far, if any.
  virtual const std::vector<bool>* outlier_flags() const { return nullptr; }
  /// The inlier distribution P, when the environment is i.i.d. from one.
  virtual const LossDistribution* inlier_distribution() const { return nullptr; }
};

// ---------------------------------------------------------------------------

/// f_t(w) = G xi_t w on [-W, W] with fair Rademacher xi_t. After the run the
/// adversary draws zeta and picks u = -W zeta, S = {t <= k : xi_t = zeta} U {k+1..T}.
class RademacherLinearEnv final : public Environment {
 public:
  RademacherLinearEnv(double grad_scale, double half_width, std::size_t horizon, std::size_t k,
                      std::uint64_t seed);

  std::size_t horizon() const override { return horizon_; }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec w) override;
  std::string_view name() const override { return "rademacher-linear"; }
  bool has_adversarial_choice() const override { return true; }
  AdversarialChoice adversarial_choice() const override;

  const std::vector<double>& signs() const { return xi_; }
  double zeta() const { return zeta_; }

 private:
  double scale_, half_width_;
  std::size_t horizon_, k_;
  Domain domain_;
  Rng rng_;
  double zeta_;
  std::vector<double> xi_;
};

/// (u, S) of the linear construction, from explicit signs.
AdversarialChoice rademacher_adversarial_choice(std::span<const double> xi, double zeta, std::size_t k,
                                                std::size_t horizon, double half_width);

/// f_t(w) = (sigma/2)(w - W xi_t)^2 for t <= k, (sigma/2)(w - W zeta)^2 after;
/// the adversary picks u = W zeta, S = {t <= k : xi_t = zeta} U {k+1..T}.
class StronglyConvexAdvEnv final : public Environment {
 public:
  StronglyConvexAdvEnv(double sigma, double half_width, std::size_t horizon, std::size_t k, std::uint64_t seed);

  std::size_t horizon() const override { return horizon_; }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec w) override;
  std::string_view name() const override { return "strongly-convex-adversarial"; }
  bool has_adversarial_choice() const override { return true; }
  AdversarialChoice adversarial_choice() const override;

 private:
  double sigma_, half_width_;
  std::size_t horizon_, k_;
  Domain domain_;
  Rng rng_;
  double zeta_;
  std::vector<double> xi_;
};

// ---------------------------------------------------------------------------
// Distributions used by the mixture and i.i.d. environments.

/// One-dimensional linear losses f(w) = xi w with xi ~ Uniform[low, high].
class UniformLinearDistribution final : public LossDistribution {
 public:
  UniformLinearDistribution(double low, double high);
  LossEvent sample(Rng& rng) const override;
  std::unique_ptr<LossDistribution> clone() const override;
  double bound() const;  // sup |xi|
  double mean() const { return 0.5 * (low_ + high_); }

 private:
  double low_, high_;
};

/// One-dimensional linear losses f(w) = s * R w, R ~ Pareto(scale, alpha),
/// s = +1 with probability `positive_prob`. Unbounded.
class ParetoLinearDistribution final : public LossDistribution {
 public:
  ParetoLinearDistribution(double scale, double alpha, double positive_prob);
  LossEvent sample(Rng& rng) const override;
  std::unique_ptr<LossDistribution> clone() const override;

 private:
  double scale_, alpha_, positive_prob_;
};

/// One-dimensional logistic losses with x ~ Uniform[-G, G] and label sign(x)
/// flipped with probability `flip`. Gradient norms are at most G.
class BoundedLogisticDistribution final : public LossDistribution {
 public:
  BoundedLogisticDistribution(double bound, double flip);
  LossEvent sample(Rng& rng) const override;
  std::unique_ptr<LossDistribution> clone() const override;

 private:
  double bound_, flip_;
};

/// Logistic losses with huge feature magnitude: x = sign * Pareto(scale, alpha),
/// label fixed to `label`.
class ExtremeLogisticDistribution final : public LossDistribution {
 public:
  ExtremeLogisticDistribution(double scale, double alpha, double label);
  LossEvent sample(Rng& rng) const override;
  std::unique_ptr<LossDistribution> clone() const override;

 private:
  double scale_, alpha_, label_;
};

/// Each round independently: M_t ~ Bernoulli(eps); M_t = 1 draws from Q, else P.
class HuberMixtureEnv final : public Environment {
 public:
  HuberMixtureEnv(double epsilon, std::unique_ptr<LossDistribution> inlier,
                  std::unique_ptr<LossDistribution> outlier, Domain domain, std::size_t horizon,
                  std::uint64_t seed);

  std::size_t horizon() const override { return horizon_; }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec w) override;
  std::string_view name() const override { return "huber-mixture"; }
  const std::vector<bool>* outlier_flags() const override { return &flags_; }
  const LossDistribution* inlier_distribution() const override { return inlier_.get(); }

  /// S* = {t : M_t = 0} over the rounds generated so far.
  RoundMask inlier_mask() const;
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
  std::unique_ptr<LossDistribution> inlier_, outlier_;
  Domain domain_;
  std::size_t horizon_;
  Rng mix_rng_, inlier_rng_, outlier_rng_;
  std::vector<bool> flags_;
};

/// Scalar features with Pr(|X| > x) = x^-(1+gamma) on [1, inf), random sign;
/// logistic loss on [-1, 1] with label sign(X) flipped with probability `flip`.
class HeavyTailLogisticEnv final : public Environment {
 public:
  HeavyTailLogisticEnv(double gamma, std::size_t horizon, std::uint64_t seed, double flip = 0.1);

  std::size_t horizon() const override { return horizon_; }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec w) override;
  std::string_view name() const override { return "heavytail-logistic"; }

  double gamma() const { return gamma_; }
  double flip() const { return flip_; }
  /// Analytic p-quantile of |X|: (1-p)^(-1/(1+gamma)).
  double feature_quantile(double p) const;
  /// Draw one |X| without advancing the event stream (for tests).
  static double sample_abs_feature(Rng& rng, double gamma);

 private:
  double gamma_;
  std::size_t horizon_;
  double flip_;
  Domain domain_;
  Rng rng_;
};

/// I.i.d. one-dimensional linear losses g_t = s_t r_t on [-W, W]; r_t is
/// Uniform(0, scale) or Pareto(scale, alpha), s_t = +1 with probability
/// `positive_prob`. Norms are continuous, so the p-quantile has no atom.
class IidGradientEnv final : public Environment {
 public:
  enum class NormLaw { kUniform, kPareto };

  IidGradientEnv(NormLaw law, double scale, double alpha, double positive_prob, double half_width,
                 std::size_t horizon, std::uint64_t seed);

  std::size_t horizon() const override { return horizon_; }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec w) override;
  std::string_view name() const override { return "iid-gradient"; }

  /// Analytic p-quantile G_p of the gradient norm.
  double norm_quantile(double p) const;
  /// E[g | |g| <= G_p], for the pseudo-regret comparator.
  double conditional_inlier_mean(double p) const;

 private:
  NormLaw law_;
  double scale_, alpha_, positive_prob_;
  std::size_t horizon_;
  Domain domain_;
  Rng rng_;
};

/// Linear losses in a d-dimensional ball of radius W. Inlier gradients are
/// drift * e_1 plus noise uniform in a ball of radius `noise` (so norms are at
/// most drift + noise). Spike rounds carry gradient -magnitude * e_1, pushing
/// the iterate toward the worst corner.
class SpikedAdversarialEnv final : public Environment {
 public:
  struct Params {
    std::size_t dimension = 2;
    double half_width = 1.0;
    double drift = 0.5;
    double noise = 0.5;
    std::size_t horizon = 10000;
    std::vector<std::size_t> spike_rounds;  // explicit positions (1-based); or
    std::size_t spike_count = 0;            // ...this many random positions
    double spike_min = 1e12;                // magnitudes log-uniform in [min, max]
    double spike_max = 1e12;
    double spike_multiplier = 1.0;  // scales every spike magnitude
  };

  SpikedAdversarialEnv(Params params, std::uint64_t seed);

  std::size_t horizon() const override { return params_.horizon; }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec w) override;
  std::string_view name() const override { return "spiked-adversarial"; }

  const std::vector<std::size_t>& spike_rounds() const { return spikes_; }
  bool is_spike(std::size_t t) const;

 private:
  Params params_;
  Domain domain_;
  Rng rng_;
  std::vector<std::size_t> spikes_;  // sorted
  std::vector<double> magnitudes_;   // aligned with spikes_
  std::size_t next_spike_ = 0;
};

/// k = ceil(eps T + sqrt(2 T eps (1-eps) ln(2/delta)) + (1/3)(1-eps) ln(2/delta)).
std::size_t huber_k_tuning(double epsilon, std::size_t horizon, double delta);

}  // namespace roco
