#pragma once

// Comparators, robust regret, bound checks and online-to-batch risk.

#include <functional>
#include <memory>
#include <span>

#include "roco/core.hpp"
#include "roco/environments.hpp"
#include "roco/parallel.hpp"
#include "roco/runner.hpp"

namespace roco {

// ---------------------------------------------------------------------------
// Comparators

/// argmin over the domain of the summed loss of `events`.
/// Linear losses: closed form (ball: opposite the gradient sum; box:
/// per-coordinate endpoint by sign). 1-D: coarse grid plus golden-section
/// refinement to 1e-8. Otherwise: projected subgradient descent with iterate
/// averaging, an approximate oracle. No events: the domain center.
Vector minimize_summed_loss(std::span<const LossEvent* const> events, const Domain& domain);

/// Best fixed comparator on the rounds in S.
Vector best_comparator(const Trace& trace, const RoundMask& inliers, const Domain& domain);

/// All rounds of a trace.
RoundMask all_rounds(const Trace& trace);
/// [T] minus the k rounds with the largest gradient norms.
RoundMask drop_largest(const Trace& trace, std::size_t k);
/// {t : statistic_t <= threshold}
RoundMask statistic_at_most(const Trace& trace, double threshold);

// ---------------------------------------------------------------------------
// Regret

struct RegretPair {
  double regret = 0.0;      // sum_{t in S} f_t(w_t) - f_t(u)
  double linearized = 0.0;  // sum_{t in S} <w_t - u, g_t>
};

RegretPair robust_regret(const Trace& trace, const RoundMask& inliers, ConstVec u);

/// G(S) = max_{t in S} ||g_t||, 0 for empty S.
double max_inlier_norm(const Trace& trace, const RoundMask& inliers);
/// D(u, S) = max over all t with ||g_t|| <= 2 G(S) of ||w_t - u||; 0 for none.
double comparator_spread(const Trace& trace, ConstVec u, double inlier_norm);

struct RegretLedger {
  RoundMask inliers;
  Vector u;
  double robust_regret = 0.0;
  double linearized_robust_regret = 0.0;
  double g_s = 0.0;
  double d_us = 0.0;
};

/// Ledger at the best comparator for S.
RegretLedger make_ledger(const Trace& trace, RoundMask inliers, const Domain& domain);
/// Ledger at a given comparator.
RegretLedger make_ledger(const Trace& trace, RoundMask inliers, Vector u);

// ---------------------------------------------------------------------------
// Bound checks for top-k filtering

/// Regret bound of the base learner on its passed rounds, evaluated on the
/// trace; `grad_bound` is 2 G(S).
using PassedBoundFn = std::function<double(const Trace& trace, double grad_bound)>;

/// 2 D sqrt(sum of squared passed norms): the data-dependent adaptive OGD bound.
PassedBoundFn certified_adaptive_ogd_bound(double diameter);
/// learner.regret_bound(grad_bound, #passed)
PassedBoundFn worst_case_bound(const OnlineLearner& learner);

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double learner_term = 0.0;
  double overhead_term = 0.0;
  double g_s = 0.0;
  double d_us = 0.0;
  bool holds = false;
  double slack() const { return rhs - lhs; }
};

/// Relative tolerance for deterministic inequalities.
inline constexpr double kBoundRelTol = 1e-6;
bool within_bound(double lhs, double rhs);

/// Linearized robust regret <= B(2 G(S)) + 4 D(u,S) G(S) (k+1), for
/// S = [T] minus the k largest-norm rounds and u its best comparator.
BoundReport check_thm31_bound(const Trace& trace, std::size_t k, const Domain& domain,
                              const PassedBoundFn& learner_bound);
/// Same inequality for a caller-chosen (S, u) with T - |S| <= k.
BoundReport check_thm31_bound(const Trace& trace, std::size_t k, const RoundMask& inliers, ConstVec u,
                              const PassedBoundFn& learner_bound);

/// Adaptive OGD + top-k: R_T(u,S) <= 2D sqrt(sum_S ||g||^2) + 2 D G(S)(2k + sqrt(k) + 2).
BoundReport check_general_convex_bound(const Trace& trace, std::size_t k, const RoundMask& inliers, ConstVec u,
                                       double diameter);
/// 1/(sigma t) OGD + top-k on sigma-strongly convex losses:
/// R_T(u,S) <= 2 G(S)^2/sigma (ln T + 1) + 5 Gt^2/(2 sigma) (k+1),
/// Gt = 2 G(S) + max_{t : ||g_t|| <= 2 G(S)} ||grad f_t(u)||.
BoundReport check_strongly_convex_bound(const Trace& trace, std::size_t k, const RoundMask& inliers, ConstVec u,
                                        double sigma);

/// (1/2) sum_P ||g_t||^2 / (sigma n_t) + (sigma/2) sum_P ||w_t - u||^2 over the
/// passed rounds, n_t the index of the update.
double sc_ogd_passed_bound(const Trace& trace, ConstVec u, double sigma);
/// sum over passed rounds of <w_t - u, g_t>
double passed_linearized_regret(const Trace& trace, ConstVec u);

// ---------------------------------------------------------------------------
// Monte Carlo over seeds

using EnvFactory = std::function<std::unique_ptr<Environment>(std::uint64_t seed)>;

/// Mean robust regret at the environment's adversarial (u, S).
McEstimate lower_bound_mc(const EnvFactory& make_env, const LearnerSpec& learner, const FilterSpec& filter,
                          std::size_t n_seeds, unsigned workers, std::uint64_t first_seed = 1);

// ---------------------------------------------------------------------------
// Quantile-filter regret

struct QuantileRegret {
  double robust_regret = 0.0;  // max over u, S = {t : stat_t <= G_p}
  double pseudo_regret = 0.0;  // at a fixed comparator, when one is given
  std::size_t inlier_count = 0;
};

QuantileRegret quantile_robust_regret(const Trace& trace, double quantile_value, const Domain& domain,
                                      const Vector* fixed_comparator = nullptr);

/// Fixed comparator argmin_u <u, m> for the conditional inlier mean m.
Vector linear_comparator(ConstVec mean_gradient, const Domain& domain);

struct Thm41Report {
  McEstimate regret;
  double bound = 0.0;
  double ratio = 0.0;  // mean / bound
  bool holds = false;  // mean <= bound + 4 standard errors
};

Thm41Report check_thm41(std::span<const double> per_seed_regret, double p, std::size_t horizon, double diameter,
                        double quantile_value, const RegretBoundFn& base_bound);

/// Largest ratio |f_t(w_t) - f_t(u)| / (D X_p L) over passed rounds whose
/// feature norm is <= X_p. At most 1 for L-Lipschitz margin losses.
double feature_mode_increment_ratio(const Trace& trace, ConstVec u, double feature_quantile, double diameter,
                                    double lipschitz);

// ---------------------------------------------------------------------------
// Online-to-batch

/// Risk of the target distribution, relative to its minimizer.
class RiskModel {
 public:
  virtual ~RiskModel() = default;
  virtual const Vector& minimizer() const = 0;
  virtual double excess_risk(ConstVec w) const = 0;
  virtual double excess_stderr(ConstVec) const { return 0.0; }
  virtual std::size_t samples() const { return 0; }
};

/// Sample-average risk over a fresh i.i.d. reference sample; the minimizer is
/// found by the comparator oracle on that sample.
class MonteCarloRiskModel final : public RiskModel {
 public:
  MonteCarloRiskModel(const LossDistribution& dist, const Domain& domain, std::size_t n_samples,
                      std::uint64_t seed);

  const Vector& minimizer() const override { return minimizer_; }
  double excess_risk(ConstVec w) const override;
  double excess_stderr(ConstVec w) const override;
  std::size_t samples() const override { return sample_.size(); }

 private:
  std::vector<LossEvent> sample_;
  std::vector<double> loss_at_min_;
  Vector minimizer_;
};

/// Exact risk of the heavy-tailed logistic model by quadrature:
/// E[(1-flip) ln(1+e^{-|X|w}) + flip ln(1+e^{|X|w})], Pr(|X| > x) = x^-(1+gamma).
class HeavyTailRiskModel final : public RiskModel {
 public:
  HeavyTailRiskModel(double gamma, double flip);

  const Vector& minimizer() const override { return minimizer_; }
  double excess_risk(ConstVec w) const override;
  double risk(double w) const;

 private:
  double integrate(double w, double u) const;

  double gamma_, flip_;
  Vector minimizer_;
};

struct BatchResult {
  Vector iterate_average;
  double excess_risk_estimate = 0.0;
  double excess_stderr = 0.0;
  std::size_t risk_mc_samples = 0;
};

BatchResult online_to_batch(const Trace& trace, const RiskModel& model);

/// Right-hand side of the Huber excess-risk guarantee:
/// 12 D G eps + 2 D G (5 sqrt(2 ln(2/delta)) + 2)/sqrt(T) + 2 D G (ln(2/delta) + 10)/T.
double huber_excess_risk_bound(double diameter, double grad_bound, double epsilon, double delta,
                               std::size_t horizon);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace roco
