#include "roco/quantile_filter.hpp"

#include <algorithm>
#include <cmath>

#include "roco/environments.hpp"
#include "run_loop.hpp"

namespace roco {

double bernstein_width(double p, double delta, std::size_t n) {
  if (n == 0) throw ContractViolation("bernstein_width: n must be positive");
  const double log_term = std::log(1.0 / delta);
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0 * p * (1.0 - p) * log_term / nd) + log_term / (3.0 * nd);
}

std::string_view to_string(FilterStatMode m) {
  return m == FilterStatMode::kGradientNorm ? "gradient-norm" : "feature-norm";
}

QuantileState::QuantileState(double p, double delta) : p_(p), delta_(delta) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile filter: p must be in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("quantile filter: delta must be in (0, 1]");
}

double QuantileState::empirical_quantile(double q) const {
  if (q > 1.0) throw ContractViolation("empirical_quantile: level above 1");
  const std::size_t n = history_.size();
  if (q <= 0.0 || n == 0) return 0.0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return history_.select(rank);
}

double QuantileState::lcb() const {
  if (history_.empty()) return 0.0;
  return empirical_quantile(p_ - bernstein_width(p_, delta_, history_.size()));
}

std::pair<Decision, double> QuantileFilter::step(double statistic) {
  const double bound = state_.lcb();
  const Decision d = statistic <= bound ? Decision::kPassed : Decision::kFiltered;
  state_.observe(statistic);
  return {d, bound};
}

Trace run_quantile_filter(Environment& env, OnlineLearner& learner, double p, std::size_t horizon,
                          FilterStatMode mode, const RoundObserver& observer) {
  if (horizon == 0) throw ConfigError("quantile filter: horizon must be positive");
  const double delta = 1.0 / (static_cast<double>(horizon) * static_cast<double>(horizon));
  QuantileFilter filter(p, delta);
  auto decide = [&](double stat) { return filter.step(stat); };
  if (mode == FilterStatMode::kGradientNorm) {
    return detail::run_filtered(
        env, learner, observer, [](const LossEvent&, double grad_norm) { return grad_norm; }, decide);
  }
  return detail::run_filtered(
      env, learner, observer, [](const LossEvent& e, double) { return L2Norm::dual_norm(e.features()); },
      decide);
}

double theorem41_bound(const RegretBoundFn& base_bound, double diameter, double quantile_value, double p,
                       std::size_t horizon) {
  if (horizon < 2) throw ContractViolation("theorem41_bound: horizon must be >= 2");
  const double T = static_cast<double>(horizon);
  const double lnT = std::log(T);
  const double overhead = 4.0 * std::sqrt(2.0 * p * (1.0 - p) * T * lnT) + (13.0 / 3.0) * lnT * lnT + 3.0;
  return base_bound(quantile_value, p * T) + diameter * quantile_value * overhead;
}

}  // namespace roco
