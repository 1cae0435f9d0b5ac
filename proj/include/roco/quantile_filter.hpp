#pragma once

// Quantile LCB filtering for i.i.d. statistics.
//
// Round t passes iff its statistic (gradient or feature dual norm) is at most
// LCB_{t-1} = q_{t-1}(p - u_{t-1}), the lower empirical quantile of all past
// statistics at a level shrunk by the Bernstein width
//   u_n = sqrt(2 p (1-p) ln(1/delta) / n) + ln(1/delta) / (3 n).
// Every statistic joins the history, passed or not.

#include <functional>

#include "roco/core.hpp"
#include "roco/order_statistics.hpp"
#include "roco/topk_filter.hpp"

namespace roco {

class Environment;

double bernstein_width(double p, double delta, std::size_t n);

enum class FilterStatMode { kGradientNorm, kFeatureNorm };

std::string_view to_string(FilterStatMode m);

class QuantileState {
 public:
  QuantileState(double p, double delta);

  double p() const { return p_; }
  double delta() const { return delta_; }
  std::size_t t_seen() const { return history_.size(); }

  void observe(double statistic) { history_.insert(statistic); }
  /// ceil(q n)-th smallest stored value; 0 for q <= 0 or an empty history.
  /// Throws ContractViolation for q > 1.
  double empirical_quantile(double q) const;
  /// empirical_quantile(p - bernstein_width(p, delta, t_seen)); 0 when empty.
  double lcb() const;

 private:
  double p_, delta_;
  OrderStatistics history_;
};

class QuantileFilter {
 public:
  QuantileFilter(double p, double delta) : state_(p, delta) {}

  /// Decide on `statistic` against the LCB of the past, then record it.
  std::pair<Decision, double> step(double statistic);
  const QuantileState& state() const { return state_; }

 private:
  QuantileState state_;
};

/// Run with delta = T^-2 for the known horizon T.
Trace run_quantile_filter(Environment& env, OnlineLearner& learner, double p, std::size_t horizon,
                          FilterStatMode mode, const RoundObserver& observer = {});

/// B_{pT}(G_p) + D G_p (4 sqrt(2 p (1-p) T ln T) + (13/3)(ln T)^2 + 3)
using RegretBoundFn = std::function<double(double grad_bound, double rounds)>;
double theorem41_bound(const RegretBoundFn& base_bound, double diameter, double quantile_value, double p,
                       std::size_t horizon);

}  // namespace roco
