#pragma once

// Shared online protocol loop: predict, reveal, filter, maybe update.

#include <utility>

#include "roco/core.hpp"
#include "roco/environments.hpp"
#include "roco/topk_filter.hpp"

namespace roco::detail {

/// `statistic(event, grad_norm)` -> value the filter thresholds.
/// `decide(stat)` -> (decision, filter_stat).
template <class StatFn, class DecideFn>
Trace run_filtered(Environment& env, OnlineLearner& learner, const RoundObserver& observer, StatFn&& statistic,
                   DecideFn&& decide) {
  Trace trace;
  trace.reserve(env.horizon());
  for (std::size_t t = 1;; ++t) {
    const Vector& w = learner.predict();
    std::optional<LossEvent> event = env.next_event(t, w);
    if (!event) break;
    RoundRecord rec;
    rec.t = t;
    rec.w = w;
    rec.grad = event->subgradient(w);
    rec.grad_norm = L2Norm::dual_norm(rec.grad);
    rec.loss_value = event->value(w);
    rec.statistic = statistic(*event, rec.grad_norm);
    auto [decision, filter_stat] = decide(rec.statistic);
    rec.decision = decision;
    rec.filter_stat = filter_stat;
    if (decision == Decision::kPassed) learner.update(*event, rec.grad);
    rec.event = std::move(*event);
    trace.push_back(std::move(rec));
    if (observer) observer(trace.back(), learner);
  }
  return trace;
}

}  // namespace roco::detail
