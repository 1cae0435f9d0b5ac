#pragma once

// Environments for tests: replay a fixed list of loss events.

#include <utility>

#include "roco/environments.hpp"

namespace roco::testing {

class ReplayEnv final : public Environment {
 public:
  ReplayEnv(std::vector<LossEvent> events, Domain domain) : events_(std::move(events)), domain_(std::move(domain)) {}

  std::size_t horizon() const override { return events_.size(); }
  const Domain& domain() const override { return domain_; }
  std::optional<LossEvent> next_event(std::size_t t, ConstVec) override {
    if (t > events_.size()) return std::nullopt;
    return events_[t - 1];
  }
  std::string_view name() const override { return "replay"; }

 private:
  std::vector<LossEvent> events_;
  Domain domain_;
};

/// 1-D linear events with the given gradients on [-1, 1].
inline ReplayEnv linear_stream(const std::vector<double>& grads, double half_width = 1.0) {
  std::vector<LossEvent> ev;
  for (double g : grads) ev.emplace_back(LinearLoss{{g}});
  return ReplayEnv(std::move(ev), Domain::interval(-half_width, half_width));
}

}  // namespace roco::testing
