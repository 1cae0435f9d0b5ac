#pragma once

// Filter selection shared by the evaluators and the experiment harness.

#include <cstddef>
#include <memory>
#include <string>

#include "roco/core.hpp"
#include "roco/quantile_filter.hpp"
#include "roco/topk_filter.hpp"

namespace roco {

class Environment;

struct FilterSpec {
  enum class Kind { kNone, kTopK, kQuantile };
  Kind kind = Kind::kNone;
  std::size_t k = 0;  // top-k
  double p = 0.9;     // quantile
  FilterStatMode mode = FilterStatMode::kGradientNorm;

  static FilterSpec none() { return {}; }
  static FilterSpec topk(std::size_t k) { return {Kind::kTopK, k, 0.0, FilterStatMode::kGradientNorm}; }
  static FilterSpec quantile(double p, FilterStatMode mode = FilterStatMode::kGradientNorm) {
    return {Kind::kQuantile, 0, p, mode};
  }
};

std::string describe(const FilterSpec& f);

struct LearnerSpec {
  enum class Kind { kAdaptiveOgd, kScOgd };
  Kind kind = Kind::kAdaptiveOgd;
  double sigma = 1.0;

  static LearnerSpec adaptive_ogd() { return {}; }
  static LearnerSpec sc_ogd(double sigma) { return {Kind::kScOgd, sigma}; }
};

std::unique_ptr<OnlineLearner> make_learner(const LearnerSpec& spec, const Domain& domain);

/// Runs the full stream under the given filter.
Trace run_with_filter(Environment& env, OnlineLearner& learner, const FilterSpec& filter,
                      const RoundObserver& observer = {});

}  // namespace roco
