#include "roco/runner.hpp"

#include "roco/environments.hpp"
#include "roco/learners.hpp"

namespace roco {

std::string describe(const FilterSpec& f) {
  switch (f.kind) {
    case FilterSpec::Kind::kNone:
      return "none";
    case FilterSpec::Kind::kTopK:
      return "topk{k=" + std::to_string(f.k) + "}";
    case FilterSpec::Kind::kQuantile:
      return "quantile{p=" + std::to_string(f.p) + ", mode=" + std::string(to_string(f.mode)) + "}";
  }
  return "?";
}

std::unique_ptr<OnlineLearner> make_learner(const LearnerSpec& spec, const Domain& domain) {
  if (spec.kind == LearnerSpec::Kind::kScOgd) return std::make_unique<StronglyConvexOgd>(domain, spec.sigma);
  return std::make_unique<AdaptiveOgd>(domain);
}

Trace run_with_filter(Environment& env, OnlineLearner& learner, const FilterSpec& filter,
                      const RoundObserver& observer) {
  switch (filter.kind) {
    case FilterSpec::Kind::kTopK:
      return run_topk(env, learner, filter.k, observer);
    case FilterSpec::Kind::kQuantile:
      return run_quantile_filter(env, learner, filter.p, env.horizon(), filter.mode, observer);
    case FilterSpec::Kind::kNone:
      break;
  }
  return run_unfiltered(env, learner, observer);
}

}  // namespace roco
