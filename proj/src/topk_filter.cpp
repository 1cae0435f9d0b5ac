#include "roco/topk_filter.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "roco/environments.hpp"
#include "run_loop.hpp"

namespace roco {

GradientList::GradientList(std::size_t k) : k_(k), heap_(k + 1, 0.0) {}

bool GradientList::offer(double norm) {
  if (!(norm > heap_.front())) return false;
  std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
  heap_.back() = norm;
  std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
  return true;
}

std::vector<double> GradientList::sorted_values() const {
  std::vector<double> v = heap_;
  std::sort(v.begin(), v.end());
  return v;
}

TopKStep TopKFilter::step(double grad_norm) {
  if (grad_norm < 0.0) throw ContractViolation("top-k filter: negative norm");
  const bool inserted = list_.offer(grad_norm);
  const double m = list_.min();
  const Decision d = grad_norm > 2.0 * m ? Decision::kFiltered : Decision::kPassed;
  return {d, inserted, m};
}

Trace run_topk(Environment& env, OnlineLearner& learner, std::size_t k, const RoundObserver& observer) {
  TopKFilter filter(k);
  return detail::run_filtered(
      env, learner, observer, [](const LossEvent&, double grad_norm) { return grad_norm; },
      [&](double stat) {
        const TopKStep s = filter.step(stat);
        return std::pair{s.decision, s.list_min};
      });
}

Trace run_unfiltered(Environment& env, OnlineLearner& learner, const RoundObserver& observer) {
  return detail::run_filtered(
      env, learner, observer, [](const LossEvent&, double grad_norm) { return grad_norm; },
      [](double) { return std::pair{Decision::kPassed, 0.0}; });
}

bool verify_pass_bound(const Trace& trace, std::size_t k) {
  // Independent bookkeeping: the k+1 largest norms so far in a sorted multiset.
  std::multiset<double> top;
  for (std::size_t i = 0; i <= k; ++i) top.insert(0.0);
  for (const RoundRecord& r : trace) {
    top.insert(r.grad_norm);
    top.erase(top.begin());
    if (r.decision == Decision::kPassed && r.grad_norm > 2.0 * *top.begin()) return false;
  }
  return true;
}

bool verify_filtered_mass(const Trace& trace, std::size_t k, double grad_bound) {
  double sum = 0.0;
  for (const RoundRecord& r : trace) {
    if (r.decision == Decision::kFiltered && r.grad_norm <= grad_bound) sum += r.grad_norm;
  }
  return sum <= 2.0 * static_cast<double>(k + 1) * grad_bound;
}

std::size_t max_dyadic_bucket_count(const Trace& trace) {
  double top = 0.0;
  for (const RoundRecord& r : trace) {
    if (r.decision == Decision::kFiltered) top = std::max(top, r.grad_norm);
  }
  if (top == 0.0) return 0;
  std::vector<std::size_t> counts;
  for (const RoundRecord& r : trace) {
    if (r.decision != Decision::kFiltered) continue;
    // Bucket i holds norms in (top / 2^{i+1}, top / 2^i]; halving is exact.
    std::size_t i = 0;
    double hi = top;
    while (r.grad_norm <= hi * 0.5) {
      hi *= 0.5;
      ++i;
    }
    if (counts.size() <= i) counts.resize(i + 1, 0);
    ++counts[i];
  }
  return *std::max_element(counts.begin(), counts.end());
}

}  // namespace roco
