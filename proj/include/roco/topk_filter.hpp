#pragma once

// Top-k filtering for adversarial outliers.
//
// Keeps the k+1 largest gradient norms seen so far (initially k+1 zeros). A
// round's norm is inserted when it strictly exceeds the current minimum; the
// round is then filtered when the norm strictly exceeds twice the minimum of
// the updated list. At most k outliers means the list always holds an inlier,
// so min L_t <= G(S), and every passed gradient has norm <= 2 G(S).

#include <functional>
#include <vector>

#include "roco/core.hpp"

namespace roco {

class Environment;

/// Bounded min-heap holding exactly k+1 values.
class GradientList {
 public:
  explicit GradientList(std::size_t k);

  std::size_t k() const { return k_; }
  std::size_t size() const { return heap_.size(); }
  double min() const { return heap_.front(); }
  /// Replace the minimum by `norm` iff norm > min(). O(log k).
  bool offer(double norm);
  /// Current contents in ascending order.
  std::vector<double> sorted_values() const;

 private:
  std::size_t k_;
  std::vector<double> heap_;  // std::greater heap: front() is the minimum
};

struct TopKStep {
  Decision decision;
  bool inserted;
  double list_min;  // min L_t after insertion
};

class TopKFilter {
 public:
  explicit TopKFilter(std::size_t k) : list_(k) {}

  TopKStep step(double grad_norm);
  const GradientList& list() const { return list_; }

 private:
  GradientList list_;
};

/// Called after every round with the finished record and the learner.
using RoundObserver = std::function<void(const RoundRecord&, const OnlineLearner&)>;

/// Run environment + Top-k filter + learner to the end of the stream.
Trace run_topk(Environment& env, OnlineLearner& learner, std::size_t k, const RoundObserver& observer = {});

/// Run the learner on every round, with no filtering.
Trace run_unfiltered(Environment& env, OnlineLearner& learner, const RoundObserver& observer = {});

/// Every passed round satisfies norm <= 2 * ((k+1)-th largest norm so far,
/// zero padded). Recomputed from the trace alone.
bool verify_pass_bound(const Trace& trace, std::size_t k);

/// Sum of filtered norms that are <= G is at most 2 (k+1) G.
bool verify_filtered_mass(const Trace& trace, std::size_t k, double grad_bound);

/// Largest count of filtered rounds in any dyadic bucket (G/2^{i+1}, G/2^i],
/// G = largest filtered norm. Top-k filtering keeps this <= k+1.
std::size_t max_dyadic_bucket_count(const Trace& trace);

}  // namespace roco
