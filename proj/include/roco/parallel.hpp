#pragma once

// Seed-parallel map with deterministic, seed-ordered results.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace roco {

/// Worker count from ROCO_WORKERS, else hardware concurrency (>= 1).
unsigned default_workers();

/// Calls f(i) for i in [0, n) on up to `workers` threads. Threads pull the next
/// index from a shared counter; results land at their index, so the output
/// does not depend on scheduling. The first exception is rethrown.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(body);
  pool.clear();
  if (error) std::rethrow_exception(error);
  return out;
}

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean with its standard error.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

McEstimate summarize(std::span<const double> values);

}  // namespace roco
