#include "roco/parallel.hpp"

#include <cstdlib>
#include <string>

namespace roco {

unsigned default_workers() {
  if (const char* env = std::getenv("ROCO_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

McEstimate summarize(std::span<const double> values) {
  McEstimate e;
  e.n = values.size();
  if (values.empty()) return e;
  CompensatedSum s;
  for (double v : values) s.add(v);
  e.mean = s.value() / static_cast<double>(e.n);
  if (e.n < 2) return e;
  CompensatedSum ss;
  for (double v : values) ss.add((v - e.mean) * (v - e.mean));
  const double var = ss.value() / static_cast<double>(e.n - 1);
  e.std_error = std::sqrt(var / static_cast<double>(e.n));
  return e;
}

}  // namespace roco
