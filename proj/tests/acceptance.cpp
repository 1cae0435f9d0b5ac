// Acceptance suite: one PASS/FAIL line per criterion; exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "roco/environments.hpp"
#include "roco/evaluation.hpp"
#include "roco/experiments.hpp"
#include "roco/learners.hpp"
#include "roco/parallel.hpp"
#include "roco/quantile_filter.hpp"
#include "roco/rng.hpp"
#include "roco/topk_filter.hpp"
#include "test_envs.hpp"

using namespace roco;

namespace {

struct Property {
  std::string name;
  std::function<std::string()> run;  // empty string on success
};

std::string gradient_list_property() {
  Rng rng(901);
  for (int stream = 0; stream < 200; ++stream) {
    const std::size_t T = 1 + rng.below(1000);
    const std::size_t k = rng.below(std::min<std::size_t>(T + 2, 60));
    GradientList list(k);
    std::vector<double> seen(k + 1, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      const double x = rng.bernoulli(0.1) ? std::floor(rng.uniform(0, 4)) : rng.pareto(0.1, 0.8);
      list.offer(x);
      seen.push_back(x);
      std::vector<double> top = seen;
      std::nth_element(top.begin(), top.begin() + k, top.end(), std::greater<>());
      top.resize(k + 1);
      std::sort(top.begin(), top.end());
      if (list.sorted_values() != top) return "mismatch at stream " + std::to_string(stream);
    }
  }
  return {};
}

std::string quantile_property() {
  Rng rng(902);
  for (int stream = 0; stream < 20; ++stream) {
    QuantileState s(0.5, 1.0);
    std::vector<double> ref;
    const std::size_t T = 200 + rng.below(1800);
    for (std::size_t t = 0; t < T; ++t) {
      const double x = stream % 2 ? rng.uniform() : std::floor(rng.uniform(0, 20));
      s.observe(x);
      ref.push_back(x);
      if (t % 7 != 0) continue;
      std::vector<double> sorted = ref;
      std::sort(sorted.begin(), sorted.end());
      for (int qi = 1; qi <= 99; ++qi) {
        const double q = qi / 100.0;
        const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
        if (s.empirical_quantile(q) != sorted[std::max<std::size_t>(r, 1) - 1]) return "mismatch";
      }
    }
  }
  return {};
}

std::string finite_difference_property() {
  Rng rng(903);
  for (int i = 0; i < 4000; ++i) {
    const Vector x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vector w{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    LossEvent e;
    switch (i % 4) {
      case 0: e = LinearLoss{x}; break;
      case 1: e = SquaredLoss{x, rng.uniform(0.1, 3)}; break;
      case 2: e = LogisticLoss{x, rng.rademacher()}; break;
      default: e = HingeLoss{x, rng.rademacher()}; break;
    }
    if (i % 4 == 3 && std::abs(1.0 - std::get<HingeLoss>(e.variant()).y * dot(w, x)) < 1e-3) continue;
    const Vector g = e.subgradient(w);
    for (std::size_t j = 0; j < 2; ++j) {
      const double h = 1e-6;
      Vector a = w, b = w;
      a[j] += h;
      b[j] -= h;
      const double fd = (e.value(a) - e.value(b)) / (2 * h);
      if (std::abs(fd - g[j]) > 1e-5 * std::max(1.0, std::abs(g[j]))) return "case " + std::to_string(i);
    }
  }
  return {};
}

std::string distance_lemma_property() {
  Rng rng(904);
  for (int i = 0; i < 1000; ++i) {
    const double sigma = rng.uniform(0.05, 10.0);
    const LossEvent f(SquaredLoss{{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}, sigma});
    const Vector w{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vector u{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    if (distance2(w, u) > (norm2(f.subgradient(w)) + norm2(f.subgradient(u))) / sigma + 1e-9) {
      return "pair " + std::to_string(i);
    }
  }
  return {};
}

std::string dyadic_and_skip_property() {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    Rng rng(seed, Stream::kChoice);
    const std::size_t k = rng.below(10);
    std::vector<double> grads(1000);
    for (double& g : grads) {
      g = rng.uniform(-1.0, 1.0);
      if (rng.bernoulli(0.03)) g *= std::pow(10.0, rng.uniform(0.0, 12.0));
    }
    auto env = roco::testing::linear_stream(grads);
    std::unique_ptr<OnlineLearner> learner;
    if (seed % 2) {
      learner = std::make_unique<AdaptiveOgd>(env.domain());
    } else {
      learner = std::make_unique<StronglyConvexOgd>(env.domain(), 1.0);
    }
    std::vector<std::byte> prev = learner->state_bytes();
    bool frozen = true;
    const Trace tr = run_topk(env, *learner, k, [&](const RoundRecord& r, const OnlineLearner& l) {
      auto now = l.state_bytes();
      if (r.decision == Decision::kFiltered && now != prev) frozen = false;
      prev = std::move(now);
    });
    if (!frozen) return "state moved on a filtered round, seed " + std::to_string(seed);
    if (max_dyadic_bucket_count(tr) > k + 1) return "bucket over k+1, seed " + std::to_string(seed);
  }
  return {};
}

}  // namespace

int main() {
  const unsigned workers = default_workers();
  std::map<int, std::vector<CriterionResult>> by_criterion;
  const std::string_view order[] = {"topk-adversarial", "lower-bound-linear", "lower-bound-sc", "quantile-iid",
                                    "huber-risk",       "heavytail-o2b",      "quantile-features"};
  for (std::string_view name : order) {
    const auto start = std::chrono::steady_clock::now();
    for (CriterionResult& r : run_verification(name, workers)) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      r.detail += " [" + std::to_string(static_cast<int>(secs)) + " s]";
      by_criterion[r.criterion].push_back(std::move(r));
    }
  }

  const std::vector<Property> properties{
      {"gradient list vs brute-force top-(k+1)", gradient_list_property},
      {"empirical quantile vs sort oracle", quantile_property},
      {"subgradients vs finite differences", finite_difference_property},
      {"strong-convexity distance lemma", distance_lemma_property},
      {"dyadic bucket count and skip semantics", dyadic_and_skip_property},
  };
  CriterionResult nine{9, "property suites", true, ""};
  for (const Property& p : properties) {
    const std::string err = p.run();
    nine.detail += (nine.detail.empty() ? "" : "; ") + p.name + (err.empty() ? " ok" : " FAILED (" + err + ")");
    nine.passed = nine.passed && err.empty();
  }
  by_criterion[9].push_back(nine);

  bool all = true;
  for (int c = 1; c <= 9; ++c) {
    bool passed = !by_criterion[c].empty();
    std::string detail;
    for (const CriterionResult& r : by_criterion[c]) {
      passed = passed && r.passed;
      detail += (detail.empty() ? "" : " | ") + r.name + ": " + r.detail;
    }
    std::cout << (passed ? "PASS" : "FAIL") << " criterion " << c << ": " << detail << "\n";
    all = all && passed;
  }
  for (const CriterionResult& r : by_criterion[0]) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " supplementary " << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  return all ? 0 : 1;
}
