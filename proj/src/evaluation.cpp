#include "roco/evaluation.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numeric>

#include "roco/quantile_filter.hpp"

namespace roco {

namespace {

constexpr double kGoldenTol = 1e-8;
constexpr std::size_t kGridPoints = 201;

double summed_value(std::span<const LossEvent* const> events, ConstVec w) {
  CompensatedSum s;
  for (const LossEvent* e : events) s.add(e->value(w));
  return s.value();
}

Vector minimize_linear(std::span<const LossEvent* const> events, const Domain& domain) {
  const std::size_t d = domain.dimension();
  std::vector<CompensatedSum> sums(d);
  for (const LossEvent* e : events) {
    const Vector& g = std::get<LinearLoss>(e->variant()).g;
    for (std::size_t i = 0; i < d; ++i) sums[i].add(g[i]);
  }
  Vector s(d);
  for (std::size_t i = 0; i < d; ++i) s[i] = sums[i].value();
  Vector u = domain.center();
  if (domain.kind() == Domain::Kind::kBall) {
    const double n = norm2(s);
    if (n == 0.0) return u;
    for (std::size_t i = 0; i < d; ++i) u[i] -= domain.radius() * s[i] / n;
    return u;
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (s[i] > 0.0) u[i] = domain.lower()[i];
    if (s[i] < 0.0) u[i] = domain.upper()[i];
  }
  return u;
}

Vector minimize_1d(std::span<const LossEvent* const> events, const Domain& domain) {
  double lo = 0.0, hi = 0.0;
  if (domain.kind() == Domain::Kind::kBall) {
    lo = domain.lower()[0] - domain.radius();
    hi = domain.lower()[0] + domain.radius();
  } else {
    lo = domain.lower()[0];
    hi = domain.upper()[0];
  }
  auto f = [&](double w) { return summed_value(events, std::span<const double>(&w, 1)); };
  const double step = (hi - lo) / static_cast<double>(kGridPoints - 1);
  std::size_t best = 0;
  double best_val = f(lo);
  for (std::size_t i = 1; i < kGridPoints; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = std::min(hi, lo + step * static_cast<double>(best + 1));
  // Golden-section refinement of the bracketing cell pair.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double u = 0.5 * (a + b);
  // Keep the grid point if refinement did not improve on it (flat objectives).
  const double grid_u = lo + step * static_cast<double>(best);
  if (f(grid_u) < f(u)) u = grid_u;
  return {u};
}

Vector minimize_subgradient(std::span<const LossEvent* const> events, const Domain& domain) {
  const std::size_t d = domain.dimension();
  const std::size_t iters = std::min<std::size_t>(10 * events.size(), 20000);
  Vector w = domain.center();
  Vector avg(d, 0.0);
  double sum_sq = 0.0;
  for (std::size_t j = 1; j <= iters; ++j) {
    Vector g(d, 0.0);
    for (const LossEvent* e : events) {
      const Vector gi = e->subgradient(w);
      for (std::size_t i = 0; i < d; ++i) g[i] += gi[i];
    }
    const double g2 = squared_norm2(g);
    for (std::size_t i = 0; i < d; ++i) avg[i] += (w[i] - avg[i]) / static_cast<double>(j);
    if (g2 == 0.0) break;
    sum_sq += g2;
    const double eta = domain.diameter() / std::sqrt(2.0 * sum_sq);
    for (std::size_t i = 0; i < d; ++i) w[i] -= eta * g[i];
    domain.project_inplace(w);
  }
  domain.project_inplace(avg);
  // Return whichever of the last iterate and the average is better.
  return summed_value(events, w) < summed_value(events, avg) ? w : avg;
}

std::vector<const LossEvent*> events_in(const Trace& trace, const RoundMask& inliers) {
  std::vector<const LossEvent*> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (inliers[i]) out.push_back(&trace[i].event);
  }
  return out;
}

void require_mask(const Trace& trace, const RoundMask& inliers) {
  if (inliers.size() != trace.size()) throw ContractViolation("round mask size does not match the trace");
}

std::size_t excluded_count(const RoundMask& inliers) {
  return static_cast<std::size_t>(std::count(inliers.begin(), inliers.end(), false));
}

}  // namespace

// ---------------------------------------------------------------------------

Vector minimize_summed_loss(std::span<const LossEvent* const> events, const Domain& domain) {
  if (events.empty()) return domain.center();
  const bool linear = std::all_of(events.begin(), events.end(),
                                  [](const LossEvent* e) { return e->kind() == LossKind::kLinear; });
  if (linear) return minimize_linear(events, domain);
  if (domain.dimension() == 1) return minimize_1d(events, domain);
  return minimize_subgradient(events, domain);
}

Vector best_comparator(const Trace& trace, const RoundMask& inliers, const Domain& domain) {
  require_mask(trace, inliers);
  const auto events = events_in(trace, inliers);
  return minimize_summed_loss(events, domain);
}

RoundMask all_rounds(const Trace& trace) { return RoundMask(trace.size(), true); }

RoundMask drop_largest(const Trace& trace, std::size_t k) {
  std::vector<std::size_t> order(trace.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trace[a].grad_norm > trace[b].grad_norm; });
  RoundMask mask(trace.size(), true);
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) mask[order[i]] = false;
  return mask;
}

RoundMask statistic_at_most(const Trace& trace, double threshold) {
  RoundMask mask(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) mask[i] = trace[i].statistic <= threshold;
  return mask;
}

RegretPair robust_regret(const Trace& trace, const RoundMask& inliers, ConstVec u) {
  require_mask(trace, inliers);
  CompensatedSum reg, lin;
  Vector diff(u.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!inliers[i]) continue;
    const RoundRecord& r = trace[i];
    reg.add(r.loss_value - r.event.value(u));
    for (std::size_t j = 0; j < u.size(); ++j) diff[j] = r.w[j] - u[j];
    lin.add(dot(diff, r.grad));
  }
  return {reg.value(), lin.value()};
}

double max_inlier_norm(const Trace& trace, const RoundMask& inliers) {
  require_mask(trace, inliers);
  double g = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (inliers[i]) g = std::max(g, trace[i].grad_norm);
  }
  return g;
}

double comparator_spread(const Trace& trace, ConstVec u, double inlier_norm) {
  double d = 0.0;
  for (const RoundRecord& r : trace) {
    if (r.grad_norm <= 2.0 * inlier_norm) d = std::max(d, distance2(r.w, u));
  }
  return d;
}

RegretLedger make_ledger(const Trace& trace, RoundMask inliers, Vector u) {
  RegretLedger l;
  const RegretPair rp = robust_regret(trace, inliers, u);
  l.robust_regret = rp.regret;
  l.linearized_robust_regret = rp.linearized;
  l.g_s = max_inlier_norm(trace, inliers);
  l.d_us = comparator_spread(trace, u, l.g_s);
  l.inliers = std::move(inliers);
  l.u = std::move(u);
  return l;
}

RegretLedger make_ledger(const Trace& trace, RoundMask inliers, const Domain& domain) {
  Vector u = best_comparator(trace, inliers, domain);
  return make_ledger(trace, std::move(inliers), std::move(u));
}

// ---------------------------------------------------------------------------

PassedBoundFn certified_adaptive_ogd_bound(double diameter) {
  return [diameter](const Trace& trace, double) {
    CompensatedSum s;
    for (const RoundRecord& r : trace) {
      if (r.decision == Decision::kPassed) s.add(r.grad_norm * r.grad_norm);
    }
    return 2.0 * diameter * std::sqrt(s.value());
  };
}

PassedBoundFn worst_case_bound(const OnlineLearner& learner) {
  std::shared_ptr<const OnlineLearner> l = learner.clone();
  return [l](const Trace& trace, double grad_bound) {
    const auto passed = std::count_if(trace.begin(), trace.end(),
                                      [](const RoundRecord& r) { return r.decision == Decision::kPassed; });
    return l->regret_bound(grad_bound, static_cast<double>(passed));
  };
}

bool within_bound(double lhs, double rhs) { return lhs <= rhs + kBoundRelTol * std::max(1.0, std::abs(rhs)); }

BoundReport check_thm31_bound(const Trace& trace, std::size_t k, const RoundMask& inliers, ConstVec u,
                              const PassedBoundFn& learner_bound) {
  require_mask(trace, inliers);
  if (excluded_count(inliers) > k) throw ContractViolation("check_thm31_bound: more than k rounds excluded");
  BoundReport rep;
  rep.g_s = max_inlier_norm(trace, inliers);
  rep.d_us = comparator_spread(trace, u, rep.g_s);
  rep.lhs = robust_regret(trace, inliers, u).linearized;
  rep.learner_term = learner_bound(trace, 2.0 * rep.g_s);
  rep.overhead_term = 4.0 * rep.d_us * rep.g_s * static_cast<double>(k + 1);
  rep.rhs = rep.learner_term + rep.overhead_term;
  rep.holds = within_bound(rep.lhs, rep.rhs);
  return rep;
}

BoundReport check_thm31_bound(const Trace& trace, std::size_t k, const Domain& domain,
                              const PassedBoundFn& learner_bound) {
  const RoundMask s = drop_largest(trace, k);
  const Vector u = best_comparator(trace, s, domain);
  return check_thm31_bound(trace, k, s, u, learner_bound);
}

BoundReport check_general_convex_bound(const Trace& trace, std::size_t k, const RoundMask& inliers, ConstVec u,
                                       double diameter) {
  require_mask(trace, inliers);
  if (excluded_count(inliers) > k) throw ContractViolation("check_general_convex_bound: more than k rounds excluded");
  BoundReport rep;
  rep.g_s = max_inlier_norm(trace, inliers);
  rep.d_us = diameter;
  CompensatedSum sq;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (inliers[i]) sq.add(trace[i].grad_norm * trace[i].grad_norm);
  }
  const double kd = static_cast<double>(k);
  rep.lhs = robust_regret(trace, inliers, u).regret;
  rep.learner_term = 2.0 * diameter * std::sqrt(sq.value());
  rep.overhead_term = 2.0 * diameter * rep.g_s * (2.0 * kd + std::sqrt(kd) + 2.0);
  rep.rhs = rep.learner_term + rep.overhead_term;
  rep.holds = within_bound(rep.lhs, rep.rhs);
  return rep;
}

BoundReport check_strongly_convex_bound(const Trace& trace, std::size_t k, const RoundMask& inliers, ConstVec u,
                                        double sigma) {
  require_mask(trace, inliers);
  if (excluded_count(inliers) > k) {
    throw ContractViolation("check_strongly_convex_bound: more than k rounds excluded");
  }
  BoundReport rep;
  rep.g_s = max_inlier_norm(trace, inliers);
  double grad_at_u = 0.0;
  for (const RoundRecord& r : trace) {
    if (r.grad_norm <= 2.0 * rep.g_s) grad_at_u = std::max(grad_at_u, norm2(r.event.subgradient(u)));
  }
  const double g_tilde = 2.0 * rep.g_s + grad_at_u;
  const double T = static_cast<double>(trace.size());
  rep.d_us = comparator_spread(trace, u, rep.g_s);
  rep.lhs = robust_regret(trace, inliers, u).regret;
  rep.learner_term = T >= 1.0 ? 2.0 * rep.g_s * rep.g_s / sigma * (std::log(T) + 1.0) : 0.0;
  rep.overhead_term = 5.0 * g_tilde * g_tilde / (2.0 * sigma) * static_cast<double>(k + 1);
  rep.rhs = rep.learner_term + rep.overhead_term;
  rep.holds = within_bound(rep.lhs, rep.rhs);
  return rep;
}

double sc_ogd_passed_bound(const Trace& trace, ConstVec u, double sigma) {
  CompensatedSum s;
  std::size_t n = 0;
  for (const RoundRecord& r : trace) {
    if (r.decision != Decision::kPassed) continue;
    ++n;
    const double dist = distance2(r.w, u);
    s.add(r.grad_norm * r.grad_norm / (2.0 * sigma * static_cast<double>(n)));
    s.add(0.5 * sigma * dist * dist);
  }
  return s.value();
}

double passed_linearized_regret(const Trace& trace, ConstVec u) {
  RoundMask passed(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) passed[i] = trace[i].decision == Decision::kPassed;
  return robust_regret(trace, passed, u).linearized;
}

// ---------------------------------------------------------------------------

McEstimate lower_bound_mc(const EnvFactory& make_env, const LearnerSpec& learner, const FilterSpec& filter,
                          std::size_t n_seeds, unsigned workers, std::uint64_t first_seed) {
  if (n_seeds < 1) throw ConfigError("lower_bound_mc: need at least one seed");
  const std::vector<double> values = parallel_map(n_seeds, workers, [&](std::size_t i) {
    auto env = make_env(first_seed + i);
    if (!env->has_adversarial_choice()) throw ContractViolation("lower_bound_mc: environment has no adversary");
    auto alg = make_learner(learner, env->domain());
    const Trace trace = run_with_filter(*env, *alg, filter);
    const AdversarialChoice choice = env->adversarial_choice();
    return robust_regret(trace, choice.inliers, choice.u).regret;
  });
  return summarize(values);
}

// ---------------------------------------------------------------------------

Vector linear_comparator(ConstVec mean_gradient, const Domain& domain) {
  const LossEvent e(LinearLoss{Vector(mean_gradient.begin(), mean_gradient.end())});
  const LossEvent* ptr = &e;
  return minimize_summed_loss(std::span<const LossEvent* const>(&ptr, 1), domain);
}

QuantileRegret quantile_robust_regret(const Trace& trace, double quantile_value, const Domain& domain,
                                      const Vector* fixed_comparator) {
  QuantileRegret out;
  const RoundMask s = statistic_at_most(trace, quantile_value);
  out.inlier_count = static_cast<std::size_t>(std::count(s.begin(), s.end(), true));
  const Vector u = best_comparator(trace, s, domain);
  out.robust_regret = robust_regret(trace, s, u).regret;
  if (fixed_comparator) out.pseudo_regret = robust_regret(trace, s, *fixed_comparator).regret;
  return out;
}

Thm41Report check_thm41(std::span<const double> per_seed_regret, double p, std::size_t horizon, double diameter,
                        double quantile_value, const RegretBoundFn& base_bound) {
  Thm41Report rep;
  rep.regret = summarize(per_seed_regret);
  rep.bound = theorem41_bound(base_bound, diameter, quantile_value, p, horizon);
  rep.ratio = rep.bound > 0.0 ? rep.regret.mean / rep.bound : 0.0;
  rep.holds = rep.regret.mean <= rep.bound + 4.0 * rep.regret.std_error;
  return rep;
}

double feature_mode_increment_ratio(const Trace& trace, ConstVec u, double feature_quantile, double diameter,
                                    double lipschitz) {
  double worst = 0.0;
  const double scale = diameter * feature_quantile * lipschitz;
  for (const RoundRecord& r : trace) {
    if (r.decision != Decision::kPassed || r.statistic > feature_quantile) continue;
    worst = std::max(worst, std::abs(r.loss_value - r.event.value(u)) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------

MonteCarloRiskModel::MonteCarloRiskModel(const LossDistribution& dist, const Domain& domain, std::size_t n_samples,
                                         std::uint64_t seed) {
  if (n_samples == 0) throw ConfigError("risk model: need at least one sample");
  Rng rng(seed, Stream::kReference);
  sample_.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) sample_.push_back(dist.sample(rng));
  std::vector<const LossEvent*> ptrs;
  ptrs.reserve(sample_.size());
  for (const LossEvent& e : sample_) ptrs.push_back(&e);
  minimizer_ = minimize_summed_loss(ptrs, domain);
  loss_at_min_.reserve(sample_.size());
  for (const LossEvent& e : sample_) loss_at_min_.push_back(e.value(minimizer_));
}

double MonteCarloRiskModel::excess_risk(ConstVec w) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < sample_.size(); ++i) s.add(sample_[i].value(w) - loss_at_min_[i]);
  return s.value() / static_cast<double>(sample_.size());
}

double MonteCarloRiskModel::excess_stderr(ConstVec w) const {
  const double n = static_cast<double>(sample_.size());
  if (sample_.size() < 2) return 0.0;
  const double mean = excess_risk(w);
  CompensatedSum ss;
  for (std::size_t i = 0; i < sample_.size(); ++i) {
    const double d = sample_[i].value(w) - loss_at_min_[i] - mean;
    ss.add(d * d);
  }
  return std::sqrt(ss.value() / (n - 1.0) / n);
}

HeavyTailRiskModel::HeavyTailRiskModel(double gamma, double flip) : gamma_(gamma), flip_(flip) {
  if (!(gamma > 0.0)) throw ConfigError("heavy-tail risk: gamma must be positive");
  const auto [w, val] = boost::math::tools::brent_find_minima([this](double x) { return risk(x); }, -1.0, 1.0, 52);
  (void)val;
  minimizer_ = {w};
}

// With x = s^-m, m = 2/gamma, the density (1+gamma) x^-(2+gamma) dx becomes
// (1+gamma) m s^{m(1+gamma)-1} ds on (0, 1], and the integrand is bounded.
double HeavyTailRiskModel::integrate(double w, double u) const {
  const double m = 2.0 / gamma_;
  const double expo = m * (1.0 + gamma_) - 1.0;
  const bool diff = !std::isnan(u);
  auto loss = [this](double x, double v) {
    return (1.0 - flip_) * softplus(-x * v) + flip_ * softplus(x * v);
  };
  auto f = [&](double s) {
    if (s <= 1e-30) return 0.0;
    const double x = std::pow(s, -m);
    if (!std::isfinite(x)) return 0.0;
    const double h = diff ? loss(x, w) - loss(x, u) : loss(x, w);
    return (1.0 + gamma_) * m * std::pow(s, expo) * h;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-13);
}

double HeavyTailRiskModel::risk(double w) const { return integrate(w, std::nan("")); }

double HeavyTailRiskModel::excess_risk(ConstVec w) const { return integrate(w[0], minimizer_[0]); }

BatchResult online_to_batch(const Trace& trace, const RiskModel& model) {
  BatchResult out;
  if (trace.empty()) throw ContractViolation("online_to_batch: empty trace");
  const std::size_t d = trace.front().w.size();
  std::vector<CompensatedSum> sums(d);
  for (const RoundRecord& r : trace) {
    for (std::size_t i = 0; i < d; ++i) sums[i].add(r.w[i]);
  }
  out.iterate_average.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.iterate_average[i] = sums[i].value() / static_cast<double>(trace.size());
  out.excess_risk_estimate = model.excess_risk(out.iterate_average);
  out.excess_stderr = model.excess_stderr(out.iterate_average);
  out.risk_mc_samples = model.samples();
  return out;
}

double huber_excess_risk_bound(double diameter, double grad_bound, double epsilon, double delta,
                               std::size_t horizon) {
  const double dg = diameter * grad_bound;
  const double l = std::log(2.0 / delta);
  const double T = static_cast<double>(horizon);
  return 12.0 * dg * epsilon + 2.0 * dg * (5.0 * std::sqrt(2.0 * l) + 2.0) / std::sqrt(T) +
         2.0 * dg * (l + 10.0) / T;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("loglog_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace roco
