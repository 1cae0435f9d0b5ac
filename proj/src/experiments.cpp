#include "roco/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "roco/learners.hpp"
#include "roco/parallel.hpp"

namespace roco {

namespace {

bool is_adversarial(EnvSpec::Kind k) { return k == EnvSpec::Kind::kRademacher || k == EnvSpec::Kind::kStronglyConvex; }

std::unique_ptr<LossDistribution> make_inlier(const EnvSpec& e) {
  if (e.inlier == "bounded-logistic") return std::make_unique<BoundedLogisticDistribution>(e.inlier_bound, e.inlier_flip);
  return std::make_unique<UniformLinearDistribution>(e.inlier_low, e.inlier_high);
}

std::unique_ptr<LossDistribution> make_outlier(const EnvSpec& e) {
  if (e.outlier == "extreme-logistic") {
    return std::make_unique<ExtremeLogisticDistribution>(e.outlier_scale, e.outlier_alpha, e.outlier_label);
  }
  return std::make_unique<ParetoLinearDistribution>(e.outlier_scale, e.outlier_alpha, e.outlier_positive_prob);
}

double inlier_grad_bound(const EnvSpec& e) {
  if (e.inlier == "bounded-logistic") return e.inlier_bound;
  return std::max(std::abs(e.inlier_low), std::abs(e.inlier_high));
}

/// Analytic p-quantile of the filtered statistic.
double analytic_quantile(const ExperimentConfig& cfg, const Environment& env) {
  if (const auto* iid = dynamic_cast<const IidGradientEnv*>(&env)) return iid->norm_quantile(cfg.filter.p);
  if (const auto* ht = dynamic_cast<const HeavyTailLogisticEnv*>(&env)) return ht->feature_quantile(cfg.filter.p);
  throw ContractViolation("no analytic quantile for " + std::string(env.name()));
}

std::size_t env_dimension(const ExperimentConfig& cfg) {
  return cfg.env.kind == EnvSpec::Kind::kSpiked ? cfg.env.dimension : 1;
}

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

std::unique_ptr<Environment> make_environment(const EnvSpec& e, std::size_t horizon, std::uint64_t seed) {
  switch (e.kind) {
    case EnvSpec::Kind::kSpiked: {
      SpikedAdversarialEnv::Params p;
      p.dimension = e.dimension;
      p.half_width = e.half_width;
      p.drift = e.drift;
      p.noise = e.noise;
      p.horizon = horizon;
      p.spike_rounds = e.spike_rounds;
      p.spike_count = e.spike_count;
      p.spike_min = e.spike_min;
      p.spike_max = e.spike_max;
      p.spike_multiplier = e.spike_multiplier;
      return std::make_unique<SpikedAdversarialEnv>(p, seed);
    }
    case EnvSpec::Kind::kRademacher:
      return std::make_unique<RademacherLinearEnv>(e.grad_scale, e.half_width, horizon, e.construction_k, seed);
    case EnvSpec::Kind::kStronglyConvex:
      return std::make_unique<StronglyConvexAdvEnv>(e.sigma, e.half_width, horizon, e.construction_k, seed);
    case EnvSpec::Kind::kHuber:
      return std::make_unique<HuberMixtureEnv>(e.epsilon, make_inlier(e), make_outlier(e),
                                               Domain::interval(-e.half_width, e.half_width), horizon, seed);
    case EnvSpec::Kind::kHeavyTail:
      return std::make_unique<HeavyTailLogisticEnv>(e.gamma, horizon, seed, e.flip);
    case EnvSpec::Kind::kIid:
      return std::make_unique<IidGradientEnv>(e.law, e.scale, e.alpha, e.positive_prob, e.half_width, horizon, seed);
  }
  throw ContractViolation("unknown environment kind");
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "seed",           "horizon",        "k",           "p",           "robust_regret",
      "linearized",     "bound_value",    "bound_satisfied", "passed_count", "filtered_count",
      "g_s",            "final_threshold", "excess_risk", "excess_bound"};
  return cols;
}

std::vector<std::string> summary_fields(const RunSummary& s) {
  return {std::to_string(s.seed),
          std::to_string(s.horizon),
          format_optional(s.k),
          format_optional(s.p),
          fmt(s.robust_regret),
          fmt(s.linearized),
          fmt(s.bound_value),
          s.bound_satisfied ? "true" : "false",
          std::to_string(s.passed_count),
          std::to_string(s.filtered_count),
          fmt(s.g_s),
          fmt(s.final_threshold),
          format_optional(s.excess_risk),
          format_optional(s.excess_bound)};
}

void write_summary_header(std::ostream& out) { CsvWriter(out).row(summary_columns()); }

void write_trace_header(std::ostream& out, std::size_t dimension) {
  std::vector<std::string> cols = {"seed", "t"};
  for (std::size_t i = 1; i <= dimension; ++i) cols.push_back("w_" + std::to_string(i));
  for (const char* c : {"grad_norm", "loss", "decision", "filter_stat", "statistic"}) cols.emplace_back(c);
  CsvWriter(out).row(cols);
}

void write_trace_rows(std::ostream& out, std::uint64_t seed, const Trace& trace) {
  CsvWriter w(out);
  std::vector<std::string> fields;
  for (const RoundRecord& r : trace) {
    fields.clear();
    fields.push_back(std::to_string(seed));
    fields.push_back(std::to_string(r.t));
    for (double x : r.w) fields.push_back(fmt(x));
    fields.push_back(fmt(r.grad_norm));
    fields.push_back(fmt(r.loss_value));
    fields.emplace_back(to_string(r.decision));
    fields.push_back(fmt(r.filter_stat));
    fields.push_back(fmt(r.statistic));
    w.row(fields);
  }
}

// ---------------------------------------------------------------------------

ExperimentContext::ExperimentContext(const ExperimentConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  if (cfg_.env.kind == EnvSpec::Kind::kHuber) {
    const auto inlier = make_inlier(cfg_.env);
    risk_ = std::make_unique<MonteCarloRiskModel>(*inlier, Domain::interval(-cfg_.env.half_width, cfg_.env.half_width),
                                                  cfg_.risk_samples, cfg_.risk_seed);
  } else if (cfg_.env.kind == EnvSpec::Kind::kHeavyTail) {
    risk_ = std::make_unique<HeavyTailRiskModel>(cfg_.env.gamma, cfg_.env.flip);
  }
}

SeedOutcome run_seed(const ExperimentContext& ctx, std::uint64_t seed, bool keep_trace) {
  const ExperimentConfig& cfg = ctx.config();
  auto env = make_environment(cfg.env, cfg.horizon, seed);
  auto learner = make_learner(cfg.learner, env->domain());
  const Domain domain = env->domain();
  const double diameter = domain.diameter();
  const bool sc = cfg.learner.kind == LearnerSpec::Kind::kScOgd;
  const double sigma = cfg.learner.sigma;

  SeedOutcome out;
  Trace trace = run_with_filter(*env, *learner, cfg.filter);
  RunSummary& s = out.summary;
  s.seed = seed;
  s.horizon = trace.size();
  if (cfg.filter.kind == FilterSpec::Kind::kTopK) s.k = static_cast<double>(cfg.filter.k);
  if (cfg.filter.kind == FilterSpec::Kind::kQuantile) s.p = cfg.filter.p;
  for (const RoundRecord& r : trace) (r.decision == Decision::kPassed ? s.passed_count : s.filtered_count)++;
  s.final_threshold = trace.empty() ? 0.0 : trace.back().filter_stat;

  RoundMask inliers;
  Vector u;
  double quantile_value = 0.0;
  if (is_adversarial(cfg.env.kind)) {
    AdversarialChoice c = env->adversarial_choice();
    inliers = c.inliers;
    u = c.u;
    out.choice = std::move(c);
  } else if (cfg.filter.kind == FilterSpec::Kind::kQuantile) {
    quantile_value = analytic_quantile(cfg, *env);
    inliers = statistic_at_most(trace, quantile_value);
    u = best_comparator(trace, inliers, domain);
  } else {
    inliers = drop_largest(trace, cfg.filter.kind == FilterSpec::Kind::kTopK ? cfg.filter.k : 0);
    u = best_comparator(trace, inliers, domain);
  }
  const RegretPair rp = robust_regret(trace, inliers, u);
  s.robust_regret = rp.regret;
  s.linearized = rp.linearized;
  s.g_s = max_inlier_norm(trace, inliers);

  const std::size_t k = cfg.filter.k;
  PassedBoundFn passed_bound = certified_adaptive_ogd_bound(diameter);
  if (sc) {
    passed_bound = [u, sigma](const Trace& tr, double) { return sc_ogd_passed_bound(tr, u, sigma); };
  }
  auto record = [&](const char* name, const BoundReport& rep) {
    if (!rep.holds) out.failures.push_back({name, seed, rep.lhs, rep.rhs});
  };

  switch (cfg.filter.kind) {
    case FilterSpec::Kind::kTopK: {
      const BoundReport rep = sc ? check_strongly_convex_bound(trace, k, inliers, u, sigma)
                                 : check_thm31_bound(trace, k, inliers, u, passed_bound);
      s.bound_value = rep.rhs;
      s.bound_satisfied = rep.holds;
      break;
    }
    case FilterSpec::Kind::kQuantile: {
      const OnlineLearner& l = *learner;
      s.bound_value = theorem41_bound([&l](double g, double n) { return l.regret_bound(g, n); }, diameter,
                                      quantile_value, cfg.filter.p, trace.size());
      s.bound_satisfied = s.robust_regret <= s.bound_value;
      break;
    }
    case FilterSpec::Kind::kNone: {
      const double lhs = sc ? rp.regret : rp.linearized;
      s.bound_value = sc ? learner->regret_bound(s.g_s, static_cast<double>(trace.size()))
                         : passed_bound(trace, 2.0 * s.g_s);
      s.bound_satisfied = within_bound(lhs, s.bound_value);
      break;
    }
  }

  for (const std::string& c : cfg.checks) {
    if (c == "topk-bound") record("topk-bound", check_thm31_bound(trace, k, inliers, u, passed_bound));
    if (c == "topk-convex") record("topk-convex", check_general_convex_bound(trace, k, inliers, u, diameter));
    if (c == "topk-strongly-convex") record("topk-strongly-convex", check_strongly_convex_bound(trace, k, inliers, u, sigma));
  }

  if (const RiskModel* model = ctx.risk_model(); model && !trace.empty()) {
    const BatchResult b = online_to_batch(trace, *model);
    s.excess_risk = b.excess_risk_estimate;
    if (cfg.env.kind == EnvSpec::Kind::kHuber) {
      s.excess_bound = huber_excess_risk_bound(diameter, inlier_grad_bound(cfg.env), cfg.env.epsilon,
                                               cfg.huber_delta, trace.size());
    }
  }
  if (keep_trace) out.trace = std::move(trace);
  return out;
}

bool ExperimentResult::ok() const {
  return failures.empty() &&
         std::all_of(aggregates.begin(), aggregates.end(), [](const AggregateCheck& a) { return a.passed; });
}

namespace {

std::vector<AggregateCheck> aggregate_checks(const ExperimentConfig& cfg, const std::vector<RunSummary>& rows) {
  std::vector<AggregateCheck> out;
  std::vector<double> regrets;
  for (const RunSummary& r : rows) regrets.push_back(r.robust_regret);
  for (const std::string& c : cfg.checks) {
    if (c == "quantile-bound") {
      const McEstimate m = summarize(regrets);
      const double bound = rows.empty() ? 0.0 : rows.front().bound_value;
      AggregateCheck a{c, m.mean <= bound + 4.0 * m.std_error, m.mean, bound + 4.0 * m.std_error, ""};
      a.detail = "mean robust regret " + fmt(m.mean) + " (se " + fmt(m.std_error) + ") vs bound " + fmt(bound);
      out.push_back(a);
    } else if (c == "huber-risk") {
      std::size_t hits = 0;
      for (const RunSummary& r : rows) hits += (r.excess_risk && r.excess_bound && *r.excess_risk <= *r.excess_bound);
      const double frac = rows.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(rows.size());
      AggregateCheck a{c, frac >= 0.9, frac, 0.9, ""};
      a.detail = "fraction of seeds with excess risk <= bound " + fmt(frac) + " (need >= 0.9)";
      out.push_back(a);
    } else if (c == "lower-bound") {
      const McEstimate m = summarize(regrets);
      const EnvSpec& e = cfg.env;
      const double k = static_cast<double>(e.construction_k);
      AggregateCheck a;
      a.check = c;
      a.lhs = m.mean;
      if (e.kind == EnvSpec::Kind::kRademacher) {
        const double target = e.grad_scale * e.half_width * k / 2.0;
        a.rhs = target;
        a.passed = std::abs(m.mean - target) <= 4.0 * m.std_error;
        a.detail = "MC mean " + fmt(m.mean) + " (se " + fmt(m.std_error) + ") vs GWk/2 = " + fmt(target);
      } else {
        const double target = e.sigma * e.half_width * e.half_width * k / 4.0;
        a.rhs = target - 4.0 * m.std_error;
        a.passed = m.mean >= a.rhs;
        a.detail = "MC mean " + fmt(m.mean) + " (se " + fmt(m.std_error) + ") vs sigma W^2 k/4 = " + fmt(target);
      }
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers, std::ostream* summary_csv,
                                std::ostream* trace_csv) {
  const ExperimentContext ctx(cfg);
  ExperimentResult res;
  if (summary_csv) write_summary_header(*summary_csv);
  if (trace_csv) write_trace_header(*trace_csv, env_dimension(cfg));
  const std::size_t chunk = std::max<std::size_t>(1, workers) * (trace_csv ? 2 : 64);
  for (std::size_t begin = 0; begin < cfg.seeds.size(); begin += chunk) {
    const std::size_t n = std::min(chunk, cfg.seeds.size() - begin);
    std::vector<SeedOutcome> outcomes =
        parallel_map(n, workers, [&](std::size_t i) { return run_seed(ctx, cfg.seeds[begin + i], trace_csv != nullptr); });
    for (SeedOutcome& o : outcomes) {
      if (summary_csv) CsvWriter(*summary_csv).row(summary_fields(o.summary));
      if (trace_csv) write_trace_rows(*trace_csv, o.summary.seed, o.trace);
      res.rows.push_back(o.summary);
      res.failures.insert(res.failures.end(), o.failures.begin(), o.failures.end());
    }
  }
  res.aggregates = aggregate_checks(cfg, res.rows);
  return res;
}

// ---------------------------------------------------------------------------

void plotdata(std::string_view kind, const std::vector<CsvTable>& inputs, std::ostream& out) {
  std::string x_col, y_col;
  bool pass_rate = false;
  if (kind == "regret-vs-T") {
    x_col = "horizon";
    y_col = "robust_regret";
  } else if (kind == "regret-vs-k") {
    x_col = "k";
    y_col = "robust_regret";
  } else if (kind == "excess-risk-vs-T") {
    x_col = "horizon";
    y_col = "excess_risk";
  } else if (kind == "pass-rate-vs-t") {
    x_col = "t";
    y_col = "decision";
    pass_rate = true;
  } else {
    throw ConfigError("plotdata: unknown kind '" + std::string(kind) + "'");
  }

  std::map<double, std::vector<double>> groups;
  for (const CsvTable& table : inputs) {
    if (table.header.empty()) continue;
    const auto xi = table.column(x_col), yi = table.column(y_col);
    if (!xi || !yi) {
      throw ConfigError("plotdata " + std::string(kind) + ": missing column '" + (xi ? y_col : x_col) + "'");
    }
    for (const auto& row : table.rows) {
      const std::string& xs = row[*xi];
      const std::string& ys = row[*yi];
      if (xs.empty() || ys.empty()) continue;
      double x = 0.0, y = 0.0;
      try {
        x = std::stod(xs);
        y = pass_rate ? (ys == "passed" ? 1.0 : 0.0) : std::stod(ys);
      } catch (const std::exception&) {
        throw ConfigError("plotdata: non-numeric value in '" + x_col + "' or '" + y_col + "'");
      }
      groups[x].push_back(y);
    }
  }
  if (groups.empty()) return;
  CsvWriter w(out);
  w.row({"x", "y", "y_stderr"});
  for (const auto& [x, ys] : groups) {
    const McEstimate m = summarize(ys);
    w.row({fmt(x), fmt(m.mean), fmt(m.std_error)});
  }
}

// ---------------------------------------------------------------------------
// Canned experiments

namespace {

ExperimentConfig spiked_config(std::size_t k, std::size_t spikes, double spike_min, double spike_max,
                               std::size_t n_seeds) {
  ExperimentConfig cfg;
  cfg.name = "topk-adversarial";
  cfg.env.kind = EnvSpec::Kind::kSpiked;
  cfg.env.spike_count = spikes;
  cfg.env.spike_min = spike_min;
  cfg.env.spike_max = spike_max;
  cfg.horizon = 10000;
  cfg.filter = FilterSpec::topk(k);
  cfg.seeds.clear();
  for (std::size_t s = 1; s <= n_seeds; ++s) cfg.seeds.push_back(s);
  return cfg;
}

std::vector<std::uint64_t> seed_range(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

std::vector<CriterionResult> verify_topk(unsigned workers) {
  std::vector<CriterionResult> out;
  const auto start = std::chrono::steady_clock::now();
  std::size_t runs = 0, violations = 0;
  double min_slack = INFINITY;
  std::string first_violation;
  for (std::size_t k : {1, 5, 20}) {
    ExperimentConfig cfg = spiked_config(k, k, 1e3, 1e12, 1000);
    cfg.checks = {"topk-bound", "topk-convex"};
    const ExperimentResult res = run_experiment(cfg, workers);
    runs += res.rows.size();
    for (const RunSummary& r : res.rows) min_slack = std::min(min_slack, r.bound_value - r.linearized);
    violations += res.failures.size();
    if (!res.failures.empty() && first_violation.empty()) {
      const CheckFailure& f = res.failures.front();
      first_violation = " first: " + f.check + " seed " + std::to_string(f.seed) + " lhs " + fmt(f.lhs) + " > rhs " +
                        fmt(f.rhs);
    }
  }
  const double secs = elapsed_seconds(start);
  out.push_back({1, "topk-adversarial",
                 violations == 0 && secs < 300.0,
                 "runs=" + std::to_string(runs) + " violations=" + std::to_string(violations) +
                     " min_slack=" + fmt(min_slack) + " elapsed_s=" + fmt(std::round(secs * 10) / 10) +
                     first_violation});

  // Spike magnitudes 1e6 against the same spikes scaled by another 1e6.
  ExperimentConfig base = spiked_config(1, 1, 1e6, 1e6, 100);
  ExperimentConfig scaled = base;
  scaled.env.spike_multiplier = 1e6;
  ExperimentConfig unfiltered = base;
  unfiltered.filter = FilterSpec::none();
  const ExperimentContext cb(base), cs(scaled), cu(unfiltered);
  struct Pair {
    bool identical;
    double filtered;
    double baseline;
  };
  const auto pairs = parallel_map(base.seeds.size(), workers, [&](std::size_t i) {
    const std::uint64_t seed = base.seeds[i];
    const SeedOutcome a = run_seed(cb, seed), b = run_seed(cs, seed);
    const SeedOutcome c = run_seed(cu, seed, true);
    const RoundMask s = drop_largest(c.trace, 1);
    const Vector u = best_comparator(c.trace, s, Domain::ball(Vector(base.env.dimension, 0.0), base.env.half_width));
    return Pair{a.summary.robust_regret == b.summary.robust_regret && a.summary.linearized == b.summary.linearized,
                a.summary.robust_regret, robust_regret(c.trace, s, u).regret};
  });
  bool identical = true;
  std::vector<double> filtered, baseline;
  for (const Pair& p : pairs) {
    identical = identical && p.identical;
    filtered.push_back(p.filtered);
    baseline.push_back(p.baseline);
  }
  const double mf = summarize(filtered).mean, mb = summarize(baseline).mean;
  const double ratio = mb / mf;
  out.push_back({2, "topk-adversarial/invariance", identical && ratio >= 10.0,
                 std::string("filtered regret identical under x1e6 spikes: ") + (identical ? "yes" : "no") +
                     "; unfiltered/filtered mean robust regret " + fmt(mb) + "/" + fmt(mf) + " = " + fmt(ratio) +
                     " (need >= 10)"});
  return out;
}

std::vector<CriterionResult> verify_lower_bound(bool linear, unsigned workers) {
  ExperimentConfig cfg;
  cfg.env.kind = linear ? EnvSpec::Kind::kRademacher : EnvSpec::Kind::kStronglyConvex;
  cfg.env.construction_k = 10;
  cfg.horizon = 100;
  cfg.filter = FilterSpec::topk(10);
  cfg.learner = linear ? LearnerSpec::adaptive_ogd() : LearnerSpec::sc_ogd(1.0);
  cfg.seeds = seed_range(10000);
  cfg.checks = {"lower-bound"};
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(cfg, workers);
  const double secs = elapsed_seconds(start);
  const AggregateCheck& a = res.aggregates.front();
  const bool ok = a.passed && (!linear || secs < 60.0);
  return {{linear ? 3 : 4, linear ? "lower-bound-linear" : "lower-bound-sc", ok,
           a.detail + " elapsed_s=" + fmt(std::round(secs * 10) / 10)}};
}

ExperimentConfig iid_config(std::size_t horizon, std::size_t n_seeds) {
  ExperimentConfig cfg;
  cfg.name = "quantile-iid";
  cfg.env.kind = EnvSpec::Kind::kIid;
  cfg.env.law = IidGradientEnv::NormLaw::kUniform;
  cfg.env.scale = 1.0;
  cfg.env.positive_prob = 0.6;
  cfg.horizon = horizon;
  cfg.filter = FilterSpec::quantile(0.9);
  cfg.seeds = seed_range(n_seeds);
  return cfg;
}

std::vector<CriterionResult> verify_quantile_iid(unsigned workers) {
  std::vector<CriterionResult> out;
  {
    const ExperimentConfig cfg = iid_config(10000, 1000);
    const ExperimentContext ctx(cfg);
    const double g_p = IidGradientEnv(cfg.env.law, 1.0, 2.0, 0.6, 1.0, 1, 0).norm_quantile(0.9);
    const auto exceeded = parallel_map(cfg.seeds.size(), workers, [&](std::size_t i) {
      auto env = make_environment(cfg.env, cfg.horizon, cfg.seeds[i]);
      auto learner = make_learner(cfg.learner, env->domain());
      QuantileState state(cfg.filter.p, 1.0 / (static_cast<double>(cfg.horizon) * static_cast<double>(cfg.horizon)));
      bool over = false;
      run_with_filter(*env, *learner, cfg.filter, [&](const RoundRecord& r, const OnlineLearner&) {
        over = over || r.filter_stat > g_p;
        state.observe(r.statistic);
      });
      return (over || state.lcb() > g_p) ? 1.0 : 0.0;
    });
    const double n = static_cast<double>(exceeded.size());
    const double frac = summarize(exceeded).mean;
    const double q = 2.0 / static_cast<double>(cfg.horizon);
    const double limit = q + 3.0 * std::sqrt(q * (1.0 - q) / n);
    out.push_back({5, "quantile-iid/concentration", frac <= limit,
                   "fraction of runs with LCB_t > G_p: " + fmt(frac) + " (limit " + fmt(limit) + ")"});
  }
  {
    ExperimentConfig cfg = iid_config(10000, 200);
    cfg.checks = {"quantile-bound"};
    const ExperimentResult r1 = run_experiment(cfg, workers);
    ExperimentConfig cfg4 = iid_config(40000, 200);
    const ExperimentResult r4 = run_experiment(cfg4, workers);
    std::vector<double> a, b;
    for (const RunSummary& r : r1.rows) a.push_back(r.robust_regret);
    for (const RunSummary& r : r4.rows) b.push_back(r.robust_regret);
    const double ratio = summarize(b).mean / summarize(a).mean;
    const AggregateCheck& c = r1.aggregates.front();
    out.push_back({6, "quantile-iid/regret-bound", c.passed && ratio < 2.5,
                   c.detail + "; mean regret ratio 4T/T = " + fmt(ratio) + " (need < 2.5)"});
  }
  return out;
}

std::vector<CriterionResult> verify_huber(unsigned workers) {
  ExperimentConfig cfg;
  cfg.name = "huber-risk";
  cfg.env.kind = EnvSpec::Kind::kHuber;
  cfg.env.epsilon = 0.05;
  cfg.horizon = 10000;
  cfg.huber_delta = 0.1;
  cfg.filter = FilterSpec::topk(huber_k_tuning(0.05, 10000, 0.1));
  cfg.seeds = seed_range(500);
  cfg.checks = {"huber-risk"};
  const ExperimentResult res = run_experiment(cfg, workers);
  std::vector<double> excess;
  for (const RunSummary& r : res.rows) excess.push_back(r.excess_risk.value_or(NAN));
  const AggregateCheck& a = res.aggregates.front();
  const std::size_t k_example = huber_k_tuning(0.1, 1000, 0.05);
  const double bound = res.rows.empty() ? 0.0 : res.rows.front().excess_bound.value_or(0.0);
  return {{7, "huber-risk", a.passed && k_example == 127,
           a.detail + "; k=" + std::to_string(cfg.filter.k) + " mean excess risk " + fmt(summarize(excess).mean) +
               " vs bound " + fmt(bound) + "; k-tuning(0.1, 1000, 0.05) = " + std::to_string(k_example)}};
}

ExperimentConfig heavytail_config(std::size_t horizon, std::size_t n_seeds) {
  ExperimentConfig cfg;
  cfg.name = "heavytail";
  cfg.env.kind = EnvSpec::Kind::kHeavyTail;
  cfg.env.gamma = 0.5;
  cfg.env.flip = 0.1;
  cfg.horizon = horizon;
  cfg.filter = FilterSpec::quantile(1.0 - 1.0 / std::sqrt(static_cast<double>(horizon)), FilterStatMode::kFeatureNorm);
  cfg.seeds = seed_range(n_seeds);
  return cfg;
}

std::vector<CriterionResult> verify_heavytail(unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> xs, ys;
  std::string detail = "mean excess risk:";
  for (std::size_t T : {1000, 10000, 100000}) {
    const ExperimentResult res = run_experiment(heavytail_config(T, 100), workers);
    std::vector<double> e;
    for (const RunSummary& r : res.rows) e.push_back(r.excess_risk.value_or(NAN));
    const McEstimate m = summarize(e);
    xs.push_back(static_cast<double>(T));
    ys.push_back(m.mean);
    detail += " T=" + std::to_string(T) + ":" + fmt(m.mean) + "(se " + fmt(m.std_error) + ")";
  }
  const double slope = loglog_slope(xs, ys);
  const double secs = elapsed_seconds(start);
  const bool ok = std::abs(slope + 1.0 / 6.0) <= 0.1 && secs < 1800.0;
  return {{8, "heavytail-o2b", ok,
           detail + "; log-log slope " + fmt(slope) + " (target -1/6 +- 0.1) elapsed_s=" +
               fmt(std::round(secs * 10) / 10)}};
}

std::vector<CriterionResult> verify_quantile_features(unsigned workers) {
  ExperimentConfig cfg = heavytail_config(10000, 50);
  cfg.checks = {"quantile-bound"};
  const ExperimentContext ctx(cfg);
  const auto ratios = parallel_map(cfg.seeds.size(), workers, [&](std::size_t i) {
    const SeedOutcome o = run_seed(ctx, cfg.seeds[i], true);
    const HeavyTailLogisticEnv env(cfg.env.gamma, cfg.horizon, 0, cfg.env.flip);
    const double x_p = env.feature_quantile(cfg.filter.p);
    const RoundMask s = statistic_at_most(o.trace, x_p);
    const Vector u = best_comparator(o.trace, s, env.domain());
    return feature_mode_increment_ratio(o.trace, u, x_p, env.domain().diameter(), 1.0);
  });
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  const ExperimentResult res = run_experiment(cfg, workers);
  const AggregateCheck& a = res.aggregates.front();
  return {{0, "quantile-features", worst <= 1.0 + 1e-9 && a.passed,
           "max |f_t(w_t) - f_t(u)| / (D X_p) over passed inlier rounds " + fmt(worst) + " (need <= 1); " +
               a.detail}};
}

}  // namespace

std::vector<CriterionResult> run_verification(std::string_view name, unsigned workers) {
  if (name == "topk-adversarial") return verify_topk(workers);
  if (name == "lower-bound-linear") return verify_lower_bound(true, workers);
  if (name == "lower-bound-sc") return verify_lower_bound(false, workers);
  if (name == "huber-risk") return verify_huber(workers);
  if (name == "quantile-iid") return verify_quantile_iid(workers);
  if (name == "quantile-features") return verify_quantile_features(workers);
  if (name == "heavytail-o2b") return verify_heavytail(workers);
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace roco
