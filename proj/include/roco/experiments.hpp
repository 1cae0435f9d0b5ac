#pragma once

// Experiment configs, the per-seed harness, CSV summaries and the canned
// verification experiments.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roco/core.hpp"
#include "roco/csv.hpp"
#include "roco/environments.hpp"
#include "roco/evaluation.hpp"
#include "roco/runner.hpp"

namespace roco {

/// Tagged union over the environment kinds; only the fields of `kind` are read.
struct EnvSpec {
  enum class Kind { kSpiked, kRademacher, kStronglyConvex, kHuber, kHeavyTail, kIid };
  Kind kind = Kind::kSpiked;

  // spiked-adversarial
  std::size_t dimension = 2;
  double drift = 0.5;
  double noise = 0.5;
  std::vector<std::size_t> spike_rounds;
  std::size_t spike_count = 0;
  double spike_min = 1e12;
  double spike_max = 1e12;
  double spike_multiplier = 1.0;

  // shared
  double half_width = 1.0;

  // rademacher-linear / strongly-convex-adversarial
  double grad_scale = 1.0;
  double sigma = 1.0;
  std::size_t construction_k = 0;

  // huber-mixture
  double epsilon = 0.05;
  std::string inlier = "uniform-linear";  // | bounded-logistic
  double inlier_low = 0.5, inlier_high = 1.0;
  double inlier_bound = 1.0, inlier_flip = 0.1;
  std::string outlier = "pareto-linear";  // | extreme-logistic
  double outlier_scale = 100.0, outlier_alpha = 1.5, outlier_positive_prob = 0.0, outlier_label = 1.0;

  // heavytail-logistic
  double gamma = 0.5;
  double flip = 0.1;

  // iid-gradient
  IidGradientEnv::NormLaw law = IidGradientEnv::NormLaw::kUniform;
  double scale = 1.0, alpha = 2.0, positive_prob = 0.6;
};

std::string_view to_string(EnvSpec::Kind k);

struct ExperimentConfig {
  std::string name = "experiment";
  EnvSpec env;
  LearnerSpec learner;
  FilterSpec filter;
  std::size_t horizon = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = ".";
  std::vector<std::string> checks;
  std::size_t risk_samples = 1000000;
  std::uint64_t risk_seed = 20240601;
  double huber_delta = 0.1;
};

/// Bound checks accepted in `checks`.
inline constexpr std::string_view kCheckNames[] = {"topk-bound", "topk-convex", "topk-strongly-convex", "quantile-bound", "huber-risk", "lower-bound"};

/// Text config: `key = value` lines, `[environment]`, `[learner]`, `[filter]`
/// tables, `#` comments. Throws ConfigError naming the line and field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Cross-field validation (also run by parse_config).
void validate(const ExperimentConfig& cfg);

/// "3", "1..100", "1,5,9" or a mix "1..3,10".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

std::unique_ptr<Environment> make_environment(const EnvSpec& spec, std::size_t horizon, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// One summary row. Unset optionals print as empty fields.
struct RunSummary {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::optional<double> k;
  std::optional<double> p;
  double robust_regret = 0.0;
  double linearized = 0.0;
  double bound_value = 0.0;
  bool bound_satisfied = false;
  std::size_t passed_count = 0;
  std::size_t filtered_count = 0;
  double g_s = 0.0;
  double final_threshold = 0.0;
  std::optional<double> excess_risk;
  std::optional<double> excess_bound;
};

/// Column names of the summary CSV, in order.
const std::vector<std::string>& summary_columns();
std::vector<std::string> summary_fields(const RunSummary& s);

struct CheckFailure {
  std::string check;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct SeedOutcome {
  RunSummary summary;
  std::vector<CheckFailure> failures;  // per-seed checks only
  Trace trace;                         // kept only on request
  std::optional<AdversarialChoice> choice;
};

/// Shared, seed-independent state (risk models).
class ExperimentContext {
 public:
  explicit ExperimentContext(const ExperimentConfig& cfg);
  const ExperimentConfig& config() const { return cfg_; }
  const RiskModel* risk_model() const { return risk_.get(); }

 private:
  ExperimentConfig cfg_;
  std::unique_ptr<RiskModel> risk_;
};

SeedOutcome run_seed(const ExperimentContext& ctx, std::uint64_t seed, bool keep_trace = false);

struct AggregateCheck {
  std::string check;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct ExperimentResult {
  std::vector<RunSummary> rows;  // in seed order
  std::vector<CheckFailure> failures;
  std::vector<AggregateCheck> aggregates;
  bool ok() const;
};

/// Runs every seed on `workers` threads. Rows and traces are consumed in seed
/// order, so outputs do not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers, std::ostream* summary_csv = nullptr,
                                std::ostream* trace_csv = nullptr);

void write_summary_header(std::ostream& out);
void write_trace_header(std::ostream& out, std::size_t dimension);
void write_trace_rows(std::ostream& out, std::uint64_t seed, const Trace& trace);

// ---------------------------------------------------------------------------

/// Plot-ready aggregation; writes `x,y,y_stderr`.
/// kinds: regret-vs-T, regret-vs-k, excess-risk-vs-T (summary inputs) and
/// pass-rate-vs-t (trace inputs). Missing columns throw ConfigError.
void plotdata(std::string_view kind, const std::vector<CsvTable>& inputs, std::ostream& out);

// ---------------------------------------------------------------------------

struct CriterionResult {
  int criterion = 0;  // 0 when not tied to a numbered criterion
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Names accepted by `verify`.
inline constexpr std::string_view kVerifyNames[] = {"topk-adversarial", "lower-bound-linear", "lower-bound-sc",
                                                    "huber-risk",       "quantile-iid",       "quantile-features",
                                                    "heavytail-o2b"};

/// Runs a canned experiment at the documented sizes. Throws ConfigError for
/// an unknown name.
std::vector<CriterionResult> run_verification(std::string_view name, unsigned workers);

}  // namespace roco
