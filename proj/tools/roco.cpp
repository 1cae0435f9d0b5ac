// roco: run experiments, verify canned experiments, emit plot data.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "roco/experiments.hpp"
#include "roco/parallel.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

int cmd_run(const std::string& config_path, const std::string& seeds, unsigned workers, bool trace,
            const std::string& out_flag) {
  roco::ExperimentConfig cfg;
  try {
    cfg = roco::load_config(config_path);
    if (!seeds.empty()) cfg.seeds = roco::parse_seed_list(seeds);
  } catch (const roco::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kExitUsage;
  }
  const std::filesystem::path dir = std::filesystem::path(out_flag.empty() ? cfg.out_dir : out_flag);
  std::filesystem::create_directories(dir);
  std::ofstream summary(dir / "summary.csv", std::ios::binary);
  std::ofstream trace_file;
  if (trace) trace_file.open(dir / "trace.csv", std::ios::binary);
  if (!summary || (trace && !trace_file)) {
    std::cerr << "cannot write to " << dir << "\n";
    return kExitUsage;
  }
  const roco::ExperimentResult res = roco::run_experiment(cfg, workers, &summary, trace ? &trace_file : nullptr);
  std::cout << cfg.name << ": " << res.rows.size() << " seeds -> " << (dir / "summary.csv").string() << "\n";
  for (const roco::AggregateCheck& a : res.aggregates) {
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.check << ": " << a.detail << "\n";
  }
  if (!res.failures.empty()) {
    const roco::CheckFailure& f = res.failures.front();
    std::cout << "FAIL " << f.check << " at seed " << f.seed << ": lhs " << roco::format_double(f.lhs) << " > rhs "
              << roco::format_double(f.rhs) << " (" << res.failures.size() << " violations)\n";
  } else {
    for (const std::string& c : cfg.checks) {
      if (c == "topk-bound" || c == "topk-convex" || c == "topk-strongly-convex") std::cout << "PASS " << c << ": every seed\n";
    }
  }
  return res.ok() ? 0 : kExitCheckFailed;
}

int cmd_verify(const std::string& name, unsigned workers) {
  std::vector<roco::CriterionResult> results;
  try {
    results = roco::run_verification(name, workers);
  } catch (const roco::ConfigError& e) {
    std::cerr << e.what() << "; known:";
    for (std::string_view n : roco::kVerifyNames) std::cerr << " " << n;
    std::cerr << "\n";
    return kExitUsage;
  }
  bool ok = true;
  for (const roco::CriterionResult& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitCheckFailed;
}

int cmd_plotdata(const std::string& kind, const std::vector<std::string>& inputs, const std::string& out_path) {
  try {
    std::vector<roco::CsvTable> tables;
    for (const std::string& in : inputs) tables.push_back(roco::read_csv_file(in));
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw roco::ConfigError("cannot write " + out_path);
    roco::plotdata(kind, tables, out);
  } catch (const roco::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust online convex optimization experiments"};
  app.require_subcommand(1);
  unsigned workers = roco::default_workers();

  auto* run = app.add_subcommand("run", "Run a config over its seeds and write summary CSV");
  std::string config, seeds, out;
  bool trace = false;
  run->add_option("--config", config, "Experiment config file")->required();
  run->add_option("--seeds", seeds, "Seed list overriding the config, e.g. 1..100");
  run->add_option("--workers", workers, "Worker threads (default: ROCO_WORKERS or core count)");
  run->add_flag("--trace", trace, "Also write the per-round trace.csv");
  run->add_option("--out", out, "Output directory (default: the config's out)");

  auto* verify = app.add_subcommand("verify", "Run a canned experiment and print PASS/FAIL");
  std::string name;
  verify->add_option("name", name, "Experiment name")->required();
  verify->add_option("--workers", workers, "Worker threads");

  auto* plot = app.add_subcommand("plotdata", "Aggregate summary or trace CSVs into x,y,y_stderr");
  std::string kind, plot_out;
  std::vector<std::string> inputs;
  plot->add_option("kind", kind, "regret-vs-T | regret-vs-k | excess-risk-vs-T | pass-rate-vs-t")->required();
  plot->add_option("inputs", inputs, "Summary (or trace) CSV files")->required();
  plot->add_option("--out", plot_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (workers == 0) workers = 1;
  try {
    if (*run) return cmd_run(config, seeds, workers, trace, out);
    if (*verify) return cmd_verify(name, workers);
    if (*plot) return cmd_plotdata(kind, inputs, plot_out);
  } catch (const roco::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
