#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "roco/experiments.hpp"

namespace roco {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry, std::less<>>;

[[noreturn]] void fail(std::size_t line, std::string_view field, const std::string& what) {
  std::string msg = line ? "line " + std::to_string(line) + ": " : std::string("config: ");
  msg += "field '" + std::string(field) + "': " + what;
  throw ConfigError(msg);
}

class Reader {
 public:
  Reader(Section& s, std::string prefix) : s_(s), prefix_(std::move(prefix)) {}

  const Entry* find(std::string_view key) {
    auto it = s_.find(key);
    if (it == s_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::string field(std::string_view key) const { return prefix_ + std::string(key); }

  void text(std::string_view key, std::string& out) {
    if (const Entry* e = find(key)) out = e->value;
  }

  void real(std::string_view key, double& out) {
    const Entry* e = find(key);
    if (!e) return;
    out = to_real(*e, key);
  }

  double to_real(const Entry& e, std::string_view key) const {
    double v = 0.0;
    const char* b = e.value.data();
    const auto r = std::from_chars(b, b + e.value.size(), v);
    if (r.ec != std::errc() || r.ptr != b + e.value.size() || !std::isfinite(v)) {
      fail(e.line, field(key), "expected a finite number, got '" + e.value + "'");
    }
    return v;
  }

  template <class Int>
  void integer(std::string_view key, Int& out) {
    const Entry* e = find(key);
    if (!e) return;
    out = to_integer<Int>(e->value, e->line, key);
  }

  template <class Int>
  Int to_integer(std::string_view v, std::size_t line, std::string_view key) const {
    v = trim(v);
    if (!v.empty() && v.front() == '-') fail(line, field(key), "must be a non-negative integer, got '" + std::string(v) + "'");
    Int x{};
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty()) {
      fail(line, field(key), "must be a non-negative integer, got '" + std::string(v) + "'");
    }
    return x;
  }

  void finish() {
    for (const auto& [k, e] : s_) {
      if (!e.used) fail(e.line, field(k), "unknown key");
    }
  }

 private:
  Section& s_;
  std::string prefix_;
};

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto piece = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

EnvSpec::Kind env_kind(const Entry& e) {
  static const std::pair<std::string_view, EnvSpec::Kind> kinds[] = {
      {"spiked-adversarial", EnvSpec::Kind::kSpiked},
      {"rademacher-linear", EnvSpec::Kind::kRademacher},
      {"strongly-convex-adversarial", EnvSpec::Kind::kStronglyConvex},
      {"huber-mixture", EnvSpec::Kind::kHuber},
      {"heavytail-logistic", EnvSpec::Kind::kHeavyTail},
      {"iid-gradient", EnvSpec::Kind::kIid},
  };
  for (const auto& [n, k] : kinds) {
    if (e.value == n) return k;
  }
  fail(e.line, "environment.kind", "unknown environment '" + e.value + "'");
}

void read_environment(Section& sec, EnvSpec& env) {
  Reader r(sec, "environment.");
  const Entry* kind = r.find("kind");
  if (!kind) fail(0, "environment.kind", "missing");
  env.kind = env_kind(*kind);
  r.real("half_width", env.half_width);
  switch (env.kind) {
    case EnvSpec::Kind::kSpiked: {
      r.integer("dimension", env.dimension);
      r.real("drift", env.drift);
      r.real("noise", env.noise);
      r.integer("spike_count", env.spike_count);
      if (const Entry* e = r.find("spike_rounds")) {
        for (const std::string& s : split_list(e->value)) {
          env.spike_rounds.push_back(r.to_integer<std::size_t>(s, e->line, "spike_rounds"));
        }
      }
      r.real("spike_min", env.spike_min);
      r.real("spike_max", env.spike_max);
      r.real("spike_multiplier", env.spike_multiplier);
      break;
    }
    case EnvSpec::Kind::kRademacher:
      r.real("grad_scale", env.grad_scale);
      r.integer("k", env.construction_k);
      break;
    case EnvSpec::Kind::kStronglyConvex:
      r.real("sigma", env.sigma);
      r.integer("k", env.construction_k);
      break;
    case EnvSpec::Kind::kHuber:
      r.real("epsilon", env.epsilon);
      r.text("inlier", env.inlier);
      r.real("inlier_low", env.inlier_low);
      r.real("inlier_high", env.inlier_high);
      r.real("inlier_bound", env.inlier_bound);
      r.real("inlier_flip", env.inlier_flip);
      r.text("outlier", env.outlier);
      r.real("outlier_scale", env.outlier_scale);
      r.real("outlier_alpha", env.outlier_alpha);
      r.real("outlier_positive_prob", env.outlier_positive_prob);
      r.real("outlier_label", env.outlier_label);
      if (env.inlier != "uniform-linear" && env.inlier != "bounded-logistic") {
        fail(sec.at("inlier").line, "environment.inlier", "expected uniform-linear or bounded-logistic");
      }
      if (env.outlier != "pareto-linear" && env.outlier != "extreme-logistic") {
        fail(sec.at("outlier").line, "environment.outlier", "expected pareto-linear or extreme-logistic");
      }
      break;
    case EnvSpec::Kind::kHeavyTail:
      r.real("gamma", env.gamma);
      r.real("flip", env.flip);
      break;
    case EnvSpec::Kind::kIid: {
      if (const Entry* e = r.find("law")) {
        if (e->value == "uniform") {
          env.law = IidGradientEnv::NormLaw::kUniform;
        } else if (e->value == "pareto") {
          env.law = IidGradientEnv::NormLaw::kPareto;
        } else {
          fail(e->line, "environment.law", "expected uniform or pareto");
        }
      }
      r.real("scale", env.scale);
      r.real("alpha", env.alpha);
      r.real("positive_prob", env.positive_prob);
      break;
    }
  }
  r.finish();
}

void read_learner(Section& sec, LearnerSpec& learner) {
  Reader r(sec, "learner.");
  if (const Entry* e = r.find("kind")) {
    if (e->value == "adaptive-ogd") {
      learner.kind = LearnerSpec::Kind::kAdaptiveOgd;
    } else if (e->value == "sc-ogd") {
      learner.kind = LearnerSpec::Kind::kScOgd;
    } else {
      fail(e->line, "learner.kind", "expected adaptive-ogd or sc-ogd");
    }
  }
  r.real("sigma", learner.sigma);
  r.finish();
}

struct FilterAuto {
  bool k_auto = false;
  bool p_auto = false;
  std::size_t line = 0;
};

FilterAuto read_filter(Section& sec, FilterSpec& filter, double& huber_delta) {
  Reader r(sec, "filter.");
  FilterAuto a;
  if (const Entry* e = r.find("kind")) {
    a.line = e->line;
    if (e->value == "none") {
      filter.kind = FilterSpec::Kind::kNone;
    } else if (e->value == "topk") {
      filter.kind = FilterSpec::Kind::kTopK;
    } else if (e->value == "quantile") {
      filter.kind = FilterSpec::Kind::kQuantile;
    } else {
      fail(e->line, "filter.kind", "expected none, topk or quantile");
    }
  }
  if (const Entry* e = r.find("k")) {
    if (e->value == "auto") {
      a.k_auto = true;
    } else {
      filter.k = r.to_integer<std::size_t>(e->value, e->line, "k");
    }
  }
  if (const Entry* e = r.find("p")) {
    if (e->value == "auto") {
      a.p_auto = true;
    } else {
      filter.p = r.to_real(*e, "p");
      if (!(filter.p > 0.0 && filter.p < 1.0)) fail(e->line, "filter.p", "must lie in (0, 1)");
    }
  }
  if (const Entry* e = r.find("mode")) {
    if (e->value == "gradient") {
      filter.mode = FilterStatMode::kGradientNorm;
    } else if (e->value == "feature") {
      filter.mode = FilterStatMode::kFeatureNorm;
    } else {
      fail(e->line, "filter.mode", "expected gradient or feature");
    }
  }
  r.real("delta", huber_delta);
  r.finish();
  return a;
}

void require(bool ok, std::string_view field, const std::string& what) {
  if (!ok) fail(0, field, what);
}

}  // namespace

std::string_view to_string(EnvSpec::Kind k) {
  switch (k) {
    case EnvSpec::Kind::kSpiked:
      return "spiked-adversarial";
    case EnvSpec::Kind::kRademacher:
      return "rademacher-linear";
    case EnvSpec::Kind::kStronglyConvex:
      return "strongly-convex-adversarial";
    case EnvSpec::Kind::kHuber:
      return "huber-mixture";
    case EnvSpec::Kind::kHeavyTail:
      return "heavytail-logistic";
    case EnvSpec::Kind::kIid:
      return "iid-gradient";
  }
  return "?";
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  auto number = [&](std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw ConfigError("seeds: expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
  };
  for (const std::string& piece : split_list(text)) {
    const auto dots = piece.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(piece));
      continue;
    }
    const std::uint64_t lo = number(std::string_view(piece).substr(0, dots));
    const std::uint64_t hi = number(std::string_view(piece).substr(dots + 2));
    if (hi < lo) throw ConfigError("seeds: empty range '" + piece + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("seeds: no seeds given");
  return out;
}

void validate(const ExperimentConfig& cfg) {
  const EnvSpec& env = cfg.env;
  const bool adversarial = env.kind == EnvSpec::Kind::kRademacher || env.kind == EnvSpec::Kind::kStronglyConvex;
  require(cfg.horizon >= 1, "horizon", "must be at least 1");
  require(!cfg.seeds.empty(), "seeds", "no seeds given");
  require(env.half_width > 0.0, "environment.half_width", "must be positive");
  if (env.kind == EnvSpec::Kind::kSpiked) {
    require(env.dimension >= 1, "environment.dimension", "must be at least 1");
    require(env.spike_min > 0.0 && env.spike_max >= env.spike_min, "environment.spike_min",
            "need 0 < spike_min <= spike_max");
    require(env.spike_multiplier > 0.0, "environment.spike_multiplier", "must be positive");
    require(env.spike_count <= cfg.horizon, "environment.spike_count", "exceeds the horizon");
  }
  if (env.kind == EnvSpec::Kind::kHuber) {
    require(env.epsilon >= 0.0 && env.epsilon <= 0.5, "environment.epsilon", "must lie in [0, 1/2]");
  }
  if (env.kind == EnvSpec::Kind::kHeavyTail) require(env.gamma > 0.0, "environment.gamma", "must be positive");
  if (env.kind == EnvSpec::Kind::kStronglyConvex) require(env.sigma > 0.0, "environment.sigma", "must be positive");

  const FilterSpec& f = cfg.filter;
  if (f.kind == FilterSpec::Kind::kQuantile) {
    require(!adversarial, "filter.kind", "the quantile filter needs an i.i.d. environment, not " +
                                             std::string(to_string(env.kind)));
    require(env.kind == EnvSpec::Kind::kIid || env.kind == EnvSpec::Kind::kHeavyTail, "filter.kind",
            "the quantile filter needs iid-gradient or heavytail-logistic (analytic quantile)");
    require(f.p > 0.0 && f.p < 1.0, "filter.p", "must lie in (0, 1)");
    if (f.mode == FilterStatMode::kFeatureNorm) {
      require(env.kind == EnvSpec::Kind::kHeavyTail, "filter.mode", "feature mode needs margin losses");
    } else {
      require(env.kind == EnvSpec::Kind::kIid, "filter.mode",
              "gradient mode needs iid-gradient; heavytail-logistic has an analytic quantile only for features");
    }
  }
  if (cfg.learner.kind == LearnerSpec::Kind::kScOgd) {
    require(cfg.learner.sigma > 0.0, "learner.sigma", "must be positive");
    require(env.kind == EnvSpec::Kind::kStronglyConvex, "learner.kind",
            "sc-ogd needs strongly convex losses (strongly-convex-adversarial)");
  }
  for (const std::string& c : cfg.checks) {
    require(std::find(std::begin(kCheckNames), std::end(kCheckNames), c) != std::end(kCheckNames), "checks",
            "unknown check '" + c + "'");
    const bool topk = f.kind == FilterSpec::Kind::kTopK;
    if (c == "topk-bound") require(topk, "checks", "topk-bound needs the topk filter");
    if (c == "topk-convex") {
      require(topk && cfg.learner.kind == LearnerSpec::Kind::kAdaptiveOgd, "checks",
              "topk-convex needs topk with adaptive-ogd");
    }
    if (c == "topk-strongly-convex") require(topk && cfg.learner.kind == LearnerSpec::Kind::kScOgd, "checks", "topk-strongly-convex needs topk with sc-ogd");
    if (c == "quantile-bound") require(f.kind == FilterSpec::Kind::kQuantile, "checks", "quantile-bound needs the quantile filter");
    if (c == "huber-risk") require(env.kind == EnvSpec::Kind::kHuber, "checks", "huber-risk needs huber-mixture");
    if (c == "lower-bound") require(adversarial, "checks", "lower-bound needs an adversarial construction");
  }
  require(cfg.risk_samples >= 1, "risk_samples", "must be at least 1");
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Section, std::less<>> sections;
  std::string current;
  sections[current];
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, line, "unterminated section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current != "environment" && current != "learner" && current != "filter") {
        fail(line_no, current, "unknown section");
      }
      if (sections.count(current)) fail(line_no, current, "duplicate section");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, line, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(line_no, line, "empty key");
    Section& sec = sections[current];
    if (sec.count(key)) fail(line_no, key, "duplicate key");
    sec[key] = Entry{value, line_no, false};
  }

  ExperimentConfig cfg;
  Reader top(sections[""], "");
  top.text("name", cfg.name);
  top.integer("horizon", cfg.horizon);
  if (const Entry* e = top.find("seeds")) {
    try {
      cfg.seeds = parse_seed_list(e->value);
    } catch (const ConfigError& err) {
      fail(e->line, "seeds", err.what());
    }
  }
  top.text("out", cfg.out_dir);
  if (const Entry* e = top.find("checks")) cfg.checks = split_list(e->value);
  top.integer("risk_samples", cfg.risk_samples);
  top.integer("risk_seed", cfg.risk_seed);
  top.finish();

  if (!sections.count("environment")) fail(0, "environment", "missing section");
  read_environment(sections["environment"], cfg.env);
  if (sections.count("learner")) read_learner(sections["learner"], cfg.learner);
  FilterAuto a;
  if (sections.count("filter")) a = read_filter(sections["filter"], cfg.filter, cfg.huber_delta);

  if (a.k_auto) {
    if (cfg.env.kind != EnvSpec::Kind::kHuber) fail(a.line, "filter.k", "k = auto needs huber-mixture");
    try {
      cfg.filter.k = huber_k_tuning(cfg.env.epsilon, cfg.horizon, cfg.huber_delta);
    } catch (const ConfigError& err) {
      fail(a.line, "filter.k", err.what());
    }
  }
  if (a.p_auto) cfg.filter.p = 1.0 - 1.0 / std::sqrt(static_cast<double>(cfg.horizon));
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace roco
