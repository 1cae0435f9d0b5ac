#include "roco/environments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace roco {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

// ---------------------------------------------------------------------------

AdversarialChoice rademacher_adversarial_choice(std::span<const double> xi, double zeta, std::size_t k,
                                                std::size_t horizon, double half_width) {
  if (xi.size() < std::min(k, horizon)) throw ContractViolation("adversarial choice: missing signs");
  AdversarialChoice c;
  c.u = {-half_width * zeta};
  c.inliers.assign(horizon, true);
  for (std::size_t t = 1; t <= std::min(k, horizon); ++t) c.inliers[t - 1] = xi[t - 1] == zeta;
  return c;
}

RademacherLinearEnv::RademacherLinearEnv(double grad_scale, double half_width, std::size_t horizon,
                                         std::size_t k, std::uint64_t seed)
    : scale_(grad_scale),
      half_width_(half_width),
      horizon_(horizon),
      k_(k),
      domain_(Domain::interval(-half_width, half_width)),
      rng_(seed, Stream::kEvents) {
  require(grad_scale > 0.0, "rademacher-linear: G must be positive");
  Rng choice(seed, Stream::kChoice);
  zeta_ = choice.rademacher();
  xi_.reserve(horizon);
}

std::optional<LossEvent> RademacherLinearEnv::next_event(std::size_t t, ConstVec) {
  if (t > horizon_) return std::nullopt;
  const double xi = rng_.rademacher();
  xi_.push_back(xi);
  return LossEvent(LinearLoss{{scale_ * xi}});
}

AdversarialChoice RademacherLinearEnv::adversarial_choice() const {
  if (xi_.size() != horizon_) throw ContractViolation("adversarial choice requested before the run ended");
  return rademacher_adversarial_choice(xi_, zeta_, k_, horizon_, half_width_);
}

// ---------------------------------------------------------------------------

StronglyConvexAdvEnv::StronglyConvexAdvEnv(double sigma, double half_width, std::size_t horizon, std::size_t k,
                                           std::uint64_t seed)
    : sigma_(sigma),
      half_width_(half_width),
      horizon_(horizon),
      k_(k),
      domain_(Domain::interval(-half_width, half_width)),
      rng_(seed, Stream::kEvents) {
  require(sigma > 0.0, "strongly-convex-adversarial: sigma must be positive");
  Rng choice(seed, Stream::kChoice);
  zeta_ = choice.rademacher();
}

std::optional<LossEvent> StronglyConvexAdvEnv::next_event(std::size_t t, ConstVec) {
  if (t > horizon_) return std::nullopt;
  double center = half_width_ * zeta_;
  if (t <= k_) {
    const double xi = rng_.rademacher();
    xi_.push_back(xi);
    center = half_width_ * xi;
  }
  return LossEvent(SquaredLoss{{center}, sigma_});
}

AdversarialChoice StronglyConvexAdvEnv::adversarial_choice() const {
  if (xi_.size() != std::min(k_, horizon_)) {
    throw ContractViolation("adversarial choice requested before the run ended");
  }
  AdversarialChoice c = rademacher_adversarial_choice(xi_, zeta_, k_, horizon_, half_width_);
  c.u = {half_width_ * zeta_};
  return c;
}

// ---------------------------------------------------------------------------

UniformLinearDistribution::UniformLinearDistribution(double low, double high) : low_(low), high_(high) {
  require(low < high, "uniform-linear: need low < high");
}
LossEvent UniformLinearDistribution::sample(Rng& rng) const { return LinearLoss{{rng.uniform(low_, high_)}}; }
std::unique_ptr<LossDistribution> UniformLinearDistribution::clone() const {
  return std::make_unique<UniformLinearDistribution>(*this);
}
double UniformLinearDistribution::bound() const { return std::max(std::abs(low_), std::abs(high_)); }

ParetoLinearDistribution::ParetoLinearDistribution(double scale, double alpha, double positive_prob)
    : scale_(scale), alpha_(alpha), positive_prob_(positive_prob) {
  require(scale > 0.0 && alpha > 0.0, "pareto-linear: scale and alpha must be positive");
}
LossEvent ParetoLinearDistribution::sample(Rng& rng) const {
  const double r = rng.pareto(scale_, alpha_);
  const double s = rng.bernoulli(positive_prob_) ? 1.0 : -1.0;
  return LinearLoss{{s * r}};
}
std::unique_ptr<LossDistribution> ParetoLinearDistribution::clone() const {
  return std::make_unique<ParetoLinearDistribution>(*this);
}

BoundedLogisticDistribution::BoundedLogisticDistribution(double bound, double flip) : bound_(bound), flip_(flip) {
  require(bound > 0.0, "bounded-logistic: bound must be positive");
}
LossEvent BoundedLogisticDistribution::sample(Rng& rng) const {
  const double x = rng.uniform(-bound_, bound_);
  double y = x >= 0.0 ? 1.0 : -1.0;
  if (rng.bernoulli(flip_)) y = -y;
  return LogisticLoss{{x}, y};
}
std::unique_ptr<LossDistribution> BoundedLogisticDistribution::clone() const {
  return std::make_unique<BoundedLogisticDistribution>(*this);
}

ExtremeLogisticDistribution::ExtremeLogisticDistribution(double scale, double alpha, double label)
    : scale_(scale), alpha_(alpha), label_(label) {
  require(scale > 0.0 && alpha > 0.0, "extreme-logistic: scale and alpha must be positive");
}
LossEvent ExtremeLogisticDistribution::sample(Rng& rng) const {
  const double r = rng.pareto(scale_, alpha_);
  return LogisticLoss{{rng.rademacher() * r}, label_};
}
std::unique_ptr<LossDistribution> ExtremeLogisticDistribution::clone() const {
  return std::make_unique<ExtremeLogisticDistribution>(*this);
}

// ---------------------------------------------------------------------------

HuberMixtureEnv::HuberMixtureEnv(double epsilon, std::unique_ptr<LossDistribution> inlier,
                                 std::unique_ptr<LossDistribution> outlier, Domain domain, std::size_t horizon,
                                 std::uint64_t seed)
    : epsilon_(epsilon),
      inlier_(std::move(inlier)),
      outlier_(std::move(outlier)),
      domain_(std::move(domain)),
      horizon_(horizon),
      mix_rng_(seed, Stream::kMixture),
      inlier_rng_(seed, Stream::kEvents),
      outlier_rng_(seed, Stream::kOutlier) {
  require(epsilon >= 0.0 && epsilon < 1.0, "huber-mixture: epsilon must be in [0, 1)");
  require(inlier_ != nullptr && outlier_ != nullptr, "huber-mixture: missing distribution");
  flags_.reserve(horizon);
}

std::optional<LossEvent> HuberMixtureEnv::next_event(std::size_t t, ConstVec) {
  if (t > horizon_) return std::nullopt;
  const bool outlier = mix_rng_.bernoulli(epsilon_);
  flags_.push_back(outlier);
  return outlier ? outlier_->sample(outlier_rng_) : inlier_->sample(inlier_rng_);
}

RoundMask HuberMixtureEnv::inlier_mask() const {
  RoundMask m(flags_.size());
  for (std::size_t i = 0; i < flags_.size(); ++i) m[i] = !flags_[i];
  return m;
}

// ---------------------------------------------------------------------------

HeavyTailLogisticEnv::HeavyTailLogisticEnv(double gamma, std::size_t horizon, std::uint64_t seed, double flip)
    : gamma_(gamma), horizon_(horizon), flip_(flip), domain_(Domain::interval(-1.0, 1.0)), rng_(seed, Stream::kEvents) {
  require(gamma > 0.0, "heavytail-logistic: gamma must be positive");
  require(flip >= 0.0 && flip <= 1.0, "heavytail-logistic: flip must be in [0, 1]");
}

double HeavyTailLogisticEnv::sample_abs_feature(Rng& rng, double gamma) {
  return std::pow(rng.uniform_pos(), -1.0 / (1.0 + gamma));
}

std::optional<LossEvent> HeavyTailLogisticEnv::next_event(std::size_t t, ConstVec) {
  if (t > horizon_) return std::nullopt;
  const double x = rng_.rademacher() * sample_abs_feature(rng_, gamma_);
  double y = x > 0.0 ? 1.0 : -1.0;
  if (rng_.bernoulli(flip_)) y = -y;
  return LossEvent(LogisticLoss{{x}, y});
}

double HeavyTailLogisticEnv::feature_quantile(double p) const { return std::pow(1.0 - p, -1.0 / (1.0 + gamma_)); }

// ---------------------------------------------------------------------------

IidGradientEnv::IidGradientEnv(NormLaw law, double scale, double alpha, double positive_prob, double half_width,
                               std::size_t horizon, std::uint64_t seed)
    : law_(law),
      scale_(scale),
      alpha_(alpha),
      positive_prob_(positive_prob),
      horizon_(horizon),
      domain_(Domain::interval(-half_width, half_width)),
      rng_(seed, Stream::kEvents) {
  require(scale > 0.0, "iid-gradient: scale must be positive");
  require(law == NormLaw::kUniform || alpha > 0.0, "iid-gradient: alpha must be positive");
  require(positive_prob >= 0.0 && positive_prob <= 1.0, "iid-gradient: positive_prob must be in [0, 1]");
}

std::optional<LossEvent> IidGradientEnv::next_event(std::size_t t, ConstVec) {
  if (t > horizon_) return std::nullopt;
  const double r = law_ == NormLaw::kUniform ? scale_ * rng_.uniform() : rng_.pareto(scale_, alpha_);
  const double s = rng_.bernoulli(positive_prob_) ? 1.0 : -1.0;
  return LossEvent(LinearLoss{{s * r}});
}

double IidGradientEnv::norm_quantile(double p) const {
  if (law_ == NormLaw::kUniform) return p * scale_;
  return scale_ * std::pow(1.0 - p, -1.0 / alpha_);
}

double IidGradientEnv::conditional_inlier_mean(double p) const {
  const double gp = norm_quantile(p);
  double mean_r = 0.0;
  if (law_ == NormLaw::kUniform) {
    mean_r = 0.5 * gp;
  } else if (alpha_ == 1.0) {
    mean_r = scale_ * std::log(gp / scale_) / p;
  } else {
    mean_r = alpha_ * std::pow(scale_, alpha_) * (std::pow(gp, 1.0 - alpha_) - std::pow(scale_, 1.0 - alpha_)) /
             (1.0 - alpha_) / p;
  }
  return (2.0 * positive_prob_ - 1.0) * mean_r;
}

// ---------------------------------------------------------------------------

SpikedAdversarialEnv::SpikedAdversarialEnv(Params params, std::uint64_t seed)
    : params_(std::move(params)),
      domain_(Domain::ball(Vector(params_.dimension, 0.0), params_.half_width)),
      rng_(seed, Stream::kEvents) {
  require(params_.dimension >= 1, "spiked-adversarial: dimension must be >= 1");
  require(params_.spike_min > 0.0 && params_.spike_min <= params_.spike_max,
          "spiked-adversarial: need 0 < spike_min <= spike_max");
  require(params_.noise >= 0.0 && params_.drift >= 0.0, "spiked-adversarial: drift and noise must be >= 0");
  std::set<std::size_t> rounds(params_.spike_rounds.begin(), params_.spike_rounds.end());
  if (rounds.empty() && params_.spike_count > 0) {
    require(params_.spike_count <= params_.horizon, "spiked-adversarial: more spikes than rounds");
    // Floyd's sampling of distinct positions in [1, T].
    Rng pos(seed, Stream::kPositions);
    const std::size_t n = params_.horizon;
    for (std::size_t j = n - params_.spike_count + 1; j <= n; ++j) {
      const std::size_t r = 1 + static_cast<std::size_t>(pos.below(j));
      if (!rounds.insert(r).second) rounds.insert(j);
    }
  }
  for (std::size_t r : rounds) require(r >= 1 && r <= params_.horizon, "spiked-adversarial: spike out of range");
  spikes_.assign(rounds.begin(), rounds.end());
  Rng mag(seed, Stream::kOutlier);
  const double lo = std::log(params_.spike_min), hi = std::log(params_.spike_max);
  for (std::size_t i = 0; i < spikes_.size(); ++i) magnitudes_.push_back(std::exp(lo + (hi - lo) * mag.uniform()));
}

bool SpikedAdversarialEnv::is_spike(std::size_t t) const {
  return std::binary_search(spikes_.begin(), spikes_.end(), t);
}

std::optional<LossEvent> SpikedAdversarialEnv::next_event(std::size_t t, ConstVec) {
  if (t > params_.horizon) return std::nullopt;
  const std::size_t d = params_.dimension;
  Vector g(d, 0.0);
  if (next_spike_ < spikes_.size() && spikes_[next_spike_] == t) {
    g[0] = -magnitudes_[next_spike_] * params_.spike_multiplier;
    ++next_spike_;
    return LossEvent(LinearLoss{std::move(g)});
  }
  // Noise uniform in the ball of radius `noise`.
  if (d == 1) {
    g[0] = params_.noise * (2.0 * rng_.uniform() - 1.0);
  } else {
    double n2 = 0.0;
    for (double& v : g) {
      v = rng_.normal();
      n2 += v * v;
    }
    const double radius = params_.noise * std::pow(rng_.uniform(), 1.0 / static_cast<double>(d));
    const double scale = n2 > 0.0 ? radius / std::sqrt(n2) : 0.0;
    for (double& v : g) v *= scale;
  }
  g[0] += params_.drift;
  return LossEvent(LinearLoss{std::move(g)});
}

// ---------------------------------------------------------------------------

std::size_t huber_k_tuning(double epsilon, std::size_t horizon, double delta) {
  require(epsilon >= 0.0 && epsilon <= 0.5, "huber_k_tuning: epsilon must be in [0, 1/2]");
  require(delta > 0.0 && delta <= 1.0, "huber_k_tuning: delta must be in (0, 1]");
  const double T = static_cast<double>(horizon);
  const double l = std::log(2.0 / delta);
  const double k = epsilon * T + std::sqrt(2.0 * T * epsilon * (1.0 - epsilon) * l) + (1.0 - epsilon) * l / 3.0;
  return static_cast<std::size_t>(std::ceil(k));
}

}  // namespace roco
