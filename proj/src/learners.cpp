#include "roco/learners.hpp"

#include <cmath>
#include <cstring>

namespace roco {

namespace {

void append_bytes(std::vector<std::byte>& out, const void* p, std::size_t n) {
  const auto* b = static_cast<const std::byte*>(p);
  out.insert(out.end(), b, b + n);
}

void require_grad_dim(const Domain& d, ConstVec grad) {
  if (grad.size() != d.dimension()) throw ConfigError("gradient dimension mismatch");
}

}  // namespace

void adaptive_ogd_update_inplace(AdaptiveOgdState& state, ConstVec grad) {
  require_grad_dim(state.domain, grad);
  const double g2 = squared_norm2(grad);
  if (g2 == 0.0) return;
  state.sum_sq += g2;
  const double eta = state.domain.diameter() / std::sqrt(2.0 * state.sum_sq);
  for (std::size_t i = 0; i < grad.size(); ++i) state.w[i] -= eta * grad[i];
  state.domain.project_inplace(state.w);
}

AdaptiveOgdState adaptive_ogd_update(AdaptiveOgdState state, ConstVec grad) {
  adaptive_ogd_update_inplace(state, grad);
  return state;
}

double adaptive_ogd_regret_bound(double diameter, double sum_sq_passed) {
  return 2.0 * diameter * std::sqrt(sum_sq_passed);
}

StronglyConvexOgdState::StronglyConvexOgdState(Domain d, double sigma_)
    : w(d.center()), sigma(sigma_), domain(std::move(d)) {
  if (!(sigma > 0.0)) throw ConfigError("sc-ogd: sigma must be positive");
}

void sc_ogd_update_inplace(StronglyConvexOgdState& state, ConstVec grad) {
  require_grad_dim(state.domain, grad);
  ++state.passed_count;
  const double eta = 1.0 / (state.sigma * static_cast<double>(state.passed_count));
  for (std::size_t i = 0; i < grad.size(); ++i) state.w[i] -= eta * grad[i];
  state.domain.project_inplace(state.w);
}

StronglyConvexOgdState sc_ogd_update(StronglyConvexOgdState state, ConstVec grad) {
  sc_ogd_update_inplace(state, grad);
  return state;
}

// ---------------------------------------------------------------------------

void AdaptiveOgd::update(const LossEvent&, ConstVec grad) { adaptive_ogd_update_inplace(state_, grad); }

double AdaptiveOgd::regret_bound(double grad_bound, double rounds) const {
  if (rounds <= 0.0) return 0.0;
  return 2.0 * state_.domain.diameter() * grad_bound * std::sqrt(rounds);
}

std::vector<std::byte> AdaptiveOgd::state_bytes() const {
  std::vector<std::byte> out;
  append_bytes(out, state_.w.data(), state_.w.size() * sizeof(double));
  append_bytes(out, &state_.sum_sq, sizeof(double));
  return out;
}

std::unique_ptr<OnlineLearner> AdaptiveOgd::clone() const { return std::make_unique<AdaptiveOgd>(*this); }

void StronglyConvexOgd::update(const LossEvent&, ConstVec grad) { sc_ogd_update_inplace(state_, grad); }

double StronglyConvexOgd::regret_bound(double grad_bound, double rounds) const {
  if (rounds < 1.0) return 0.0;
  return grad_bound * grad_bound / (2.0 * state_.sigma) * (1.0 + std::log(rounds));
}

std::vector<std::byte> StronglyConvexOgd::state_bytes() const {
  std::vector<std::byte> out;
  append_bytes(out, state_.w.data(), state_.w.size() * sizeof(double));
  append_bytes(out, &state_.passed_count, sizeof(state_.passed_count));
  append_bytes(out, &state_.sigma, sizeof(double));
  return out;
}

std::unique_ptr<OnlineLearner> StronglyConvexOgd::clone() const {
  return std::make_unique<StronglyConvexOgd>(*this);
}

}  // namespace roco
