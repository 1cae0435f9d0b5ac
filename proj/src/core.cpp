#include "roco/core.hpp"

#include <algorithm>
#include <cmath>

namespace roco {

namespace {

// Points within this relative distance of the sphere count as on it, so that
// projecting a projected point returns it bit-for-bit.
constexpr double kBallSlack = 1e-12;

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

void require_dim(std::size_t got, std::size_t want) {
  if (got != want) {
    throw ConfigError("dimension mismatch: got " + std::to_string(got) + ", expected " +
                      std::to_string(want));
  }
}

}  // namespace

double dot(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm2(ConstVec a) { return dot(a, a); }

double norm2(ConstVec a) {
  if (a.size() == 1) return std::abs(a[0]);
  return std::sqrt(squared_norm2(a));
}

double distance2(ConstVec a, ConstVec b) {
  if (a.size() == 1) return std::abs(a[0] - b[0]);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// ---------------------------------------------------------------------------

Domain Domain::ball(Vector center, double radius) {
  if (center.empty()) throw ConfigError("ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball: radius must be positive");
  return Domain(Kind::kBall, std::move(center), {}, radius);
}

Domain Domain::box(Vector lower, Vector upper) {
  if (lower.empty()) throw ConfigError("box: empty bounds");
  require_dim(upper.size(), lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw ConfigError("box: need lower[i] < upper[i] at coordinate " + std::to_string(i));
    }
  }
  return Domain(Kind::kBox, std::move(lower), std::move(upper), 0.0);
}

Domain Domain::interval(double lo, double hi) { return box({lo}, {hi}); }

void Domain::check_dim(std::size_t d) const { require_dim(d, dimension()); }

void Domain::project_inplace(std::span<double> w) const {
  check_dim(w.size());
  if (kind_ == Kind::kBox) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::clamp(w[i], a_[i], b_[i]);
    return;
  }
  const double dist = distance2(w, a_);
  if (dist <= radius_ * (1.0 + kBallSlack)) return;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = a_[i] + (w[i] - a_[i]) * radius_ / dist;
}

Vector Domain::project(ConstVec w) const {
  Vector out(w.begin(), w.end());
  project_inplace(out);
  return out;
}

bool Domain::contains(ConstVec w, double tol) const {
  check_dim(w.size());
  if (kind_ == Kind::kBox) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] < a_[i] - tol || w[i] > b_[i] + tol) return false;
    }
    return true;
  }
  return distance2(w, a_) <= radius_ * (1.0 + kBallSlack) + tol;
}

double Domain::diameter() const {
  if (kind_ == Kind::kBall) return 2.0 * radius_;
  return distance2(a_, b_);
}

Vector Domain::center() const {
  if (kind_ == Kind::kBall) return a_;
  Vector c(a_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (a_[i] + b_[i]);
  return c;
}

// ---------------------------------------------------------------------------

std::size_t LossEvent::dimension() const {
  return std::visit(Overloaded{[](const LinearLoss& l) { return l.g.size(); },
                               [](const SquaredLoss& l) { return l.target.size(); },
                               [](const LogisticLoss& l) { return l.x.size(); },
                               [](const HingeLoss& l) { return l.x.size(); }},
                    v_);
}

double LossEvent::value(ConstVec w) const {
  return std::visit(
      Overloaded{[&](const LinearLoss& l) { return dot(l.g, w); },
                 [&](const SquaredLoss& l) {
                   const double d = distance2(w, l.target);
                   return 0.5 * l.sigma * d * d;
                 },
                 [&](const LogisticLoss& l) { return softplus(-l.y * dot(w, l.x)); },
                 [&](const HingeLoss& l) { return std::max(0.0, 1.0 - l.y * dot(w, l.x)); }},
      v_);
}

Vector LossEvent::subgradient(ConstVec w) const {
  return std::visit(Overloaded{[&](const LinearLoss& l) { return l.g; },
                               [&](const SquaredLoss& l) {
                                 Vector g(w.size());
                                 for (std::size_t i = 0; i < g.size(); ++i) {
                                   g[i] = l.sigma * (w[i] - l.target[i]);
                                 }
                                 return g;
                               },
                               [&](const LogisticLoss& l) {
                                 // -y x / (1 + exp(y <w,x>))
                                 const double m = l.y * dot(w, l.x);
                                 const double s = m > 0 ? std::exp(-m) / (1.0 + std::exp(-m))
                                                        : 1.0 / (1.0 + std::exp(m));
                                 Vector g(l.x.size());
                                 for (std::size_t i = 0; i < g.size(); ++i) g[i] = -l.y * l.x[i] * s;
                                 return g;
                               },
                               [&](const HingeLoss& l) {
                                 Vector g(l.x.size(), 0.0);
                                 // Zero at the kink.
                                 if (l.y * dot(w, l.x) < 1.0) {
                                   for (std::size_t i = 0; i < g.size(); ++i) g[i] = -l.y * l.x[i];
                                 }
                                 return g;
                               }},
                    v_);
}

const Vector& LossEvent::features() const {
  if (const auto* l = std::get_if<LogisticLoss>(&v_)) return l->x;
  if (const auto* h = std::get_if<HingeLoss>(&v_)) return h->x;
  throw ContractViolation("features(): loss has no feature vector");
}

std::string_view to_string(Decision d) { return d == Decision::kPassed ? "passed" : "filtered"; }

}  // namespace roco
