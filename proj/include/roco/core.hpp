#pragma once

// Shared building blocks: vectors, feasible domains, loss events, the base
// learner contract and the per-round trace record.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace roco {

using Vector = std::vector<double>;
using ConstVec = std::span<const double>;

/// Raised for malformed user input: bad dimensions, invalid parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

double dot(ConstVec a, ConstVec b);
double norm2(ConstVec a);
double squared_norm2(ConstVec a);
double distance2(ConstVec a, ConstVec b);

/// The l2 norm. It is self-dual, so `dual_norm` coincides with `norm`. Other
/// norm pairs would need their own projection and diameter.
struct L2Norm {
  static double norm(ConstVec w) { return norm2(w); }
  static double dual_norm(ConstVec g) { return norm2(g); }
};

/// Compact convex feasible set: a Euclidean ball or an axis-aligned box.
class Domain {
 public:
  enum class Kind { kBall, kBox };

  static Domain ball(Vector center, double radius);
  static Domain box(Vector lower, Vector upper);
  /// One-dimensional box [lo, hi].
  static Domain interval(double lo, double hi);

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return a_.size(); }

  /// Euclidean projection. Fixes points already inside the domain.
  Vector project(ConstVec w) const;
  void project_inplace(std::span<double> w) const;
  bool contains(ConstVec w, double tol = 0.0) const;
  double diameter() const;
  Vector center() const;

  // Ball: a_ = center, radius_. Box: a_ = lower, b_ = upper.
  const Vector& lower() const { return a_; }
  const Vector& upper() const { return b_; }
  double radius() const { return radius_; }

 private:
  Domain(Kind kind, Vector a, Vector b, double radius)
      : kind_(kind), a_(std::move(a)), b_(std::move(b)), radius_(radius) {}
  void check_dim(std::size_t d) const;

  Kind kind_;
  Vector a_;
  Vector b_;
  double radius_ = 0.0;
};

// ---------------------------------------------------------------------------
// Loss events

/// f(w) = <g, w>
struct LinearLoss {
  Vector g;
};
/// f(w) = (sigma/2) ||w - target||^2, sigma-strongly convex.
struct SquaredLoss {
  Vector target;
  double sigma = 1.0;
};
/// f(w) = ln(1 + exp(-y <w, x>)), y in {-1, +1}
struct LogisticLoss {
  Vector x;
  double y = 1.0;
};
/// f(w) = max(0, 1 - y <w, x>), y in {-1, +1}
struct HingeLoss {
  Vector x;
  double y = 1.0;
};

enum class LossKind { kLinear, kSquared, kLogistic, kHinge };

/// A convex loss revealed for one round.
class LossEvent {
 public:
  using Variant = std::variant<LinearLoss, SquaredLoss, LogisticLoss, HingeLoss>;

  LossEvent() : v_(LinearLoss{}) {}
  LossEvent(LinearLoss l) : v_(std::move(l)) {}
  LossEvent(SquaredLoss l) : v_(std::move(l)) {}
  LossEvent(LogisticLoss l) : v_(std::move(l)) {}
  LossEvent(HingeLoss l) : v_(std::move(l)) {}

  LossKind kind() const { return static_cast<LossKind>(v_.index()); }
  const Variant& variant() const { return v_; }
  std::size_t dimension() const;

  double value(ConstVec w) const;
  Vector subgradient(ConstVec w) const;
  /// Feature vector of a margin loss (logistic, hinge).
  /// Throws ContractViolation for other kinds.
  const Vector& features() const;

 private:
  Variant v_;
};

/// Numerically stable ln(1 + exp(z)).
double softplus(double z);

// ---------------------------------------------------------------------------
// Trace

enum class Decision : std::uint8_t { kPassed, kFiltered };

std::string_view to_string(Decision d);

struct RoundRecord {
  std::size_t t = 0;  // 1-based round index
  Vector w;           // prediction w_t
  Vector grad;        // subgradient at w_t
  double grad_norm = 0.0;
  double loss_value = 0.0;
  Decision decision = Decision::kPassed;
  /// What the filter compared against: min of the top-k list, or LCB_{t-1}.
  double filter_stat = 0.0;
  /// Statistic the filter thresholded (gradient norm or feature norm).
  double statistic = 0.0;
  LossEvent event;
};

using Trace = std::vector<RoundRecord>;

// ---------------------------------------------------------------------------
// Base learner contract

/// A Lipschitz-adaptive online learner. A filtered round is simply never
/// reported through `update`, so the learner behaves as if it did not happen.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  /// Current prediction; always inside `domain()`.
  virtual const Vector& predict() const = 0;
  /// Feed one passed round: the revealed loss and its subgradient at predict().
  virtual void update(const LossEvent& event, ConstVec grad) = 0;
  /// Regret bound B_T(G) after `rounds` updates with gradient norms <= G.
  /// Nondecreasing in both arguments and concave in `rounds`.
  virtual double regret_bound(double grad_bound, double rounds) const = 0;
  /// Byte image of the full internal state, for skip-semantics checks.
  virtual std::vector<std::byte> state_bytes() const = 0;
  virtual std::unique_ptr<OnlineLearner> clone() const = 0;
  virtual const Domain& domain() const = 0;
  virtual std::string_view name() const = 0;
};

}  // namespace roco
