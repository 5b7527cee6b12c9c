#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace steeplab {

/// Steepness parameter beta: a real >= 1 or +infinity (the Heaviside limit).
class Steepness {
 public:
  explicit Steepness(double beta);
  static Steepness infinite() { return Steepness(); }

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws ConfigError for the infinite steepness.
  double value() const;
  bool is_integer() const;
  /// Integer value; throws ConfigError if not an integer.
  long long as_integer() const;

  std::string to_string() const;

  friend bool operator==(const Steepness&, const Steepness&) = default;

 private:
  Steepness() : beta_(0.0), infinite_(true) {}
  double beta_;
  bool infinite_;
};

enum class FiringKind { kTanh, kPiecewiseLinear, kShifted, kHeaviside, kCustom };

/// Region of x = u - u_theta where S_beta is in transition: |x - center| <= halfwidth.
struct TransitionBand {
  double center = 0.0;
  double halfwidth = 0.0;
};

/// A family {S_beta} of firing-rate functions together with its Heaviside
/// limit. Immutable value type; copies share the wrapped inner family.
class FiringRate {
 public:
  using CustomFn = std::function<double(double beta, double x)>;

  /// S_beta(x) = (1 + tanh(beta x)) / 2.
  static FiringRate tanh_family(double zero_value = 0.5);
  /// Ramp from 0 to 1 over [-1/beta, 1/beta] with slope beta/2.
  static FiringRate piecewise_linear(double zero_value = 0.5);
  /// inner.eval(beta, x + (-1)^beta / (2 beta)); integer beta only.
  static FiringRate shifted(const FiringRate& inner);
  /// H(x) with H(0) = zero_value; ignores beta.
  static FiringRate heaviside(double zero_value = 0.5);
  /// User family. `monotone` declares x-monotonicity for the tail checker.
  static FiringRate custom(std::string name, CustomFn fn, bool monotone, double zero_value = 0.5);

  FiringKind kind() const { return kind_; }
  double zero_value() const { return zero_value_; }
  FiringRate with_zero_value(double zero_value) const;
  /// Inner family of a shifted wrapper.
  const FiringRate& inner() const;

  bool is_heaviside() const { return kind_ == FiringKind::kHeaviside; }
  bool is_monotone() const;

  /// S_beta(x). For beta = infinity only the heaviside kind is accepted.
  double eval(Steepness beta, double x) const;
  /// S_beta(x), or the pointwise limit H(x) (with the configured zero value)
  /// when beta is infinite.
  double eval_or_limit(Steepness beta, double x) const;
  /// H(x) with H(0) = zero_value.
  double pointwise_limit(double x) const;

  /// dS_beta/dx (right derivative at kinks). Not defined for heaviside/custom.
  double derivative(Steepness beta, double x) const;
  /// Global Lipschitz constant in x for finite beta.
  double lipschitz(double beta) const;
  /// Where the family is in transition; used by the integrator step cap.
  TransitionBand transition_band(double beta) const;
  /// Signed shift (-1)^beta / (2 beta) applied by a shifted wrapper (0 otherwise).
  double shift(double beta) const;

  /// Config code: "tanh", "pwl", "shifted:<inner>", "heaviside@<z>".
  std::string code() const;

 private:
  FiringRate(FiringKind kind, double zero_value);

  FiringKind kind_;
  double zero_value_;
  std::shared_ptr<const FiringRate> inner_;
  std::shared_ptr<const CustomFn> custom_;
  std::string name_;
  bool custom_monotone_ = false;
};

/// Parses a config code (see FiringRate::code). Throws ConfigError.
FiringRate parse_firing(std::string_view code);

struct AssumptionAOptions {
  /// Largest beta examined before giving up.
  long long beta_cap = 1'000'000'000;
};

struct AssumptionAReport {
  /// First beta from which both tail bounds hold for every larger integer beta.
  long long q = 0;
  bool pass = false;
  std::string diagnostic;
};

/// Certifies the tail bounds S_beta(x) < eps for x < -delta and
/// 1 - S_beta(x) < eps for x > delta for all integer beta >= Q.
AssumptionAReport check_assumption_a(const FiringRate& family, double eps, double delta,
                                     const AssumptionAOptions& options = {});

}  // namespace steeplab
