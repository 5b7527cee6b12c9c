#include "steeplab/firing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "steeplab/errors.hpp"

namespace steeplab {

namespace {

// Slope below which a smooth family counts as saturated.
constexpr double kSmoothBandSlope = 1e-3;

std::string format_shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw ConfigError("cannot format number");
  return std::string(buf, end);
}

void check_zero_value(double z) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw ConfigError("heaviside zero value must lie in [0,1], got " + format_shortest(z));
  }
}

}  // namespace

Steepness::Steepness(double beta) : beta_(beta), infinite_(false) {
  if (std::isinf(beta) && beta > 0) {
    infinite_ = true;
    beta_ = 0.0;
    return;
  }
  if (!std::isfinite(beta) || beta < 1.0) {
    throw ConfigError("steepness must be >= 1 or infinite, got " + format_shortest(beta));
  }
}

double Steepness::value() const {
  if (infinite_) throw ConfigError("steepness is infinite");
  return beta_;
}

bool Steepness::is_integer() const { return !infinite_ && std::floor(beta_) == beta_; }

long long Steepness::as_integer() const {
  if (!is_integer()) throw ConfigError("steepness " + to_string() + " is not an integer");
  return static_cast<long long>(beta_);
}

std::string Steepness::to_string() const { return infinite_ ? "inf" : format_shortest(beta_); }

FiringRate::FiringRate(FiringKind kind, double zero_value) : kind_(kind), zero_value_(zero_value) {
  check_zero_value(zero_value);
}

FiringRate FiringRate::tanh_family(double zero_value) { return {FiringKind::kTanh, zero_value}; }

FiringRate FiringRate::piecewise_linear(double zero_value) {
  return {FiringKind::kPiecewiseLinear, zero_value};
}

FiringRate FiringRate::shifted(const FiringRate& inner) {
  if (inner.is_heaviside()) throw ConfigError("cannot shift the heaviside family");
  FiringRate f(FiringKind::kShifted, inner.zero_value());
  f.inner_ = std::make_shared<const FiringRate>(inner);
  return f;
}

FiringRate FiringRate::heaviside(double zero_value) { return {FiringKind::kHeaviside, zero_value}; }

FiringRate FiringRate::custom(std::string name, CustomFn fn, bool monotone, double zero_value) {
  if (!fn) throw ConfigError("custom firing family needs a function");
  FiringRate f(FiringKind::kCustom, zero_value);
  f.custom_ = std::make_shared<const CustomFn>(std::move(fn));
  f.name_ = std::move(name);
  f.custom_monotone_ = monotone;
  return f;
}

FiringRate FiringRate::with_zero_value(double zero_value) const {
  check_zero_value(zero_value);
  FiringRate copy = *this;
  copy.zero_value_ = zero_value;
  if (copy.inner_) copy.inner_ = std::make_shared<const FiringRate>(inner_->with_zero_value(zero_value));
  return copy;
}

const FiringRate& FiringRate::inner() const {
  if (!inner_) throw ConfigError("firing family has no inner family");
  return *inner_;
}

bool FiringRate::is_monotone() const {
  switch (kind_) {
    case FiringKind::kShifted:
      return inner_->is_monotone();
    case FiringKind::kCustom:
      return custom_monotone_;
    default:
      return true;
  }
}

double FiringRate::shift(double beta) const {
  if (kind_ != FiringKind::kShifted) return 0.0;
  const Steepness b(beta);
  const long long n = b.as_integer();
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign / (2.0 * beta);
}

double FiringRate::pointwise_limit(double x) const {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return 0.0;
  return zero_value_;
}

double FiringRate::eval(Steepness beta, double x) const {
  if (kind_ == FiringKind::kHeaviside) return pointwise_limit(x);
  if (beta.is_infinite()) {
    throw ConfigError("firing family '" + code() +
                      "' has no value at infinite steepness; request the pointwise limit");
  }
  const double b = beta.value();
  switch (kind_) {
    case FiringKind::kTanh:
      return 0.5 * (1.0 + std::tanh(b * x));
    case FiringKind::kPiecewiseLinear:
      if (x > 1.0 / b) return 1.0;
      if (x < -1.0 / b) return 0.0;
      return std::clamp(0.5 + 0.5 * b * x, 0.0, 1.0);
    case FiringKind::kShifted:
      return inner_->eval(beta, x + shift(b));
    case FiringKind::kCustom:
      return (*custom_)(b, x);
    case FiringKind::kHeaviside:
      break;
  }
  return pointwise_limit(x);
}

double FiringRate::eval_or_limit(Steepness beta, double x) const {
  return beta.is_infinite() ? pointwise_limit(x) : eval(beta, x);
}

double FiringRate::derivative(Steepness beta, double x) const {
  const double b = beta.value();
  switch (kind_) {
    case FiringKind::kTanh: {
      const double th = std::tanh(b * x);
      return 0.5 * b * (1.0 - th * th);
    }
    case FiringKind::kPiecewiseLinear:
      return (x >= -1.0 / b && x < 1.0 / b) ? 0.5 * b : 0.0;
    case FiringKind::kShifted:
      return inner_->derivative(beta, x + shift(b));
    default:
      throw ConfigError("derivative not available for firing family '" + code() + "'");
  }
}

double FiringRate::lipschitz(double beta) const {
  switch (kind_) {
    case FiringKind::kTanh:
    case FiringKind::kPiecewiseLinear:
      return 0.5 * beta;
    case FiringKind::kShifted:
      return inner_->lipschitz(beta);
    case FiringKind::kHeaviside:
      return std::numeric_limits<double>::infinity();
    case FiringKind::kCustom:
      break;
  }
  throw ConfigError("Lipschitz constant unknown for custom family '" + name_ + "'");
}

TransitionBand FiringRate::transition_band(double beta) const {
  switch (kind_) {
    case FiringKind::kTanh: {
      // S' = (beta/2) sech^2(beta x) > kSmoothBandSlope  <=>  |beta x| < acosh(sqrt(beta / (2 slope)))
      const double ratio = beta / (2.0 * kSmoothBandSlope);
      const double half = ratio > 1.0 ? std::acosh(std::sqrt(ratio)) / beta : 1.0 / beta;
      return {0.0, half};
    }
    case FiringKind::kPiecewiseLinear:
      return {0.0, 1.0 / beta};
    case FiringKind::kShifted: {
      TransitionBand band = inner_->transition_band(beta);
      band.center -= shift(beta);
      return band;
    }
    case FiringKind::kCustom:
      return {0.0, 1.0 / beta};
    case FiringKind::kHeaviside:
      break;
  }
  return {0.0, 0.0};
}

std::string FiringRate::code() const {
  switch (kind_) {
    case FiringKind::kTanh:
      return "tanh";
    case FiringKind::kPiecewiseLinear:
      return "pwl";
    case FiringKind::kShifted:
      return "shifted:" + inner_->code();
    case FiringKind::kHeaviside:
      return "heaviside@" + format_shortest(zero_value_);
    case FiringKind::kCustom:
      return "custom:" + name_;
  }
  return "?";
}

FiringRate parse_firing(std::string_view code) {
  if (code == "tanh") return FiringRate::tanh_family();
  if (code == "pwl") return FiringRate::piecewise_linear();
  constexpr std::string_view kShiftedPrefix = "shifted:";
  if (code.starts_with(kShiftedPrefix)) {
    const auto inner = code.substr(kShiftedPrefix.size());
    if (inner != "tanh" && inner != "pwl") {
      throw ConfigError("shifted wrapper accepts tanh or pwl, got '" + std::string(inner) + "'");
    }
    return FiringRate::shifted(parse_firing(inner));
  }
  if (code == "heaviside") return FiringRate::heaviside();
  constexpr std::string_view kHeavisidePrefix = "heaviside@";
  if (code.starts_with(kHeavisidePrefix)) {
    const auto text = code.substr(kHeavisidePrefix.size());
    double z = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), z);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError("bad heaviside zero value in '" + std::string(code) + "'");
    }
    return FiringRate::heaviside(z);
  }
  throw ConfigError("unknown firing family '" + std::string(code) + "'");
}

namespace {

bool tails_hold(const FiringRate& family, double beta, double eps, double delta) {
  const Steepness b(beta);
  const double lower = family.eval(b, -delta);
  const double upper = 1.0 - family.eval(b, delta);
  return std::abs(lower) < eps && std::abs(upper) < eps;
}

// Smallest k in [lo, hi] with good(k), assuming good is monotone in k
// (false...false true...true). Returns nullopt if good(hi) fails.
template <class Pred>
std::optional<long long> first_good(long long lo, long long hi, Pred good) {
  if (lo > hi || !good(hi)) return std::nullopt;
  while (lo < hi) {
    const long long mid = lo + (hi - lo) / 2;
    if (good(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace

AssumptionAReport check_assumption_a(const FiringRate& family, double eps, double delta,
                                     const AssumptionAOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0,1)");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be positive");
  if (options.beta_cap < 2) throw ConfigError("beta cap must be >= 2");
  if (family.is_heaviside()) throw ConfigError("tail check needs a finite-steepness family");
  if (!family.is_monotone()) throw ConfigError("cannot certify tails: family is not monotone");

  const long long cap = options.beta_cap;
  AssumptionAReport report;
  auto good = [&](long long beta) { return tails_hold(family, static_cast<double>(beta), eps, delta); };

  const bool beta_monotone = family.kind() == FiringKind::kTanh ||
                             family.kind() == FiringKind::kPiecewiseLinear ||
                             (family.kind() == FiringKind::kShifted &&
                              family.inner().kind() != FiringKind::kCustom);

  if (beta_monotone && family.kind() != FiringKind::kShifted) {
    // Tail values are nonincreasing in beta, so endpoint evaluation plus a
    // bisection over beta is exact.
    const auto q = first_good(1, cap, good);
    if (!q) {
      report.diagnostic = "tail bounds fail at the beta cap " + std::to_string(cap);
      return report;
    }
    report.q = *q;
    report.pass = true;
    return report;
  }

  if (beta_monotone) {
    // The shift alternates sign with parity; each parity class is monotone.
    const long long k_cap = cap / 2;
    const auto even_k = first_good(1, k_cap, [&](long long k) { return good(2 * k); });
    const auto odd_k = first_good(0, k_cap - 1, [&](long long k) { return good(2 * k + 1); });
    if (!even_k || !odd_k) {
      report.diagnostic = std::string("tail bounds fail at the beta cap for ") +
                          (!even_k ? "even" : "odd") + " beta";
      return report;
    }
    const long long q_even = 2 * *even_k;
    const long long q_odd = 2 * *odd_k + 1;
    report.q = std::max({1LL, q_even - 1, q_odd - 1});
    report.pass = true;
    return report;
  }

  // Custom families: exhaustive scan of small beta, then a geometric grid up to
  // the cap. Certification is only as good as the grid.
  constexpr long long kExhaustive = 10'000;
  long long last_bad = 0;
  const long long scan_end = std::min(cap, kExhaustive);
  for (long long beta = 1; beta <= scan_end; ++beta) {
    if (!good(beta)) last_bad = beta;
  }
  long long last_checked = scan_end;
  for (double beta = static_cast<double>(scan_end) * 1.01; beta <= static_cast<double>(cap);
       beta *= 1.01) {
    last_checked = static_cast<long long>(beta);
    if (!good(last_checked)) last_bad = last_checked;
  }
  if (last_bad == last_checked) {
    report.diagnostic = "tail bounds fail at the beta cap " + std::to_string(cap);
    return report;
  }
  report.q = last_bad + 1;
  report.pass = true;
  report.diagnostic = "grid check up to beta " + std::to_string(last_checked);
  return report;
}

}  // namespace steeplab
