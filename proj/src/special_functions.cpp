#include "fracblow/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracblow/error.hpp"

namespace fracblow {
namespace {

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

constexpr double kGammaMax = 171.6;

double lanczos_gamma(double x) {
  // Gamma(x) for x >= 0.5.
  const double xm1 = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) series += kLanczos[k] / (xm1 + double(k));
  const double t = xm1 + kLanczosG + 0.5;
  // Split the power so that t^(x-1/2) e^-t does not overflow before the product.
  const double half_power = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * series * (half_power * std::exp(-t)) * half_power;
}

// 1/Gamma(y) for any real y; zero at the poles.
double reciprocal_gamma(double y) {
  if (y > kGammaMax) return 0.0;
  if (y > 0.0) return 1.0 / gamma(y);
  const double n = std::round(y);
  if (y == n) return 0.0;
  if (1.0 - y > kGammaMax) return 0.0;  // |1/Gamma| underflows long before this matters
  // Reflection: 1/Gamma(y) = sin(pi y) Gamma(1-y) / pi, with the sine reduced exactly.
  const double frac = y - n;
  double s = std::sin(std::numbers::pi * frac);
  if (std::fmod(std::abs(n), 2.0) == 1.0) s = -s;
  return s * gamma(1.0 - y) / std::numbers::pi;
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Contour parameters: s(u) = mu (1 + i u)^2, u = k h, |k| <= kContourNodes.
constexpr double kContourMu = 4.0;
constexpr double kContourStep = 0.12;
constexpr int kContourNodes = 28;

constexpr int kAsymptoticTerms = 64;
constexpr double kSeriesRadius = 1.0;

}  // namespace

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be positive, got " + std::to_string(x));
  if (x > kGammaMax) throw OverflowError("gamma: argument " + std::to_string(x) + " overflows");
  if (x < 0.5) return lanczos_gamma(x + 1.0) / x;
  return lanczos_gamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be positive, got " + std::to_string(x));
  double shift = 0.0;
  while (x < 8.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli tail: -sum B_2k / (2k x^2k), k = 1..7
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

void MlfParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError("Mittag-Leffler: alpha must lie in (0,1], got " + std::to_string(alpha));
  if (!(beta > 0.0))
    throw ParameterError("Mittag-Leffler: beta must be positive, got " + std::to_string(beta));
}

MittagLeffler::MittagLeffler(MlfParams params) : params_(params) {
  params_.validate();
  const double a = params_.alpha;
  const double b = params_.beta;

  // Series coefficients until 1/Gamma(alpha k + beta) is negligible for |z| <= kSeriesRadius.
  for (int k = 0;; ++k) {
    const double arg = a * k + b;
    const double c = reciprocal_gamma(arg);
    inv_gamma_series_.push_back(c);
    if (arg > 24.0) break;
  }

  inv_gamma_asym_.resize(kAsymptoticTerms + 1, 0.0);
  log_envelope_.resize(kAsymptoticTerms + 1, 0.0);
  for (int k = 1; k <= kAsymptoticTerms; ++k) {
    inv_gamma_asym_[k] = reciprocal_gamma(b - a * k);
    // |1/Gamma(y)| = |sin(pi y)| Gamma(1 - y) / pi <= Gamma(1 - y) / pi, and 1/Gamma < 1.2 on y >= 0.5
    const double y = b - a * k;
    log_envelope_[k] = (y < 0.5) ? std::lgamma(1.0 - y) - std::log(std::numbers::pi) : std::log(1.2);
  }
  terminating_ = (a == 1.0 && b == std::round(b));

  const double h = kContourStep;
  node_weight_.reserve(kContourNodes + 1);
  node_s_alpha_.reserve(kContourNodes + 1);
  for (int k = 0; k <= kContourNodes; ++k) {
    const std::complex<double> w(1.0, h * k);
    const std::complex<double> s = kContourMu * w * w;
    const std::complex<double> ds = 2.0 * kContourMu * std::complex<double>(0.0, 1.0) * w;
    const double fold = (k == 0) ? 1.0 : 2.0;
    node_weight_.push_back(fold * h / (2.0 * std::numbers::pi) * std::exp(s) * ds *
                           std::pow(s, a - b));
    node_s_alpha_.push_back(std::pow(s, a));
  }
}

double MittagLeffler::operator()(double z) const {
  if (std::isnan(z)) return z;
  if (z == 0.0) return inv_gamma_series_[0];
  if (z > 0.0) {
    if (params_.alpha == 1.0 && params_.beta == 1.0) return std::exp(z);
    return positive_series(z);
  }
  const double x = -z;
  if (x <= kSeriesRadius) return alternating_series(z);
  if (params_.alpha == 1.0) return unit_alpha_negative(x);
  double value = 0.0;
  if (asymptotic(x, value)) return value;
  return contour(x);
}

double MittagLeffler::positive_series(double z) const {
  const double a = params_.alpha;
  const double b = params_.beta;
  const double log_z = std::log(z);
  CompensatedSum acc;
  double previous = 0.0;
  for (long k = 0; k < 50'000'000; ++k) {
    const double arg = a * double(k) + b;
    double term;
    if (k < long(inv_gamma_series_.size()) && arg <= 24.0)
      term = std::pow(z, double(k)) * inv_gamma_series_[k];
    else
      term = std::exp(double(k) * log_z - std::lgamma(arg));
    acc.add(term);
    if (!std::isfinite(acc.sum))
      throw OverflowError("Mittag-Leffler: E(" + std::to_string(z) + ") overflows");
    if (k > 0 && term < previous && term <= 1e-17 * acc.sum) break;
    previous = term;
  }
  return acc.value();
}

double MittagLeffler::alternating_series(double z) const {
  CompensatedSum acc;
  double power = 1.0;
  for (double c : inv_gamma_series_) {
    acc.add(power * c);
    power *= z;
  }
  return acc.value();
}

bool MittagLeffler::asymptotic(double x, double& value) const {
  // E(-x) ~ sum_{k>=1} (-1)^(k+1) x^-k / Gamma(beta - alpha k)
  const double log_x = std::log(x);
  const double inv_x = 1.0 / x;
  CompensatedSum acc;
  double power = 1.0;
  double previous_bound = std::numeric_limits<double>::infinity();
  double bound = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kAsymptoticTerms; ++k) {
    power *= inv_x;
    const double next_bound = std::exp(log_envelope_[k] - k * log_x);
    if (next_bound > previous_bound && k > 1) break;  // optimal truncation reached
    previous_bound = next_bound;
    acc.add(((k % 2 == 1) ? 1.0 : -1.0) * power * inv_gamma_asym_[k]);
    bound = (k < kAsymptoticTerms) ? std::exp(log_envelope_[k + 1] - (k + 1) * log_x) : next_bound;
    if (terminating_ && double(k) >= params_.beta) {
      bound = 0.0;
      break;
    }
    if (bound <= 1e-17 * std::abs(acc.sum)) break;
  }
  value = acc.value();
  return value != 0.0 && bound <= 2e-16 * std::abs(value);
}

double MittagLeffler::contour(double x) const {
  double total = 0.0;
  for (std::size_t k = 0; k < node_weight_.size(); ++k)
    total += (node_weight_[k] / (node_s_alpha_[k] + x)).imag();
  return total;
}

double MittagLeffler::unit_alpha_negative(double x) const {
  const double b = params_.beta;
  if (b == 1.0) return std::exp(-x);
  if (x > 50.0) {
    double value = 0.0;
    if (asymptotic(x, value)) return value;
  }
  if (b < 1.0) {
    const MittagLeffler shifted(MlfParams{1.0, b + 1.0});
    return inv_gamma_series_[0] - x * shifted(-x);
  }
  // Kummer: 1F1(1; b; -x) = e^-x 1F1(b-1; b; x), all terms positive.
  CompensatedSum acc;
  double poisson = std::exp(-x);
  for (int k = 0; k < 100000; ++k) {
    const double term = poisson * (b - 1.0) / (b - 1.0 + k);
    acc.add(term);
    if (k > x && term <= 1e-17 * acc.sum) break;
    poisson *= x / double(k + 1);
  }
  return acc.value() * inv_gamma_series_[0];
}

double mittag_leffler(const MlfParams& params, double z) { return MittagLeffler(params)(z); }

}  // namespace fracblow
