#include "spingain/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spingain/optimize.hpp"

namespace spingain {

namespace {

bool noisy(const NoiseModel& noise) { return !noise.noiseless(); }

void check_alpha_sigma(double alpha, double sigma) {
  if (!(alpha >= 0.5 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [1/2, 1]");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

// Power of chit in M for the finite-measurement strategies.
int measurement_power(Strategy s) {
  switch (s) {
    case Strategy::L: return 6;
    case Strategy::NL: return 10;
    case Strategy::Q: return 14;
    default: return 0;
  }
}

int noise_power(NoiseKind k) { return k == NoiseKind::ballistic ? 2 : 1; }

double noiseless_optimal_time(double n, Strategy s) {
  switch (s) {
    case Strategy::L: return std::pow(3.0, 1.0 / 6.0) * std::pow(n, -2.0 / 3.0);
    case Strategy::NL:
      return std::pow(2.5, 0.1) * std::pow(3.0, 0.3) * std::pow(n, -0.6);
    case Strategy::Q:
      return std::pow(7.0 / 6.0, 1.0 / 14.0) * std::pow(5.0, 3.0 / 14.0) *
             std::pow(n, -4.0 / 7.0);
    default: return 1.0 / std::sqrt(n);
  }
}

}  // namespace

double critical_alpha(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  return (1.0 + gamma) / 2.0;
}

double measurement_penalty(Strategy s, double n, double x) {
  switch (s) {
    case Strategy::L: return std::pow(n, 4) * std::pow(x, 6) / 6.0;
    case Strategy::NL: return std::pow(n, 6) * std::pow(x, 10) / 270.0;
    case Strategy::Q: return std::pow(n, 8) * std::pow(x, 14) / 875.0;
    default: return 0.0;
  }
}

double noise_penalty(Strategy s, const NoiseModel& noise, double n, double x) {
  if (!noisy(noise)) return 0.0;
  const bool mai = s == Strategy::MAI;
  if (noise.kind == NoiseKind::ballistic)
    return (mai ? 4.0 : 1.0) * noise.epsilon * std::pow(n, 1.0 + noise.gamma) * x * x;
  return (mai ? 2.0 : 1.0) * noise.epsilon * n * x;
}

double unified_gain(double n, double x, Strategy s, const NoiseModel& noise) {
  if (!(x > 0.0)) throw std::invalid_argument("unified_gain: chit must be positive");
  return n * n * x * x / (1.0 + measurement_penalty(s, n, x) + noise_penalty(s, noise, n, x));
}

ScalingLaw scaling_law(Strategy s, const NoiseModel& noise, double alpha, double sigma) {
  check_alpha_sigma(alpha, sigma);
  ScalingLaw law;
  law.strategy = s;
  law.noise = noise.noiseless() ? NoiseKind::none : noise.kind;
  const double s2 = sigma * sigma;
  const bool edge = alpha == 0.5;

  if (s == Strategy::L || s == Strategy::NL || s == Strategy::Q) {
    if (noisy(noise)) throw std::invalid_argument("scaling_law: no closed form for noisy finite strategies");
    // time-optimized laws; alpha and sigma do not enter
    const double p = measurement_power(s);
    const double k = (p - 2.0) / 2.0;  // N^(2k) x^p / c
    const double c = s == Strategy::L ? 6.0 : s == Strategy::NL ? 270.0 : 875.0;
    // optimum of x^2 / (1 + N^2k x^p / c): N^2k x^p / c = 2 / (p - 2)
    const double m = 2.0 / (p - 2.0);
    const double x_scaled = std::pow(m * c, 1.0 / p);  // x = x_scaled * N^(-2k/p)
    law.exponent = 2.0 - 4.0 * k / p;
    law.prefactor = x_scaled * x_scaled / (1.0 + m);
    law.alpha_min = law.alpha_max = 2.0 * k / p;
    law.source = "unified optimum";
    return law;
  }

  if (law.noise == NoiseKind::none) {
    law.exponent = 2.0 - 2.0 * alpha;
    if (edge) {
      law.prefactor = s == Strategy::QFI ? 0.5 * (1.0 - std::exp(-2.0 * s2)) : s2 * std::exp(-s2);
      law.alpha_max = 0.5;
      law.source = s == Strategy::QFI ? "qfi edge" : "mai edge";
    } else {
      law.prefactor = s2;
      law.alpha_min = alpha;
      law.source = s == Strategy::QFI ? "qfi" : "mai";
    }
    return law;
  }
  if (s == Strategy::QFI) throw std::invalid_argument("scaling_law: QFI law is noiseless only");

  const double eps = noise.epsilon;
  if (noise.kind == NoiseKind::ballistic) {
    const double ac = critical_alpha(noise.gamma);
    if (alpha > ac) {
      law.exponent = 2.0 - 2.0 * alpha;
      law.prefactor = s2;
      law.alpha_min = ac;
      law.source = "ballistic short-time";
    } else if (alpha == ac) {
      law.exponent = 1.0 - noise.gamma;
      law.prefactor = s2 / (1.0 + 4.0 * eps * s2);
      law.alpha_min = law.alpha_max = ac;
      law.source = "ballistic critical";
    } else {
      law.exponent = 1.0 - noise.gamma;
      law.prefactor = 1.0 / (4.0 * eps);
      law.alpha_max = ac;
      law.source = "ballistic plateau";
    }
    // the alpha = 1/2 echo keeps the exp(-sigma^2) contrast loss
    if (edge) law.prefactor *= std::exp(-s2);
    return law;
  }

  // diffusive
  law.exponent = 1.0 - alpha;
  if (edge) {
    law.prefactor = sigma * std::exp(-s2) / (2.0 * eps);
    law.alpha_max = 0.5;
    law.source = "diffusive edge";
  } else {
    law.prefactor = sigma / (2.0 * eps);
    law.source = "diffusive";
  }
  return law;
}

double predicted_gain(Strategy s, const NoiseModel& noise, double n, double alpha, double sigma) {
  check_alpha_sigma(alpha, sigma);
  if (s == Strategy::L || s == Strategy::NL || s == Strategy::Q)
    return unified_gain(n, sigma * std::pow(n, -alpha), s, noise);
  if (s == Strategy::QFI && noisy(noise))
    throw std::invalid_argument("predicted_gain: QFI law is noiseless only");

  const double s2 = sigma * sigma;
  const bool edge = alpha == 0.5;
  if (!noisy(noise)) {
    if (edge) return (s == Strategy::QFI ? 0.5 * (1.0 - std::exp(-2.0 * s2)) : s2 * std::exp(-s2)) * n;
    return s2 * std::pow(n, 2.0 - 2.0 * alpha);
  }
  const double eps = noise.epsilon;
  if (noise.kind == NoiseKind::ballistic) {
    // interpolating form sigma^2 N^(2-2a) / (1 + 4 eps sigma^2 N^(1+g-2a))
    const double contrast = edge ? std::exp(-s2) : 1.0;
    const double x = sigma * std::pow(n, -alpha);
    return contrast * n * n * x * x /
           (1.0 + 4.0 * eps * std::pow(n, 1.0 + noise.gamma) * x * x);
  }
  if (edge) return sigma * std::exp(-s2) / (2.0 * eps) * std::sqrt(n);
  return sigma / (2.0 * eps) * std::pow(n, 1.0 - alpha);
}

UnifiedOptimum optimize_unified(double n, Strategy s, const NoiseModel& noise) {
  if (!(n > 1.0)) throw std::invalid_argument("optimize_unified: N must exceed 1");
  const int p = measurement_power(s);
  if (p == 0) {
    const double x = 1.0 / std::sqrt(n);
    return {x, unified_gain(n, x, s, noise), 0, false};
  }
  const int q = noise_power(noise.kind);
  auto log_gain = [&](double u) { return std::log(unified_gain(n, std::exp(u), s, noise)); };
  // d ln f / d ln x = 2 - (p M + q B) / (1 + M + B)
  auto slope = [&](double u) {
    const double x = std::exp(u);
    const double m = measurement_penalty(s, n, x);
    const double b = noise_penalty(s, noise, n, x);
    return 2.0 - (p * m + q * b) / (1.0 + m + b);
  };
  const double u0 = std::log(noiseless_optimal_time(n, s));
  auto g = golden_section_maximize(log_gain, u0 - 20.0, u0 + 2.0, 1e-6);
  int iterations = g.iterations;

  // The slope is strictly decreasing in u, so bisection on its root is safe.
  double lo = g.x - 1e-3, hi = g.x + 1e-3;
  while (slope(lo) < 0.0) lo -= 1.0;
  while (slope(hi) > 0.0) hi += 1.0;
  for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
    ++iterations;
  }
  const double x = std::exp(0.5 * (lo + hi));
  return {x, unified_gain(n, x, s, noise), iterations, true};
}

double predicted_optimal_time(double n, Strategy s, const NoiseModel& noise) {
  if (s == Strategy::L || s == Strategy::NL || s == Strategy::Q) {
    if (!noisy(noise)) return noiseless_optimal_time(n, s);
    return optimize_unified(n, s, noise).chit;
  }
  if (s == Strategy::MAI && noisy(noise)) {
    if (noise.kind == NoiseKind::ballistic)
      return std::pow(2.0 * noise.epsilon, -0.25) * std::pow(n, -0.5 - noise.gamma / 4.0);
    return 1.0 / std::sqrt(2.0 * n);
  }
  return 1.0 / std::sqrt(n);
}

double predicted_optimum_gain(double n, Strategy s, const NoiseModel& noise) {
  if (s == Strategy::L || s == Strategy::NL || s == Strategy::Q)
    return optimize_unified(n, s, noise).gain;
  if (s == Strategy::QFI) return std::numeric_limits<double>::quiet_NaN();
  if (!noisy(noise)) return n / std::exp(1.0);
  const double eps = noise.epsilon;
  if (noise.kind == NoiseKind::ballistic) {
    if (noise.gamma > 0.0) return std::pow(n, 1.0 - noise.gamma) / (4.0 * eps);
    // gamma = 0: both branches scale as N; take the better alpha = 1/2 sigma
    auto f = [&](double sg) { return predicted_gain(s, noise, n, 0.5, sg); };
    return golden_section_maximize(f, 1e-3, 4.0, 1e-10).f;
  }
  // sigma e^{-sigma^2} is largest at sigma = 1/sqrt 2
  return predicted_gain(s, noise, n, 0.5, 1.0 / std::sqrt(2.0));
}

}  // namespace spingain
