#pragma once

// Large-N scaling laws for the quantum gain and the unifying
// N^2 (chi t)^2 / (1 + M + B) expression.

#include <string>

#include "spingain/channels.hpp"
#include "spingain/moments.hpp"

namespace spingain {

/// gain ~ prefactor * N^exponent, valid for alpha in [alpha_min, alpha_max].
struct ScalingLaw {
  Strategy strategy = Strategy::MAI;
  NoiseKind noise = NoiseKind::none;
  double exponent = 0.0;
  double prefactor = 0.0;
  double alpha_min = 0.5;
  double alpha_max = 1.0;
  std::string source;
};

/// Critical preparation exponent (1 + gamma) / 2 for ballistic dephasing.
double critical_alpha(double gamma);

/// Piecewise large-N gain at chi t = sigma N^-alpha.
///
/// MAI and QFI use the echo/Fisher laws (the alpha = 1/2 branch is selected by
/// exact equality); L, NL and Q evaluate the unifying expression at that time.
/// Throws std::invalid_argument for alpha outside [1/2, 1] or sigma <= 0.
double predicted_gain(Strategy strategy, const NoiseModel& noise, double n_atoms, double alpha,
                      double sigma);

/// Leading power law of predicted_gain at the given alpha and sigma.
ScalingLaw scaling_law(Strategy strategy, const NoiseModel& noise, double alpha, double sigma);

/// Measurement penalty M of the unifying expression (0 for MAI and QFI).
double measurement_penalty(Strategy strategy, double n_atoms, double chit);
/// Noise penalty B of the unifying expression.
double noise_penalty(Strategy strategy, const NoiseModel& noise, double n_atoms, double chit);
/// N^2 (chi t)^2 / (1 + M + B).
double unified_gain(double n_atoms, double chit, Strategy strategy, const NoiseModel& noise);

struct UnifiedOptimum {
  double chit = 0.0;
  double gain = 0.0;
  int iterations = 0;
  /// false when the expression is monotone and the optimum sits at the
  /// validity edge chi t = N^-1/2.
  bool interior = true;
};

/// Maximizes the unifying expression over chi t: golden-section on log t,
/// then a bisection polish on the analytic log-derivative.
UnifiedOptimum optimize_unified(double n_atoms, Strategy strategy, const NoiseModel& noise);

/// Asymptotic optimal preparation time used to bracket numeric searches.
double predicted_optimal_time(double n_atoms, Strategy strategy, const NoiseModel& noise);

/// Asymptotic gain after optimizing the preparation time.
double predicted_optimum_gain(double n_atoms, Strategy strategy, const NoiseModel& noise);

}  // namespace spingain
