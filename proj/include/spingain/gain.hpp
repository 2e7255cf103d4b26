#pragma once

// Quantum gain xi^-2 = |<[X, S_n]>|^2 / (N Var X) maximized over the
// observable coefficients and the rotation axis.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>

#include "spingain/channels.hpp"
#include "spingain/moments.hpp"

namespace spingain {

inline constexpr double kPinvCutoff = 1e-12;

struct RayleighResult {
  double xi_inv_sq = 0.0;
  Eigen::VectorXd coefficients;
  /// Ratio of the largest to the smallest kept eigenvalue of the rescaled Gram matrix.
  double condition = 1.0;
  /// Set when the signal vector vanishes (gain reported as 0).
  bool null_signal = false;
};

/// v^T Gamma^+ v / N with Gamma^+ a pseudo-inverse (relative cutoff `cutoff`
/// on the diagonally rescaled Gram matrix). Coefficients are Gamma^+ v.
RayleighResult rayleigh_gain(const GramData& g, int n_atoms, double cutoff = kPinvCutoff);

struct AxisResult {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  RayleighResult gain;
  /// The best axis is not unique (top two eigenvalues within 1e-9).
  bool degenerate = false;
};

/// Best rotation axis. The signal is linear in n, so the maximum over unit n
/// is the top eigenvector of W^T Gamma^+ W.
AxisResult optimize_axis(const GramData& g, int n_atoms, double cutoff = kPinvCutoff);

/// Brute-force oracle: spherical grid (n_theta x n_phi) followed by a
/// shrinking local pattern search down to `axis_tol`.
AxisResult grid_search_axis(const GramData& g, int n_atoms, int n_theta = 24, int n_phi = 48,
                            double axis_tol = 1e-8);

struct GainResult {
  double xi_inv_sq = 0.0;
  Eigen::VectorXd coefficients;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  int n_atoms = 0;
  double chit = 0.0;
  double chitau = 0.0;
  Strategy strategy = Strategy::L;
  NoiseModel noise;
  std::optional<double> alpha;
  std::optional<double> sigma;
  double condition = 1.0;
  int iterations = 0;
  bool degenerate = false;
  bool null_signal = false;
};

/// Pure-state Fisher information for rotations about the best axis:
/// 4 * largest eigenvalue of the spin covariance matrix.
double qfi_pure(const DickeVector& state);
/// Same, also returning the optimal generator axis.
double qfi_pure(const DickeVector& state, Eigen::Vector3d& axis);

/// Engine state and operators for a preparation: the truncated OAT state and
/// spin operators on a window widened by kWindowMargin.
struct PreparedSystem {
  DickeVector state;
  SpinOperators spins;
};
PreparedSystem prepare_system(int n_atoms, double chit, double tail_cutoff = kTailCutoff);

/// Gain of one strategy at one preparation. MAI uses chitau = -chit unless
/// given; other strategies reject an echo time. QFI is noiseless only and
/// reports F_Q / N.
GainResult strategy_gain(const PreparationSpec& spec, Strategy strategy,
                         std::optional<double> chitau = std::nullopt,
                         double tail_cutoff = kTailCutoff);

/// Maximizes the gain over log(chit) by golden section inside 0.2x..5x of
/// `hint` (or of the asymptotic prediction), falling back to a 400-point log
/// grid when the bracket is not unimodal.
GainResult optimize_time(int n_atoms, Strategy strategy, const NoiseModel& noise = {},
                         std::optional<double> hint = std::nullopt, double rel_tol = 1e-6);

using GainEvaluator = std::function<GainResult(const PreparationSpec&)>;
/// optimize_time with a caller-supplied gain evaluation (e.g. the dense oracle).
GainResult optimize_time_with(const GainEvaluator& eval, int n_atoms, Strategy strategy,
                              const NoiseModel& noise = {},
                              std::optional<double> hint = std::nullopt, double rel_tol = 1e-6);

struct McGain {
  double xi_inv_sq = 0.0;
  /// Jackknife standard error over the Monte-Carlo blocks.
  double stderr = 0.0;
};

/// Gram data assembled from Monte-Carlo moments.
GramData gram_from_moments(std::span<const double> mean, std::span<const double> second,
                           std::span<const double> signal);
/// Axis-optimized gain of Monte-Carlo moments with a block jackknife error.
McGain mc_gain(const McMoments& moments, int n_atoms);

struct EchoSweep {
  double best_chitau = 0.0;
  double best_gain = 0.0;
  double gain_at_minus_t = 0.0;
};

/// Scans chitau over [-2 chit, 0] (grid points plus golden refinement).
EchoSweep sweep_echo_time(const PreparationSpec& spec, int grid_points = 41);

}  // namespace spingain
