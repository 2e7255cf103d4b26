#pragma once

// One-axis-twisting preparation, collective dephasing kernels, the echo
// (measurement-after-interaction) conjugation and a Monte-Carlo oracle for
// shot-to-shot ballistic dephasing.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spingain/dicke.hpp"

namespace spingain {

enum class NoiseKind { none, ballistic, diffusive };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

/// Coherence decay for one evolution segment: band k decays by
/// exp(-variance * k^2 / 2).
struct NoiseKernel {
  NoiseKind kind = NoiseKind::none;
  double epsilon = 0.0;
  double gamma = 0.0;
  double variance = 0.0;

  double decay(int k) const;
};

NoiseKernel identity_kernel();
/// Gaussian shot-to-shot field D with <D^2> = eps N^gamma over a segment of
/// twisting time chit_total: variance = eps N^gamma chit_total^2.
NoiseKernel ballistic_kernel(int n_atoms, double chit_total, double epsilon, double gamma);
/// Lindblad S_z dephasing at rate eps*chi over time chit: variance = eps chit.
NoiseKernel diffusive_kernel(int n_atoms, double chit, double epsilon);

/// User-level noise description (what a run is configured with).
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double epsilon = 0.0;
  double gamma = 0.0;
  /// Ballistic only: one D per shot shared by preparation and echo.
  bool same_shot = true;

  bool noiseless() const { return kind == NoiseKind::none || epsilon == 0.0; }
};

/// Kernel of a single evolution segment of length |chit| under `noise`.
NoiseKernel segment_kernel(const NoiseModel& noise, int n_atoms, double chit);

/// Joint Gaussian phase statistics of preparation and echo.
///
/// A contraction term whose generator band is j and whose measured-operator
/// band is k picks up the random phase D_p (j + k) + D_e k; its average is
/// exp(-[prep_var (j+k)^2 + 2 cross_cov (j+k) k + echo_var k^2] / 2).
struct PhaseNoise {
  double prep_var = 0.0;
  double echo_var = 0.0;
  double cross_cov = 0.0;

  double weight(int generator_band, int observable_band) const;
  /// Weight of a term with no generator insertion (means, second moments).
  double weight(int observable_band) const { return weight(0, observable_band); }
  bool trivial() const { return prep_var == 0.0 && echo_var == 0.0 && cross_cov == 0.0; }
};

PhaseNoise phase_noise(const NoiseModel& noise, int n_atoms, double chit, double chitau);

struct PreparationSpec {
  int n_atoms = 0;
  double chit = 0.0;
  std::optional<double> alpha;
  std::optional<double> sigma;
  NoiseModel noise;

  /// chit = sigma * N^-alpha.
  static PreparationSpec from_scaling(int n_atoms, double alpha, double sigma,
                                      NoiseModel noise = {});
  static PreparationSpec at_time(int n_atoms, double chit, NoiseModel noise = {});
};

/// Default probability cutoff used when the engine truncates Dicke tails.
inline constexpr double kTailCutoff = 1e-36;
/// Levels added around the state support so banded products stay exact.
inline constexpr std::size_t kWindowMargin = 10;

/// exp(-i chit S_z^2) applied to the x-coherent state.
DickeVector oat_state(int n_atoms, double chit, double tail_cutoff = 0.0);

/// Density after noisy twisting; coherences kept up to `max_band`.
BandedDensity prepare_noisy(const PreparationSpec& spec, int max_band = 8,
                            double tail_cutoff = 0.0);

/// U^dag A U with U = exp(-i chitau S_z^2): band k gains exp(i chitau (2mk + k^2))
/// on element (m + k, m).
BandedOperator twist_conjugate(const BandedOperator& a, double chitau);

/// Collective rotation exp(-i phi S_z) conjugation, V^dag A V: band k gains
/// exp(i phi k).
BandedOperator rotate_z_conjugate(const BandedOperator& a, double phi);

/// Echo observable U^dag S_m U on the full window.
BandedOperator mai_observable(int n_atoms, const std::array<double, 3>& m, double chitau);
BandedOperator mai_observable(const SpinOperators& s, const std::array<double, 3>& m,
                              double chitau);

/// Noise-dressed echo observable.
///
/// For Markovian echo noise (diffusive, or ballistic with independent D) the
/// adjoint channel is applied to the bands of `op`. For same-shot ballistic
/// noise `op` is the bare conjugated observable and `echo_phase_per_band`
/// is the coefficient of D in the phase of band k (|chitau| per unit k), to be
/// averaged jointly with the preparation phase by the moment engine.
struct DressedObservable {
  BandedOperator op;
  double echo_phase_per_band = 0.0;
};

DressedObservable mai_effective_observable_noisy(const SpinOperators& s,
                                                 const std::array<double, 3>& m,
                                                 double chitau, const NoiseModel& noise);

// ---------------------------------------------------------------------------
// Monte-Carlo oracle for ballistic dephasing

struct McRequest {
  int n_atoms = 0;
  double chit = 0.0;
  double chitau = 0.0;  ///< 0 means no echo stage
  double epsilon = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples = 100000;
  /// Readout operators (before echo conjugation), on the full window.
  std::vector<BandedOperator> readout;
  unsigned threads = 0;  ///< 0 = default
};

/// Sample averages with standard errors. Second moments are the symmetrized
/// products 1/2<{X_a, X_b}>, signals are -i<[X_a, S_g]> for g = x, y, z.
struct McMoments {
  std::size_t samples = 0;
  std::vector<double> mean, mean_err;          // d
  std::vector<double> second, second_err;      // d*d row-major
  std::vector<double> signal, signal_err;      // d*3 row-major
  /// Per-block averages (fixed block partition) for jackknife estimates.
  std::vector<std::vector<double>> block_mean, block_second, block_signal;
  /// Per-block Var(S_y) estimates are derivable from these.
};

inline constexpr std::size_t kMcBlockSize = 1000;

/// Each sample draws D ~ Normal(0, eps N^gamma) and runs the full pure-state
/// pipeline: preparation phases chit (m^2 + D m), echo twist chitau with noise
/// phase |chitau| D m (the noise does not reverse with the twist).
McMoments ballistic_mc_oracle(const McRequest& request);

}  // namespace spingain
