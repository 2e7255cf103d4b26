#pragma once

// Sweeps over N (and alpha), power-law fits and the datasets behind the
// scaling figures.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spingain/channels.hpp"
#include "spingain/moments.hpp"

namespace spingain {

enum class TimePolicy { optimize, scaling, fixed };

std::string to_string(TimePolicy p);
TimePolicy time_policy_from_string(const std::string& s);

struct SweepRecord {
  int n_atoms = 0;
  /// Strategy name, or "sql" / "hl" for reference rows.
  std::string strategy;
  NoiseModel noise;
  double alpha = 0.0;
  double sigma = 0.0;
  double chit = 0.0;
  double chitau = 0.0;
  double xi_inv_sq = 0.0;
  double xi_inv_sq_pred = 0.0;
  /// F_Q / N of the pure state; NaN under noise.
  double fq_over_n = 0.0;
  double seconds = 0.0;
  /// Empty when the point succeeded.
  std::string error;

  bool ok() const { return error.empty(); }
};

struct SweepRequest {
  Strategy strategy = Strategy::L;
  NoiseModel noise;
  std::vector<int> n_values;
  TimePolicy policy = TimePolicy::optimize;
  double alpha = 0.5;
  double sigma = 1.0;
  double chit = 0.0;  ///< TimePolicy::fixed only
  unsigned threads = 0;
  /// Record wall time per point; off by default so output is reproducible.
  bool timing = false;
};

/// One record per N in canonical (input) order; failures are recorded and
/// the sweep continues. Throws std::invalid_argument unless the N list is
/// strictly increasing.
std::vector<SweepRecord> sweep_n(const SweepRequest& request);

/// Single record for explicit parameters (used by sweeps and figures).
SweepRecord evaluate_point(Strategy strategy, const NoiseModel& noise, int n_atoms,
                           TimePolicy policy, double alpha, double sigma, double chit,
                           bool timing = false);

struct ScalingFit {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double log_prefactor = 0.0;
  double residual_rms = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  std::size_t points = 0;
  std::vector<std::string> warnings;
};

/// Unweighted least squares of log gain against log N. By default only the
/// upper half of the N range is used (at least 4 points).
ScalingFit fit_power_law(std::span<const double> n, std::span<const double> gain,
                         bool top_half = true);
/// Same on sweep records; failed or non-positive records are excluded with
/// a warning.
ScalingFit fit_exponent(const std::vector<SweepRecord>& records, bool top_half = true);

enum class Figure { fig1a, fig1b, fig2 };

std::string to_string(Figure f);
Figure figure_from_string(const std::string& s);

struct FigureOptions {
  /// Empty means the figure default.
  std::vector<int> n_values;
  std::vector<double> gammas;
  double epsilon = 0.05;
  double gamma = 0.65;
  double sigma = 1.0;
  double alpha_step = 0.01;
  unsigned threads = 0;
  bool timing = false;
};

std::vector<int> default_figure_n(Figure f);

/// fig1a: L/NL/Q (optimized time), MAI at alpha = 1/2, SQL and HL rows.
/// fig1b: MAI under ballistic noise (optimized time) for several gamma.
/// fig2: MAI ballistic gains over an alpha grid at fixed sigma.
std::vector<SweepRecord> figure_data(Figure f, const FigureOptions& options = {});

/// Total alpha-length (piecewise-linear interpolation) over which `values`
/// lies within [lo, hi].
double crossover_width(std::span<const double> alpha, std::span<const double> values,
                       double lo = 0.25, double hi = 0.75);

struct CrossoverRow {
  int n_atoms = 0;
  double width = 0.0;
};

/// Crossover width of the plateau-normalized gain xi^-2 / (N^(1-gamma) / 4 eps)
/// for each N present in fig2 records.
std::vector<CrossoverRow> fig2_crossover(const std::vector<SweepRecord>& records);

/// xi^-2 / (N^(1-gamma) / 4 eps) and xi^-2 / N^(2 - 2 alpha).
double plateau_normalized(const SweepRecord& r);
double short_time_normalized(const SweepRecord& r);

}  // namespace spingain
