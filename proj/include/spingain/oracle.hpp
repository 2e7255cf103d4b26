#pragma once

// Cross-checks of the banded engine against the dense and Monte-Carlo oracles,
// and the self-test suite built on them.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spingain/gain.hpp"

namespace spingain {

struct DenseComparison {
  double banded = 0.0;
  double dense = 0.0;
  double rel_error = 0.0;
};

/// Gain of the same preparation from both engines (N <= 64).
DenseComparison compare_dense(const PreparationSpec& spec, Strategy strategy);

struct McComparison {
  double analytic = 0.0;
  double mc = 0.0;
  double stderr = 0.0;
  /// (mc - analytic) / stderr.
  double z = 0.0;
  /// Largest |z| over all sampled means, second moments and signals.
  double moment_z_max = 0.0;
};

/// Same-shot ballistic noise: analytic phase averaging against sampled
/// shots. MAI uses the echo chitau = -chit.
McComparison compare_mc(const PreparationSpec& spec, Strategy strategy, std::uint64_t seed,
                        std::size_t samples = 100000, unsigned threads = 0);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Small-N oracle suites and unifying-expression consistency checks.
std::vector<Check> run_selftest(unsigned threads = 0);

}  // namespace spingain
