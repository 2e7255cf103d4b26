#pragma once

#include <functional>

namespace spingain {

struct GoldenResult {
  double x = 0.0;
  double f = 0.0;
  int iterations = 0;
};

/// Golden-section maximization of a unimodal f on [lo, hi] until the
/// bracket is narrower than `tol`.
GoldenResult golden_section_maximize(const std::function<double(double)>& f, double lo,
                                     double hi, double tol, int max_iterations = 200);

}  // namespace spingain
