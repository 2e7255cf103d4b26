#include "spingain/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace spingain {

GoldenResult golden_section_maximize(const std::function<double(double)>& f, double lo,
                                     double hi, double tol, int max_iterations) {
  if (!(hi > lo)) throw std::invalid_argument("golden_section_maximize: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a > tol && it < max_iterations) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  return fc >= fd ? GoldenResult{c, fc, it} : GoldenResult{d, fd, it};
}

}  // namespace spingain
