#include "spingain/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace spingain {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::L: return "l";
    case Strategy::NL: return "nl";
    case Strategy::Q: return "q";
    case Strategy::MAI: return "mai";
    case Strategy::QFI: return "qfi";
  }
  return "l";
}

Strategy strategy_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "l") return Strategy::L;
  if (t == "nl") return Strategy::NL;
  if (t == "q") return Strategy::Q;
  if (t == "mai") return Strategy::MAI;
  if (t == "qfi") return Strategy::QFI;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

ObservableBasis make_basis(Strategy label, const SpinOperators& s, double chitau) {
  ObservableBasis b{label, s, {}};
  auto half_anti = [](const BandedOperator& a, const BandedOperator& c) {
    return 0.5 * band_anticommutator(a, c);
  };
  switch (label) {
    case Strategy::L: b.ops = {s.x, s.y, s.z}; break;
    case Strategy::NL: b.ops = {s.y, s.z, half_anti(s.x, s.z)}; break;
    case Strategy::Q:
      b.ops = {s.x,
               s.y,
               s.z,
               band_product(s.x, s.x),
               band_product(s.y, s.y),
               band_product(s.z, s.z),
               half_anti(s.x, s.y),
               half_anti(s.x, s.z),
               half_anti(s.y, s.z)};
      for (auto& op : b.ops) op.set_hermitian(true);
      break;
    case Strategy::MAI:
      b.ops = {twist_conjugate(s.x, chitau), twist_conjugate(s.y, chitau), s.z};
      break;
    case Strategy::QFI: throw std::invalid_argument("the QFI has no observable basis");
  }
  return b;
}

void GramData::set_axis(const Eigen::Vector3d& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) throw std::invalid_argument("rotation axis must be a unit vector");
  axis = n;
  v = signal * n;
}

GramData gram_data(const DickeVector& state, const ObservableBasis& basis,
                   const Eigen::Vector3d& axis, const PhaseNoise& noise) {
  const std::size_t d = basis.ops.size();
  GramData g;
  g.gamma.resize(d, d);
  g.signal.resize(d, 3);
  g.means.resize(d);

  for (std::size_t a = 0; a < d; ++a) {
    const auto parts = band_expectations(state, basis.ops[a]);
    const int K = basis.ops[a].max_band();
    double mu = 0.0;
    for (int k = -K; k <= K; ++k) mu += noise.weight(k) * parts[k + K].real();
    g.means[a] = mu;
  }

  // Re<A B> weighted by total band equals the symmetrized product because
  // the weights are even in the band index.
  for (std::size_t a = 0; a < d; ++a) {
    const auto& A = basis.ops[a];
    for (std::size_t b = a; b < d; ++b) {
      const auto& B = basis.ops[b];
      const auto e = band_pair_expectations(state, A, B);
      const int Ka = A.max_band(), Kb = B.max_band();
      double sec = 0.0;
      for (int ka = -Ka; ka <= Ka; ++ka)
        for (int kb = -Kb; kb <= Kb; ++kb)
          sec += noise.weight(ka + kb) * e[(ka + Ka) * (2 * Kb + 1) + (kb + Kb)].real();
      g.gamma(a, b) = g.gamma(b, a) = sec - g.means[a] * g.means[b];
    }
  }

  // -i<[X, S]> = 2 Im sum_{j,k} w(j,k) <X^(k) S^(j)>
  for (std::size_t a = 0; a < d; ++a) {
    const auto& X = basis.ops[a];
    const int Kx = X.max_band();
    for (int gen = 0; gen < 3; ++gen) {
      const auto& S = basis.generators[gen];
      const int Ks = S.max_band();
      const auto e = band_pair_expectations(state, X, S);
      cplx z{};
      for (int k = -Kx; k <= Kx; ++k)
        for (int j = -Ks; j <= Ks; ++j)
          z += noise.weight(j, k) * e[(k + Kx) * (2 * Ks + 1) + (j + Ks)];
      g.signal(a, gen) = 2.0 * z.imag();
    }
  }
  g.set_axis(axis);
  return g;
}

GramData gram_data(const BandedDensity& rho, const ObservableBasis& basis,
                   const Eigen::Vector3d& axis, const NoiseKernel& echo) {
  const std::size_t d = basis.ops.size();
  GramData g;
  g.gamma.resize(d, d);
  g.signal.resize(d, 3);
  g.means.resize(d);
  auto dress = [&](const BandedOperator& op) {
    return scale_bands(op, [&](int k) { return echo.decay(k); });
  };

  std::vector<BandedOperator> dressed;
  for (const auto& op : basis.ops) dressed.push_back(dress(op));
  for (std::size_t a = 0; a < d; ++a) g.means[a] = expectation(rho, dressed[a]).real();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      const auto prod = dress(0.5 * band_anticommutator(basis.ops[a], basis.ops[b]));
      g.gamma(a, b) = g.gamma(b, a) = expectation(rho, prod).real() - g.means[a] * g.means[b];
    }
  for (std::size_t a = 0; a < d; ++a)
    for (int gen = 0; gen < 3; ++gen)
      g.signal(a, gen) =
          expectation(rho, band_i_commutator(dressed[a], basis.generators[gen])).real();
  g.set_axis(axis);
  return g;
}

Eigen::Matrix3d spin_covariance(const DickeVector& state, const SpinOperators& spins) {
  Eigen::Vector3d mean;
  for (int a = 0; a < 3; ++a) mean[a] = expectation(state, spins[a]).real();
  Eigen::Matrix3d cov;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      const auto e = band_pair_expectations(state, spins[a], spins[b]);
      double sec = 0.0;
      for (const auto& x : e) sec += x.real();
      cov(a, b) = cov(b, a) = sec - mean[a] * mean[b];
    }
  return cov;
}

}  // namespace spingain
