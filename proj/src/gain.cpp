#include "spingain/gain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spingain/asymptotics.hpp"
#include "spingain/optimize.hpp"

namespace spingain {

namespace {

// Pseudo-inverse of the correlation form S Gamma S, S = diag(Var_i^-1/2).
// Observables whose variance is at rounding level of their second moment
// are dropped (S_ii = 0).
struct ScaledPinv {
  Eigen::VectorXd scale;
  Eigen::MatrixXd pinv;
  double condition = 1.0;
};

ScaledPinv scaled_pinv(const GramData& g, double cutoff) {
  const Eigen::Index d = g.gamma.rows();
  ScaledPinv out;
  out.scale = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double var = g.gamma(i, i);
    const double second = var + g.means[i] * g.means[i];
    if (var > 1e-13 * second && var > 0.0) out.scale[i] = 1.0 / std::sqrt(var);
  }
  const Eigen::MatrixXd c = out.scale.asDiagonal() * g.gamma * out.scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const auto& ev = es.eigenvalues();
  out.pinv = Eigen::MatrixXd::Zero(d, d);
  const double top = ev.size() ? ev[ev.size() - 1] : 0.0;
  double smallest = top;
  if (top > 0.0) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (ev[k] <= cutoff * top) continue;
      const auto u = es.eigenvectors().col(k);
      out.pinv += u * u.transpose() / ev[k];
      smallest = std::min(smallest, ev[k]);
    }
    out.condition = top / smallest;
  }
  return out;
}

RayleighResult rayleigh_from(const ScaledPinv& p, const Eigen::VectorXd& v, int n_atoms) {
  RayleighResult r;
  const Eigen::VectorXd vs = p.scale.cwiseProduct(v);
  const Eigen::VectorXd cs = p.pinv * vs;
  r.xi_inv_sq = std::max(0.0, vs.dot(cs)) / n_atoms;
  r.coefficients = p.scale.cwiseProduct(cs);
  r.condition = p.condition;
  r.null_signal = !(r.xi_inv_sq > 0.0);
  return r;
}

Eigen::Vector3d canonical_sign(Eigen::Vector3d n) {
  Eigen::Index i = 0;
  n.cwiseAbs().maxCoeff(&i);
  return n[i] < 0.0 ? Eigen::Vector3d(-n) : n;
}

Eigen::Vector3d sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

RayleighResult rayleigh_gain(const GramData& g, int n_atoms, double cutoff) {
  if (n_atoms < 1) throw std::invalid_argument("rayleigh_gain: N must be >= 1");
  return rayleigh_from(scaled_pinv(g, cutoff), g.v, n_atoms);
}

AxisResult optimize_axis(const GramData& g, int n_atoms, double cutoff) {
  if (n_atoms < 1) throw std::invalid_argument("optimize_axis: N must be >= 1");
  const auto p = scaled_pinv(g, cutoff);
  const Eigen::MatrixXd ws = p.scale.asDiagonal() * g.signal;
  const Eigen::Matrix3d m = ws.transpose() * p.pinv * ws;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (m + m.transpose()));
  const auto& ev = es.eigenvalues();
  AxisResult out;
  out.axis = canonical_sign(es.eigenvectors().col(2).normalized());
  out.degenerate = ev[1] >= ev[2] * (1.0 - 1e-9);
  out.gain = rayleigh_from(p, g.signal * out.axis, n_atoms);
  return out;
}

AxisResult grid_search_axis(const GramData& g, int n_atoms, int n_theta, int n_phi,
                            double axis_tol) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("grid_search_axis: empty grid");
  const auto p = scaled_pinv(g, kPinvCutoff);
  auto f = [&](double th, double ph) {
    return rayleigh_from(p, g.signal * sphere_point(th, ph), n_atoms).xi_inv_sq;
  };
  const double pi = std::numbers::pi;
  double best_th = 0.0, best_ph = 0.0, best = -1.0;
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) {
      const double th = pi * (i + 0.5) / n_theta, ph = 2.0 * pi * j / n_phi;
      const double val = f(th, ph);
      if (val > best) best = val, best_th = th, best_ph = ph;
    }
  double step = pi / n_theta;
  while (step > axis_tol) {
    bool moved = false;
    const double cand[4][2] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
    for (const auto& c : cand) {
      const double val = f(best_th + c[0], best_ph + c[1]);
      if (val > best) {
        best = val, best_th += c[0], best_ph += c[1];
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  AxisResult out;
  out.axis = canonical_sign(sphere_point(best_th, best_ph));
  out.gain = rayleigh_from(p, g.signal * out.axis, n_atoms);
  return out;
}

double qfi_pure(const DickeVector& state, Eigen::Vector3d& axis) {
  const int n = state.n_atoms();
  const auto spins = spin_operators(n, widen(state.window(), kWindowMargin, n));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(spin_covariance(state, spins));
  axis = canonical_sign(es.eigenvectors().col(2));
  return 4.0 * es.eigenvalues()[2];
}

double qfi_pure(const DickeVector& state) {
  Eigen::Vector3d axis;
  return qfi_pure(state, axis);
}

PreparedSystem prepare_system(int n_atoms, double chit, double tail_cutoff) {
  auto state = oat_state(n_atoms, chit, tail_cutoff);
  auto spins = spin_operators(n_atoms, widen(state.window(), kWindowMargin, n_atoms));
  return {std::move(state), std::move(spins)};
}

GainResult strategy_gain(const PreparationSpec& spec, Strategy strategy,
                         std::optional<double> chitau, double tail_cutoff) {
  const int n = spec.n_atoms;
  if (n < 1) throw std::invalid_argument("strategy_gain: N must be >= 1");
  if (!std::isfinite(spec.chit)) throw std::invalid_argument("strategy_gain: chit must be finite");
  if (chitau && strategy != Strategy::MAI)
    throw std::invalid_argument("an echo time only applies to the MAI strategy");

  GainResult r;
  r.n_atoms = n;
  r.chit = spec.chit;
  r.strategy = strategy;
  r.noise = spec.noise;
  r.alpha = spec.alpha;
  r.sigma = spec.sigma;

  const auto sys = prepare_system(n, spec.chit, tail_cutoff);
  if (strategy == Strategy::QFI) {
    if (!spec.noise.noiseless())
      throw std::invalid_argument("the QFI is only available for pure states");
    r.xi_inv_sq = qfi_pure(sys.state, r.axis) / n;
    return r;
  }

  r.chitau = strategy == Strategy::MAI ? chitau.value_or(-spec.chit) : 0.0;
  const auto basis = make_basis(strategy, sys.spins, r.chitau);
  const auto noise = phase_noise(spec.noise, n, spec.chit, r.chitau);
  const auto g = gram_data(sys.state, basis, Eigen::Vector3d::UnitZ(), noise);
  const auto ax = optimize_axis(g, n);
  r.xi_inv_sq = ax.gain.xi_inv_sq;
  r.coefficients = ax.gain.coefficients;
  r.axis = ax.axis;
  r.condition = ax.gain.condition;
  r.degenerate = ax.degenerate;
  r.null_signal = ax.gain.null_signal;
  return r;
}

GainResult optimize_time(int n_atoms, Strategy strategy, const NoiseModel& noise,
                         std::optional<double> hint, double rel_tol) {
  return optimize_time_with(
      [strategy](const PreparationSpec& spec) { return strategy_gain(spec, strategy); }, n_atoms,
      strategy, noise, hint, rel_tol);
}

GainResult optimize_time_with(const GainEvaluator& eval, int n_atoms, Strategy strategy,
                              const NoiseModel& noise, std::optional<double> hint,
                              double rel_tol) {
  if (n_atoms < 4) throw std::invalid_argument("optimize_time: N must be >= 4");
  double lo, hi;
  if (hint || strategy != Strategy::QFI) {
    const double t = hint.value_or(predicted_optimal_time(n_atoms, strategy, noise));
    if (!(t > 0.0)) throw std::invalid_argument("optimize_time: bracket hint must be positive");
    lo = std::log(0.2 * t);
    hi = std::log(5.0 * t);
  } else {
    lo = -std::log(static_cast<double>(n_atoms));
    hi = 0.5 * lo;
  }

  int evaluations = 0;
  auto f = [&](double u) {
    ++evaluations;
    return eval(PreparationSpec::at_time(n_atoms, std::exp(u), noise)).xi_inv_sq;
  };

  const double mid = 0.5 * (lo + hi);
  const double f_lo = f(lo), f_mid = f(mid), f_hi = f(hi);
  GoldenResult best;
  if (f_mid >= f_lo && f_mid >= f_hi) {
    best = golden_section_maximize(f, lo, hi, rel_tol);
  } else {
    constexpr int kGrid = 400;
    int best_i = 0;
    double best_f = -1.0;
    for (int i = 0; i < kGrid; ++i) {
      const double val = f(lo + (hi - lo) * i / (kGrid - 1));
      if (val > best_f) best_f = val, best_i = i;
    }
    const double h = (hi - lo) / (kGrid - 1);
    const double a = lo + h * std::max(0, best_i - 1);
    const double b = lo + h * std::min(kGrid - 1, best_i + 1);
    best = golden_section_maximize(f, a, b, rel_tol);
    if (best.f < best_f) best = {lo + h * best_i, best_f, best.iterations};
  }
  auto r = eval(PreparationSpec::at_time(n_atoms, std::exp(best.x), noise));
  r.iterations = evaluations;
  return r;
}

GramData gram_from_moments(std::span<const double> mean, std::span<const double> second,
                           std::span<const double> signal) {
  const auto d = static_cast<Eigen::Index>(mean.size());
  if (second.size() != mean.size() * mean.size() || signal.size() != mean.size() * 3)
    throw std::invalid_argument("gram_from_moments: inconsistent sizes");
  GramData g;
  g.means = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
  g.gamma.resize(d, d);
  g.signal.resize(d, 3);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) g.gamma(a, b) = second[a * d + b] - mean[a] * mean[b];
    for (int k = 0; k < 3; ++k) g.signal(a, k) = signal[a * 3 + k];
  }
  g.set_axis(Eigen::Vector3d::UnitZ());
  return g;
}

McGain mc_gain(const McMoments& m, int n_atoms) {
  McGain out;
  out.xi_inv_sq = optimize_axis(gram_from_moments(m.mean, m.second, m.signal), n_atoms).gain.xi_inv_sq;
  const std::size_t blocks = m.block_mean.size();
  if (blocks < 2) return out;
  // block weights follow the sample counts (only the last block may be short)
  std::vector<double> count(blocks, static_cast<double>(kMcBlockSize));
  count.back() = static_cast<double>(m.samples - (blocks - 1) * kMcBlockSize);
  const double total = static_cast<double>(m.samples);
  auto leave_out = [&](const std::vector<double>& full, const std::vector<std::vector<double>>& per,
                       std::size_t b) {
    std::vector<double> v(full.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = (full[i] * total - per[b][i] * count[b]) / (total - count[b]);
    return v;
  };
  std::vector<double> g(blocks);
  double mean_g = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto gd = gram_from_moments(leave_out(m.mean, m.block_mean, b),
                                      leave_out(m.second, m.block_second, b),
                                      leave_out(m.signal, m.block_signal, b));
    g[b] = optimize_axis(gd, n_atoms).gain.xi_inv_sq;
    mean_g += g[b] / blocks;
  }
  double ss = 0.0;
  for (double x : g) ss += (x - mean_g) * (x - mean_g);
  out.stderr = std::sqrt((blocks - 1.0) / blocks * ss);
  return out;
}

EchoSweep sweep_echo_time(const PreparationSpec& spec, int grid_points) {
  if (grid_points < 3) throw std::invalid_argument("sweep_echo_time: need at least 3 grid points");
  auto f = [&](double tau) { return strategy_gain(spec, Strategy::MAI, tau).xi_inv_sq; };
  const double lo = -2.0 * spec.chit;
  const double h = -lo / (grid_points - 1);
  int best_i = 0;
  double best_f = -1.0;
  for (int i = 0; i < grid_points; ++i) {
    const double val = f(lo + h * i);
    if (val > best_f) best_f = val, best_i = i;
  }
  const double a = lo + h * std::max(0, best_i - 1);
  const double b = lo + h * std::min(grid_points - 1, best_i + 1);
  auto g = golden_section_maximize(f, a, b, 1e-6 * std::abs(spec.chit));
  EchoSweep out;
  if (g.f >= best_f) {
    out.best_chitau = g.x, out.best_gain = g.f;
  } else {
    out.best_chitau = lo + h * best_i, out.best_gain = best_f;
  }
  out.gain_at_minus_t = f(-spec.chit);
  return out;
}

}  // namespace spingain
