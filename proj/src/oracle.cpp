#include "spingain/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "spingain/asymptotics.hpp"
#include "spingain/dense.hpp"
#include "spingain/parallel.hpp"

namespace spingain {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

DenseComparison compare_dense(const PreparationSpec& spec, Strategy strategy) {
  DenseComparison c;
  c.banded = strategy_gain(spec, strategy).xi_inv_sq;
  c.dense = dense::strategy_gain(spec, strategy).xi_inv_sq;
  c.rel_error = rel_diff(c.banded, c.dense);
  return c;
}

McComparison compare_mc(const PreparationSpec& spec, Strategy strategy, std::uint64_t seed,
                        std::size_t samples, unsigned threads) {
  const auto& noise = spec.noise;
  if (noise.kind != NoiseKind::ballistic || !noise.same_shot)
    throw std::invalid_argument("the Monte-Carlo oracle covers same-shot ballistic noise only");
  if (strategy == Strategy::QFI) throw std::invalid_argument("no Monte-Carlo oracle for the QFI");
  const int n = spec.n_atoms;
  const double chitau = strategy == Strategy::MAI ? -spec.chit : 0.0;

  McRequest req;
  req.n_atoms = n;
  req.chit = spec.chit;
  req.chitau = chitau;
  req.epsilon = noise.epsilon;
  req.gamma = noise.gamma;
  req.seed = seed;
  req.samples = samples;
  req.threads = threads;
  const auto spins = spin_operators(n);
  req.readout = make_basis(strategy == Strategy::MAI ? Strategy::L : strategy, spins).ops;
  const auto m = ballistic_mc_oracle(req);
  const auto g = mc_gain(m, n);

  McComparison c;
  c.analytic = strategy_gain(spec, strategy).xi_inv_sq;
  c.mc = g.xi_inv_sq;
  c.stderr = g.stderr;
  c.z = (c.mc - c.analytic) / c.stderr;

  // exact moments from the same full-window operators
  const auto gd = gram_data(oat_state(n, spec.chit), make_basis(strategy, spins, chitau),
                            Eigen::Vector3d::UnitZ(), phase_noise(noise, n, spec.chit, chitau));
  const std::size_t d = gd.size();
  auto track = [&](double sampled, double err, double exact) {
    // moments that are exactly zero have zero sample spread
    err = std::max(err, 1e-12 * (std::abs(exact) + 1.0));
    c.moment_z_max = std::max(c.moment_z_max, std::abs(sampled - exact) / err);
  };
  for (std::size_t a = 0; a < d; ++a) {
    track(m.mean[a], m.mean_err[a], gd.means[a]);
    for (std::size_t b = 0; b < d; ++b)
      track(m.second[a * d + b], m.second_err[a * d + b],
            gd.gamma(a, b) + gd.means[a] * gd.means[b]);
    for (int k = 0; k < 3; ++k) track(m.signal[a * 3 + k], m.signal_err[a * 3 + k], gd.signal(a, k));
  }
  return c;
}

std::vector<Check> run_selftest(unsigned threads) {
  std::vector<Check> out;

  {
    struct Case {
      int n;
      Strategy s;
      NoiseModel noise;
    };
    std::vector<Case> cases;
    const NoiseModel noises[] = {{}, {NoiseKind::ballistic, 0.05, 0.65}, {NoiseKind::diffusive, 0.05, 0.0}};
    for (int n : {8, 48})
      for (const auto& nm : noises)
        for (auto s : {Strategy::L, Strategy::NL, Strategy::Q, Strategy::MAI, Strategy::QFI})
          if (s != Strategy::QFI || nm.noiseless()) cases.push_back({n, s, nm});
    std::vector<double> err(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) {
      const auto& c = cases[i];
      err[i] = compare_dense(PreparationSpec::from_scaling(c.n, 0.6, 1.0, c.noise), c.s).rel_error;
    });
    const double worst = *std::max_element(err.begin(), err.end());
    out.push_back({"banded vs dense, N = 8 and 48", worst < 1e-10, fmt("max relative error %.3g", worst)});
  }

  {
    double worst = 0.0;
    for (auto s : {Strategy::L, Strategy::NL, Strategy::Q, Strategy::MAI, Strategy::QFI})
      worst = std::max(worst, std::abs(strategy_gain(PreparationSpec::at_time(100, 0.0), s).xi_inv_sq - 1.0));
    out.push_back({"gain 1 at zero twisting", worst < 1e-12, fmt("max |gain - 1| %.3g", worst)});
  }

  {
    struct Printed {
      Strategy s;
      double time, time_power, prefactor, gain_power;
    };
    const Printed printed[] = {
        {Strategy::L, std::pow(3.0, 1.0 / 6.0), -2.0 / 3.0, 2.0 * std::pow(3.0, -2.0 / 3.0), 2.0 / 3.0},
        {Strategy::NL, std::pow(2.5, 0.1) * std::pow(3.0, 0.3), -0.6,
         2.0 * std::pow(0.4, 0.8) * std::pow(3.0, 0.6), 0.8},
        {Strategy::Q, std::pow(7.0 / 6.0, 1.0 / 14.0) * std::pow(5.0, 3.0 / 14.0), -4.0 / 7.0,
         std::pow(6.0 / 7.0, 6.0 / 7.0) * std::pow(5.0, 3.0 / 7.0), 6.0 / 7.0},
    };
    for (const auto& p : printed) {
      double worst = 0.0;
      for (double n : {1e3, 1e6, 1e9}) {
        const auto opt = optimize_unified(n, p.s, {});
        worst = std::max({worst, rel_diff(opt.chit, p.time * std::pow(n, p.time_power)),
                          rel_diff(opt.gain, p.prefactor * std::pow(n, p.gain_power))});
      }
      out.push_back({"unifying expression optimum, " + to_string(p.s), worst < 1e-9,
                     fmt("max relative deviation %.3g", worst)});
    }
  }

  {
    const auto spec = PreparationSpec::from_scaling(200, 0.6, 1.0);
    const double l = strategy_gain(spec, Strategy::L).xi_inv_sq;
    const double nl = strategy_gain(spec, Strategy::NL).xi_inv_sq;
    const double q = strategy_gain(spec, Strategy::Q).xi_inv_sq;
    const double mai = strategy_gain(spec, Strategy::MAI).xi_inv_sq;
    const double fq = strategy_gain(spec, Strategy::QFI).xi_inv_sq;
    const double slack = 1e-10 * fq;
    const bool ok = l <= nl + slack && nl <= q + slack && q <= fq + slack && mai <= fq + slack;
    out.push_back({"L <= NL <= Q <= QFI and MAI <= QFI at N = 200", ok,
                   fmt("Q / QFI = %.6f, MAI / QFI = %.6f", q / fq, mai / fq)});
  }

  {
    const auto noisy = PreparationSpec::from_scaling(1000, 0.5, 1.0, {NoiseKind::ballistic, 0.0, 0.65});
    const auto clean = PreparationSpec::from_scaling(1000, 0.5, 1.0);
    const double a = strategy_gain(noisy, Strategy::MAI).xi_inv_sq;
    const double b = strategy_gain(clean, Strategy::MAI).xi_inv_sq;
    out.push_back({"zero noise strength equals noiseless", rel_diff(a, b) < 1e-12,
                   fmt("relative difference %.3g", rel_diff(a, b))});
  }

  {
    const auto spec = PreparationSpec::from_scaling(16, 0.6, 1.0, {NoiseKind::ballistic, 0.5, 0.65});
    const auto c = compare_mc(spec, Strategy::Q, 12345, 20000, threads);
    out.push_back({"ballistic averaging vs Monte Carlo, N = 16", std::abs(c.z) < 4.0 && c.moment_z_max < 5.0,
                   fmt("gain z %.2f, max moment z %.2f", c.z, c.moment_z_max)});
  }
  return out;
}

}  // namespace spingain
