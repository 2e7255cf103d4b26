#include "spingain/channels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "spingain/parallel.hpp"

namespace spingain {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::ballistic: return "ballistic";
    case NoiseKind::diffusive: return "diffusive";
  }
  return "none";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "ballistic") return NoiseKind::ballistic;
  if (s == "diffusive") return NoiseKind::diffusive;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

double NoiseKernel::decay(int k) const {
  return variance == 0.0 ? 1.0 : std::exp(-0.5 * variance * k * k);
}

NoiseKernel identity_kernel() { return {}; }

NoiseKernel ballistic_kernel(int n_atoms, double chit_total, double epsilon, double gamma) {
  if (epsilon < 0.0) throw std::invalid_argument("ballistic_kernel: epsilon must be >= 0");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("ballistic_kernel: gamma outside [0, 1]");
  if (n_atoms < 1) throw std::invalid_argument("ballistic_kernel: N must be >= 1");
  const double var_d = epsilon * std::pow(static_cast<double>(n_atoms), gamma);
  return {NoiseKind::ballistic, epsilon, gamma, var_d * chit_total * chit_total};
}

NoiseKernel diffusive_kernel(int n_atoms, double chit, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("diffusive_kernel: epsilon must be >= 0");
  if (n_atoms < 1) throw std::invalid_argument("diffusive_kernel: N must be >= 1");
  return {NoiseKind::diffusive, epsilon, 0.0, epsilon * std::abs(chit)};
}

NoiseKernel segment_kernel(const NoiseModel& noise, int n_atoms, double chit) {
  switch (noise.kind) {
    case NoiseKind::none: return identity_kernel();
    case NoiseKind::ballistic:
      return ballistic_kernel(n_atoms, std::abs(chit), noise.epsilon, noise.gamma);
    case NoiseKind::diffusive: return diffusive_kernel(n_atoms, chit, noise.epsilon);
  }
  return identity_kernel();
}

double PhaseNoise::weight(int generator_band, int observable_band) const {
  const double p = generator_band + observable_band;
  const double k = observable_band;
  const double q = prep_var * p * p + 2.0 * cross_cov * p * k + echo_var * k * k;
  return q == 0.0 ? 1.0 : std::exp(-0.5 * q);
}

PhaseNoise phase_noise(const NoiseModel& noise, int n_atoms, double chit, double chitau) {
  if (noise.epsilon < 0.0) throw std::invalid_argument("noise epsilon must be >= 0");
  const double t = std::abs(chit), tau = std::abs(chitau);
  switch (noise.kind) {
    case NoiseKind::none: return {};
    case NoiseKind::diffusive: return {noise.epsilon * t, noise.epsilon * tau, 0.0};
    case NoiseKind::ballistic: {
      if (noise.gamma < 0.0 || noise.gamma > 1.0)
        throw std::invalid_argument("ballistic gamma outside [0, 1]");
      const double v = noise.epsilon * std::pow(static_cast<double>(n_atoms), noise.gamma);
      return {v * t * t, v * tau * tau, noise.same_shot ? v * t * tau : 0.0};
    }
  }
  return {};
}

PreparationSpec PreparationSpec::from_scaling(int n_atoms, double alpha, double sigma,
                                              NoiseModel noise) {
  PreparationSpec s;
  s.n_atoms = n_atoms;
  s.alpha = alpha;
  s.sigma = sigma;
  s.chit = sigma * std::pow(static_cast<double>(n_atoms), -alpha);
  s.noise = noise;
  return s;
}

PreparationSpec PreparationSpec::at_time(int n_atoms, double chit, NoiseModel noise) {
  PreparationSpec s;
  s.n_atoms = n_atoms;
  s.chit = chit;
  s.noise = noise;
  return s;
}

DickeVector oat_state(int n_atoms, double chit, double tail_cutoff) {
  const auto psi0 = coherent_state_x(n_atoms, tail_cutoff);
  const Window w = psi0.window();
  std::vector<double> phases(w.size);
  for (std::size_t j = 0; j < w.size; ++j) {
    const double m = magnetization(n_atoms, w.first + j);
    phases[j] = chit * m * m;
  }
  return apply_diagonal_phase(psi0, phases);
}

BandedDensity prepare_noisy(const PreparationSpec& spec, int max_band, double tail_cutoff) {
  if (spec.n_atoms < 1) throw std::invalid_argument("prepare_noisy: N must be >= 1");
  const auto psi = oat_state(spec.n_atoms, spec.chit, tail_cutoff);
  const auto kernel = segment_kernel(spec.noise, spec.n_atoms, spec.chit);
  return BandedDensity::from_pure(psi, max_band).dephased([&](int k) { return kernel.decay(k); });
}

BandedOperator twist_conjugate(const BandedOperator& op, double chitau) {
  BandedOperator a = op;
  if (chitau == 0.0) return a;
  const int n = a.n_atoms();
  const std::size_t first = a.window().first;
  for (int k = -a.max_band(); k <= a.max_band(); ++k) {
    if (k == 0) continue;
    auto b = a.band(k);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t col = k >= 0 ? j : j - k;
      const double mc = magnetization(n, first + col);
      // m_r^2 - m_c^2 = k (m_r + m_c), exact for half-integers
      b[j] *= std::polar(1.0, chitau * k * (2.0 * mc + k));
    }
  }
  return a;
}

BandedOperator rotate_z_conjugate(const BandedOperator& a, double phi) {
  return scale_bands(a, [phi](int k) { return std::polar(1.0, phi * k); });
}

BandedOperator mai_observable(int n_atoms, const std::array<double, 3>& m, double chitau) {
  return mai_observable(spin_operators(n_atoms), m, chitau);
}

BandedOperator mai_observable(const SpinOperators& s, const std::array<double, 3>& m,
                              double chitau) {
  const BandedOperator ops[] = {s.x, s.y, s.z};
  return twist_conjugate(band_linear_combination(m, ops), chitau);
}

DressedObservable mai_effective_observable_noisy(const SpinOperators& s,
                                                 const std::array<double, 3>& m,
                                                 double chitau, const NoiseModel& noise) {
  auto base = mai_observable(s, m, chitau);
  if (noise.noiseless()) return {std::move(base), 0.0};
  if (noise.kind == NoiseKind::ballistic && noise.same_shot)
    return {std::move(base), std::abs(chitau)};
  const auto kernel = segment_kernel(noise, s.z.n_atoms(), chitau);
  return {scale_bands(std::move(base), [&](int k) { return kernel.decay(k); }), 0.0};
}

// ---------------------------------------------------------------------------

namespace {

struct BlockSums {
  std::vector<double> mean, mean2, second, second2, signal, signal2;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

McMoments ballistic_mc_oracle(const McRequest& req) {
  if (req.samples < 1) throw std::invalid_argument("ballistic_mc_oracle: need >= 1 sample");
  if (req.readout.empty()) throw std::invalid_argument("ballistic_mc_oracle: no readout operators");
  if (req.epsilon < 0.0) throw std::invalid_argument("ballistic_mc_oracle: epsilon must be >= 0");
  const int n = req.n_atoms;
  const std::size_t d = req.readout.size();
  const auto spins = spin_operators(n);
  const auto psi = oat_state(n, req.chit);
  const double d_std = std::sqrt(req.epsilon * std::pow(static_cast<double>(n), req.gamma));
  const bool echo = req.chitau != 0.0;

  std::vector<BandedOperator> conjugated;
  for (const auto& op : req.readout) {
    if (!(op.window() == full_window(n))) throw std::invalid_argument("readout must be full-window");
    conjugated.push_back(twist_conjugate(op, req.chitau));
  }
  // Without an echo the readout does not depend on D; build products once.
  std::vector<BandedOperator> fixed_products, fixed_signals;
  if (!echo)
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b)
        fixed_products.push_back(0.5 * band_anticommutator(conjugated[a], conjugated[b]));
      for (int g = 0; g < 3; ++g) fixed_signals.push_back(band_i_commutator(conjugated[a], spins[g]));
    }

  const std::size_t n_blocks = (req.samples + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<BlockSums> blocks(n_blocks);
  std::vector<std::size_t> block_count(n_blocks);

  const Window w = psi.window();
  std::vector<double> m_of(w.size);
  for (std::size_t j = 0; j < w.size; ++j) m_of[j] = magnetization(n, w.first + j);

  parallel_for(n_blocks, req.threads, [&](std::size_t blk) {
    std::seed_seq seq{static_cast<std::uint32_t>(req.seed), static_cast<std::uint32_t>(req.seed >> 32),
                      static_cast<std::uint32_t>(splitmix64(blk)),
                      static_cast<std::uint32_t>(splitmix64(blk) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = blk * kMcBlockSize;
    const std::size_t end = std::min(req.samples, begin + kMcBlockSize);
    BlockSums s{std::vector<double>(d), std::vector<double>(d), std::vector<double>(d * d),
                std::vector<double>(d * d), std::vector<double>(d * 3), std::vector<double>(d * 3)};
    std::vector<double> phases(w.size);
    for (std::size_t i = begin; i < end; ++i) {
      const double field = d_std * normal(rng);
      for (std::size_t j = 0; j < w.size; ++j) phases[j] = req.chit * field * m_of[j];
      const auto psi_d = apply_diagonal_phase(psi, phases);

      std::vector<BandedOperator> x;
      if (echo) {
        x.reserve(d);
        for (const auto& op : conjugated)
          x.push_back(rotate_z_conjugate(op, std::abs(req.chitau) * field));
      }
      const auto& xs = echo ? x : conjugated;

      std::size_t pi = 0;
      for (std::size_t a = 0; a < d; ++a) {
        const double mu = expectation(psi_d, xs[a]).real();
        s.mean[a] += mu;
        s.mean2[a] += mu * mu;
        for (std::size_t b = a; b < d; ++b) {
          const double sec =
              echo ? expectation(psi_d, 0.5 * band_anticommutator(x[a], x[b])).real()
                   : expectation(psi_d, fixed_products[pi++]).real();
          s.second[a * d + b] += sec;
          s.second2[a * d + b] += sec * sec;
        }
        for (int g = 0; g < 3; ++g) {
          const double sig =
              echo ? expectation(psi_d, band_i_commutator(x[a], spins[g])).real()
                   : expectation(psi_d, fixed_signals[a * 3 + g]).real();
          s.signal[a * 3 + g] += sig;
          s.signal2[a * 3 + g] += sig * sig;
        }
      }
    }
    blocks[blk] = std::move(s);
    block_count[blk] = end - begin;
  });

  McMoments out;
  out.samples = req.samples;
  const double ns = static_cast<double>(req.samples);
  auto finish = [&](auto member, auto member2, std::size_t len, std::vector<double>& avg,
                    std::vector<double>& err, std::vector<std::vector<double>>& per_block) {
    std::vector<double> sum(len), sum2(len);
    per_block.assign(n_blocks, std::vector<double>(len));
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const auto& v = blocks[b].*member;
      const auto& v2 = blocks[b].*member2;
      for (std::size_t i = 0; i < len; ++i) {
        sum[i] += v[i];
        sum2[i] += v2[i];
        per_block[b][i] = v[i] / static_cast<double>(block_count[b]);
      }
    }
    avg.resize(len);
    err.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      avg[i] = sum[i] / ns;
      const double var = ns > 1 ? std::max(0.0, (sum2[i] - ns * avg[i] * avg[i]) / (ns - 1.0)) : 0.0;
      err[i] = std::sqrt(var / ns);
    }
  };
  finish(&BlockSums::mean, &BlockSums::mean2, d, out.mean, out.mean_err, out.block_mean);
  finish(&BlockSums::second, &BlockSums::second2, d * d, out.second, out.second_err,
         out.block_second);
  finish(&BlockSums::signal, &BlockSums::signal2, d * 3, out.signal, out.signal_err,
         out.block_signal);
  // mirror the symmetric second moments into the lower triangle
  auto mirror = [d](std::vector<double>& v) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < a; ++b) v[a * d + b] = v[b * d + a];
  };
  mirror(out.second);
  mirror(out.second_err);
  for (auto& blk : out.block_second) mirror(blk);
  return out;
}

}  // namespace spingain
