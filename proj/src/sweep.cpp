#include "spingain/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "spingain/asymptotics.hpp"
#include "spingain/gain.hpp"
#include "spingain/parallel.hpp"

namespace spingain {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite_strategy(Strategy s) {
  return s == Strategy::L || s == Strategy::NL || s == Strategy::Q;
}

double safe_predicted_gain(Strategy s, const NoiseModel& noise, double n, double alpha,
                           double sigma) {
  try {
    return predicted_gain(s, noise, n, alpha, sigma);
  } catch (const std::invalid_argument&) {
    return kNaN;
  }
}

std::vector<int> decade_grid(double lo_exp, double hi_exp, int per_decade) {
  std::vector<int> out;
  const int steps = static_cast<int>(std::lround((hi_exp - lo_exp) * per_decade));
  for (int k = 0; k <= steps; ++k)
    out.push_back(static_cast<int>(std::lround(std::pow(10.0, lo_exp + double(k) / per_decade))));
  return out;
}

std::vector<SweepRecord> run_tasks(const std::vector<std::function<SweepRecord()>>& tasks,
                                   unsigned threads) {
  std::vector<SweepRecord> out(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) { out[i] = tasks[i](); });
  return out;
}

SweepRecord reference_row(const char* label, int n) {
  SweepRecord r;
  r.n_atoms = n;
  r.strategy = label;
  r.alpha = r.sigma = kNaN;
  r.xi_inv_sq = r.xi_inv_sq_pred = r.fq_over_n = label[0] == 's' ? 1.0 : double(n);
  return r;
}

}  // namespace

std::string to_string(TimePolicy p) {
  switch (p) {
    case TimePolicy::optimize: return "optimize";
    case TimePolicy::scaling: return "scaling";
    case TimePolicy::fixed: return "fixed";
  }
  return "optimize";
}

TimePolicy time_policy_from_string(const std::string& s) {
  if (s == "optimize") return TimePolicy::optimize;
  if (s == "scaling") return TimePolicy::scaling;
  if (s == "fixed") return TimePolicy::fixed;
  throw std::invalid_argument("unknown time policy '" + s + "'");
}

SweepRecord evaluate_point(Strategy strategy, const NoiseModel& noise, int n, TimePolicy policy,
                           double alpha, double sigma, double chit, bool timing) {
  SweepRecord r;
  r.n_atoms = n;
  r.strategy = to_string(strategy);
  r.noise = noise;
  const auto start = std::chrono::steady_clock::now();
  const double log_n = std::log(static_cast<double>(n));
  try {
    GainResult g;
    switch (policy) {
      case TimePolicy::optimize:
        g = optimize_time(n, strategy, noise);
        r.alpha = -std::log(g.chit) / log_n;
        r.sigma = 1.0;
        r.xi_inv_sq_pred = predicted_optimum_gain(n, strategy, noise);
        break;
      case TimePolicy::scaling:
        g = strategy_gain(PreparationSpec::from_scaling(n, alpha, sigma, noise), strategy);
        r.alpha = alpha;
        r.sigma = sigma;
        r.xi_inv_sq_pred = safe_predicted_gain(strategy, noise, n, alpha, sigma);
        break;
      case TimePolicy::fixed:
        g = strategy_gain(PreparationSpec::at_time(n, chit, noise), strategy);
        r.alpha = chit > 0.0 && n > 1 ? -std::log(chit) / log_n : kNaN;
        r.sigma = 1.0;
        if (finite_strategy(strategy) && chit > 0.0)
          r.xi_inv_sq_pred = unified_gain(n, chit, strategy, noise);
        else
          r.xi_inv_sq_pred = safe_predicted_gain(strategy, noise, n, r.alpha, 1.0);
        break;
    }
    r.chit = g.chit;
    r.chitau = g.chitau;
    r.xi_inv_sq = g.xi_inv_sq;
    r.fq_over_n = noise.noiseless()
                      ? strategy_gain(PreparationSpec::at_time(n, g.chit), Strategy::QFI).xi_inv_sq
                      : kNaN;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.xi_inv_sq = r.fq_over_n = kNaN;
    if (r.error.empty()) r.error = "unknown failure";
  }
  if (timing)
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<SweepRecord> sweep_n(const SweepRequest& req) {
  if (req.n_values.empty()) throw std::invalid_argument("sweep_n: empty N list");
  for (std::size_t i = 1; i < req.n_values.size(); ++i)
    if (req.n_values[i] <= req.n_values[i - 1])
      throw std::invalid_argument("sweep_n: N list must be strictly increasing");
  std::vector<std::function<SweepRecord()>> tasks;
  for (int n : req.n_values)
    tasks.push_back([&req, n] {
      return evaluate_point(req.strategy, req.noise, n, req.policy, req.alpha, req.sigma, req.chit,
                            req.timing);
    });
  return run_tasks(tasks, req.threads);
}

ScalingFit fit_power_law(std::span<const double> n, std::span<const double> gain, bool top_half) {
  if (n.size() != gain.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  ScalingFit fit;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(gain[i] > 0.0) || !(n[i] > 0.0)) {
      fit.warnings.push_back("excluded N=" + std::to_string(n[i]) + ": non-positive gain");
      continue;
    }
    pts.emplace_back(n[i], gain[i]);
  }
  if (pts.size() < 4) throw std::invalid_argument("fit_power_law: need at least 4 valid points");
  std::stable_sort(pts.begin(), pts.end());
  if (top_half) {
    const std::size_t keep = std::max<std::size_t>(4, (pts.size() + 1) / 2);
    pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(keep));
  }

  const double m = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) mx += std::log(x), my += std::log(y);
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: N values must not all coincide");
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  double rss = 0.0;
  for (const auto& [x, y] : pts) {
    const double res = std::log(y) - fit.log_prefactor - fit.exponent * std::log(x);
    rss += res * res;
  }
  fit.residual_rms = std::sqrt(rss / m);
  fit.exponent_stderr = std::sqrt(rss / (m - 2.0) / sxx);
  fit.n_min = pts.front().first;
  fit.n_max = pts.back().first;
  fit.points = pts.size();
  return fit;
}

ScalingFit fit_exponent(const std::vector<SweepRecord>& records, bool top_half) {
  std::vector<double> n, g;
  std::vector<std::string> warnings;
  for (const auto& r : records) {
    if (!r.ok()) {
      warnings.push_back("excluded N=" + std::to_string(r.n_atoms) + ": " + r.error);
      continue;
    }
    n.push_back(r.n_atoms);
    g.push_back(r.xi_inv_sq);
  }
  auto fit = fit_power_law(n, g, top_half);
  fit.warnings.insert(fit.warnings.begin(), warnings.begin(), warnings.end());
  return fit;
}

std::string to_string(Figure f) {
  switch (f) {
    case Figure::fig1a: return "fig1a";
    case Figure::fig1b: return "fig1b";
    case Figure::fig2: return "fig2";
  }
  return "fig1a";
}

Figure figure_from_string(const std::string& s) {
  if (s == "fig1a") return Figure::fig1a;
  if (s == "fig1b") return Figure::fig1b;
  if (s == "fig2") return Figure::fig2;
  throw std::invalid_argument("unknown figure '" + s + "'");
}

std::vector<int> default_figure_n(Figure f) {
  switch (f) {
    case Figure::fig1a: return decade_grid(2.0, 5.0, 4);
    case Figure::fig1b: return decade_grid(2.0, 6.0, 4);
    case Figure::fig2: return {100, 1000, 10000, 100000};
  }
  return {};
}

std::vector<SweepRecord> figure_data(Figure f, const FigureOptions& opt) {
  const auto ns = opt.n_values.empty() ? default_figure_n(f) : opt.n_values;
  std::vector<std::function<SweepRecord()>> tasks;
  const bool timing = opt.timing;
  switch (f) {
    case Figure::fig1a:
      for (int n : ns) {
        for (auto s : {Strategy::L, Strategy::NL, Strategy::Q})
          tasks.push_back([=] { return evaluate_point(s, {}, n, TimePolicy::optimize, 0, 0, 0, timing); });
        tasks.push_back([=] {
          return evaluate_point(Strategy::MAI, {}, n, TimePolicy::scaling, 0.5, opt.sigma, 0, timing);
        });
        tasks.push_back([=] { return reference_row("sql", n); });
        tasks.push_back([=] { return reference_row("hl", n); });
      }
      break;
    case Figure::fig1b: {
      const std::vector<double> gammas =
          opt.gammas.empty() ? std::vector<double>{0.0, 1.0 / 3.0, 0.65, 1.0} : opt.gammas;
      for (double g : gammas)
        for (int n : ns) {
          const NoiseModel noise{NoiseKind::ballistic, opt.epsilon, g};
          tasks.push_back([=] {
            return evaluate_point(Strategy::MAI, noise, n, TimePolicy::optimize, 0, 0, 0, timing);
          });
        }
      break;
    }
    case Figure::fig2: {
      if (!(opt.alpha_step > 0.0)) throw std::invalid_argument("alpha step must be positive");
      const int steps = static_cast<int>(std::lround(0.5 / opt.alpha_step));
      const NoiseModel noise{NoiseKind::ballistic, opt.epsilon, opt.gamma};
      for (int n : ns)
        for (int i = 0; i <= steps; ++i) {
          const double alpha = std::min(1.0, 0.5 + i * opt.alpha_step);
          tasks.push_back([=] {
            return evaluate_point(Strategy::MAI, noise, n, TimePolicy::scaling, alpha, opt.sigma, 0,
                                  timing);
          });
        }
      break;
    }
  }
  return run_tasks(tasks, opt.threads);
}

double crossover_width(std::span<const double> alpha, std::span<const double> values, double lo,
                       double hi) {
  if (alpha.size() != values.size()) throw std::invalid_argument("crossover_width: size mismatch");
  double width = 0.0;
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) {
    const double f0 = values[i], f1 = values[i + 1], h = alpha[i + 1] - alpha[i];
    if (f0 == f1) {
      if (f0 >= lo && f0 <= hi) width += h;
      continue;
    }
    double s0 = (lo - f0) / (f1 - f0), s1 = (hi - f0) / (f1 - f0);
    if (s0 > s1) std::swap(s0, s1);
    s0 = std::max(s0, 0.0);
    s1 = std::min(s1, 1.0);
    if (s1 > s0) width += (s1 - s0) * h;
  }
  return width;
}

double plateau_normalized(const SweepRecord& r) {
  return r.xi_inv_sq / (std::pow(r.n_atoms, 1.0 - r.noise.gamma) / (4.0 * r.noise.epsilon));
}

double short_time_normalized(const SweepRecord& r) {
  return r.xi_inv_sq / std::pow(r.n_atoms, 2.0 - 2.0 * r.alpha);
}

std::vector<CrossoverRow> fig2_crossover(const std::vector<SweepRecord>& records) {
  std::map<int, std::vector<std::pair<double, double>>> by_n;
  for (const auto& r : records)
    if (r.ok() && r.strategy == "mai") by_n[r.n_atoms].emplace_back(r.alpha, plateau_normalized(r));
  std::vector<CrossoverRow> out;
  for (auto& [n, pts] : by_n) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> a, v;
    for (const auto& [x, y] : pts) a.push_back(x), v.push_back(y);
    out.push_back({n, crossover_width(a, v)});
  }
  return out;
}

}  // namespace spingain
