#include "spingain/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "spingain/dense.hpp"
#include "spingain/io.hpp"
#include "spingain/oracle.hpp"
#include "spingain/parallel.hpp"

namespace spingain::cli {

namespace {

struct Unwritable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An output destination: a file, or `fallback` for "" and "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path), stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Unwritable("cannot write '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw Unwritable("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ostream* stream_;
  std::unique_ptr<std::ofstream> file_;
};

std::optional<Output> optional_output(const std::string& path, std::ostream& fallback) {
  if (path.empty()) return std::nullopt;
  return std::make_optional<Output>(path, fallback);
}

struct NoiseOptions {
  std::string kind = "none";
  double epsilon = 0.0;
  double gamma = 0.0;
  bool independent_shots = false;

  void add(CLI::App* app) {
    app->add_option("--noise", kind, "none, ballistic or diffusive")
        ->check(CLI::IsMember({"none", "ballistic", "diffusive"}));
    app->add_option("--epsilon", epsilon, "noise strength")->check(CLI::NonNegativeNumber);
    app->add_option("--gamma", gamma, "ballistic field-variance exponent")->check(CLI::Range(0.0, 1.0));
    app->add_flag("--independent-shots", independent_shots,
                  "ballistic: draw a fresh field for the echo stage");
  }

  NoiseModel model() const {
    NoiseModel m;
    m.kind = noise_kind_from_string(kind);
    if (m.kind == NoiseKind::none && epsilon != 0.0)
      throw std::invalid_argument("--epsilon needs --noise ballistic or diffusive");
    if (m.kind != NoiseKind::ballistic && (gamma != 0.0 || independent_shots))
      throw std::invalid_argument("--gamma and --independent-shots apply to ballistic noise only");
    m.epsilon = epsilon;
    m.gamma = gamma;
    m.same_shot = !independent_shots;
    return m;
  }
};

struct TimeOptions {
  CLI::Option* chit_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  double chit = 0.0;
  double alpha = 0.5;
  double sigma = 1.0;
  bool optimize = false;

  void add(CLI::App* app) {
    chit_opt = app->add_option("--chit", chit, "explicit twisting time chi t")->check(CLI::NonNegativeNumber);
    alpha_opt = app->add_option("--alpha", alpha, "chi t = sigma N^-alpha")->check(CLI::Range(0.5, 1.0));
    sigma_opt = app->add_option("--sigma", sigma, "prefactor of the scaling time (default 1)")
                    ->check(CLI::PositiveNumber);
    app->add_flag("--optimize-time", optimize, "maximize the gain over chi t");
  }

  TimePolicy policy() const {
    const int chosen = int(chit_opt->count() > 0) + int(alpha_opt->count() > 0) + int(optimize);
    if (chosen != 1)
      throw std::invalid_argument("give exactly one of --chit, --alpha [--sigma], --optimize-time");
    if (sigma_opt->count() > 0 && alpha_opt->count() == 0)
      throw std::invalid_argument("--sigma needs --alpha");
    if (optimize) return TimePolicy::optimize;
    return alpha_opt->count() > 0 ? TimePolicy::scaling : TimePolicy::fixed;
  }
};

std::vector<int> pow2_range(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--n-pow2 expects A:B");
  const int a = std::stoi(spec.substr(0, colon)), b = std::stoi(spec.substr(colon + 1));
  if (a < 0 || b > 30 || a > b) throw std::invalid_argument("--n-pow2 needs 0 <= A <= B <= 30");
  std::vector<int> out;
  for (int k = a; k <= b; ++k) out.push_back(1 << k);
  return out;
}

void print_vector(std::ostream& out, const char* key, const double* v, Eigen::Index n) {
  out << key << " =";
  for (Eigen::Index i = 0; i < n; ++i) out << ' ' << format_number(v[i]);
  out << '\n';
}

// ---------------------------------------------------------------------------

struct GainCommand {
  int n = 0;
  std::string strategy;
  NoiseOptions noise;
  TimeOptions time;
  CLI::Option* chitau_opt = nullptr;
  double chitau = 0.0;
  std::string oracle = "banded";
  std::size_t samples = 100000;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t seed = 0;
  std::string json_path;
  unsigned threads = 0;

  void add(CLI::App* app) {
    app->add_option("--n", n, "number of atoms")->required()->check(CLI::PositiveNumber);
    app->add_option("--strategy", strategy, "l, nl, q, mai or qfi")
        ->required()
        ->check(CLI::IsMember({"l", "nl", "q", "mai", "qfi"}));
    noise.add(app);
    time.add(app);
    chitau_opt = app->add_option("--chitau", chitau, "echo twisting time (mai only; default -chit)");
    app->add_option("--oracle", oracle, "banded, dense (cross-check, N <= 64) or mc (ballistic)")
        ->check(CLI::IsMember({"banded", "dense", "mc"}));
    app->add_option("--samples", samples, "Monte-Carlo shots")->check(CLI::PositiveNumber);
    seed_opt = app->add_option("--seed", seed, "Monte-Carlo seed (required with --oracle mc)");
    app->add_option("--json", json_path, "write the result as JSON ('-' for stdout)");
    app->add_option("--threads", threads, "worker threads (0: default)");
  }

  int run(std::ostream& out, std::ostream& err) {
    const Strategy s = strategy_from_string(strategy);
    const NoiseModel nm = noise.model();
    const TimePolicy policy = time.policy();
    std::optional<double> tau;
    if (chitau_opt->count() > 0) {
      if (s != Strategy::MAI) throw std::invalid_argument("--chitau applies to the mai strategy only");
      if (policy == TimePolicy::optimize) throw std::invalid_argument("--chitau cannot be combined with --optimize-time");
      tau = chitau;
    }
    if (oracle == "mc") {
      if (seed_opt->count() == 0) throw std::invalid_argument("--oracle mc needs --seed");
      if (nm.kind != NoiseKind::ballistic || !nm.same_shot)
        throw std::invalid_argument("--oracle mc needs same-shot ballistic noise");
      if (s == Strategy::QFI || tau) throw std::invalid_argument("--oracle mc supports l, nl, q and mai at chitau = -chit");
    }
    if (oracle == "dense" && n > dense::kMaxAtoms)
      throw std::invalid_argument("--oracle dense supports N <= " + std::to_string(dense::kMaxAtoms));
    auto json = optional_output(json_path, out);

    GainResult g;
    if (policy == TimePolicy::optimize) {
      g = optimize_time(n, s, nm);
    } else {
      const auto spec = policy == TimePolicy::scaling ? PreparationSpec::from_scaling(n, time.alpha, time.sigma, nm)
                                                      : PreparationSpec::at_time(n, time.chit, nm);
      g = strategy_gain(spec, s, tau);
    }
    if (!std::isfinite(g.xi_inv_sq)) throw std::runtime_error("gain is not finite");

    Json j = to_json(g);
    bool agree = true;
    const bool text = !(json && !json->is_file());
    if (text) {
      out << "N = " << g.n_atoms << '\n'
          << "strategy = " << to_string(g.strategy) << '\n'
          << "noise = " << to_string(g.noise.kind) << '\n'
          << "chit = " << format_number(g.chit) << '\n';
      if (g.strategy == Strategy::MAI) out << "chitau = " << format_number(g.chitau) << '\n';
      out << "xi_inv_sq = " << format_number(g.xi_inv_sq) << '\n'
          << "xi_inv_sq_over_n = " << format_number(g.xi_inv_sq / g.n_atoms) << '\n';
      if (g.coefficients.size() > 0) {
        print_vector(out, "coefficients", g.coefficients.data(), g.coefficients.size());
        print_vector(out, "axis", g.axis.data(), 3);
      }
      if (policy == TimePolicy::optimize) out << "iterations = " << g.iterations << '\n';
    }

    if (oracle != "banded") {
      auto spec = PreparationSpec::at_time(n, g.chit, nm);
      spec.alpha = g.alpha;
      spec.sigma = g.sigma;
      if (oracle == "dense") {
        const auto d = dense::strategy_gain(spec, s, s == Strategy::MAI ? std::optional<double>(g.chitau) : std::nullopt);
        const double rel = std::abs(d.xi_inv_sq - g.xi_inv_sq) / std::abs(d.xi_inv_sq);
        agree = rel <= 1e-10;
        j["dense_xi_inv_sq"] = d.xi_inv_sq;
        j["dense_relative_error"] = rel;
        if (text)
          out << "dense_xi_inv_sq = " << format_number(d.xi_inv_sq) << '\n'
              << "dense_relative_error = " << format_number(rel) << (agree ? "" : "  (exceeds 1e-10)") << '\n';
      } else {
        const auto c = compare_mc(spec, s, seed, samples, threads);
        j["mc_xi_inv_sq"] = c.mc;
        j["mc_stderr"] = c.stderr;
        j["mc_z"] = c.z;
        j["mc_moment_z_max"] = c.moment_z_max;
        if (text)
          out << "mc_xi_inv_sq = " << format_number(c.mc) << '\n'
              << "mc_stderr = " << format_number(c.stderr) << '\n'
              << "mc_z = " << format_number(c.z) << '\n'
              << "mc_moment_z_max = " << format_number(c.moment_z_max) << '\n';
      }
    }
    if (json) {
      json->stream() << j.dump(2) << '\n';
      json->finish();
    }
    if (!agree) {
      err << "error: banded and dense engines disagree\n";
      return kNumericFailure;
    }
    return kOk;
  }
};

// ---------------------------------------------------------------------------

struct OutputOptions {
  std::string out_path;
  std::string svg_path;
  unsigned threads = 0;
  bool timing = false;

  void add(CLI::App* app) {
    app->add_option("--out", out_path, "CSV output path (default stdout)");
    app->add_option("--svg", svg_path, "also render an SVG plot");
    app->add_option("--threads", threads, "worker threads (0: default)");
    app->add_flag("--timing", timing, "record wall time per point (otherwise 0)");
  }
};

int report_failures(const std::vector<SweepRecord>& records, std::ostream& err) {
  int failed = 0;
  for (const auto& r : records)
    if (!r.ok()) {
      ++failed;
      err << "warning: N=" << r.n_atoms << " " << r.strategy << ": " << r.error << '\n';
    }
  return failed > 0 ? kNumericFailure : kOk;
}

struct SweepCommand {
  std::string strategy;
  NoiseOptions noise;
  TimeOptions time;
  std::vector<int> n_list;
  std::string n_pow2;
  OutputOptions output;

  void add(CLI::App* app) {
    app->add_option("--strategy", strategy, "l, nl, q, mai or qfi")
        ->required()
        ->check(CLI::IsMember({"l", "nl", "q", "mai", "qfi"}));
    noise.add(app);
    time.add(app);
    auto* list = app->add_option("--n-list", n_list, "comma-separated, strictly increasing N values")
                     ->delimiter(',')
                     ->check(CLI::PositiveNumber);
    app->add_option("--n-pow2", n_pow2, "N = 2^A .. 2^B, given as A:B")->excludes(list);
    output.add(app);
  }

  int run(std::ostream& out, std::ostream& err) {
    SweepRequest req;
    req.strategy = strategy_from_string(strategy);
    req.noise = noise.model();
    req.policy = time.policy();
    req.alpha = time.alpha;
    req.sigma = time.sigma;
    req.chit = time.chit;
    req.threads = output.threads;
    req.timing = output.timing;
    req.n_values = n_pow2.empty() ? n_list : pow2_range(n_pow2);
    if (req.n_values.empty()) throw std::invalid_argument("give --n-list or --n-pow2");
    Output csv(output.out_path, out);
    auto svg = optional_output(output.svg_path, out);

    const auto records = sweep_n(req);
    write_csv(csv.stream(), records);
    csv.finish();
    if (svg) {
      svg->stream() << render_svg(series_by_strategy(records), {"sweep " + strategy});
      svg->finish();
    }
    return report_failures(records, err);
  }
};

// ---------------------------------------------------------------------------

struct FitCommand {
  std::string in_path;
  bool full_range = false;
  std::string strategy;
  std::string json_path;

  void add(CLI::App* app) {
    app->add_option("--in", in_path, "sweep CSV file")->required();
    app->add_flag("--full-range", full_range, "fit all points instead of the upper half of N");
    app->add_option("--strategy", strategy, "only fit rows of this strategy");
    app->add_option("--json", json_path, "write the fit as JSON ('-' for stdout)");
  }

  int run(std::ostream& out, std::ostream& err) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read '" + in_path + "'");
    auto json = optional_output(json_path, out);
    auto records = read_csv(in);
    if (!strategy.empty())
      std::erase_if(records, [&](const SweepRecord& r) { return r.strategy != strategy; });
    std::set<std::tuple<std::string, std::string, double, double>> groups;
    for (const auto& r : records)
      groups.emplace(r.strategy, to_string(r.noise.kind), r.noise.epsilon, r.noise.gamma);
    if (groups.size() > 1)
      throw std::invalid_argument("the file mixes several series; select one with --strategy");

    ScalingFit fit;
    try {
      fit = fit_exponent(records, !full_range);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(e.what());
    }
    for (const auto& w : fit.warnings) err << "warning: " << w << '\n';
    if (json && !json->is_file()) {
      json->stream() << to_json(fit).dump(2) << '\n';
    } else {
      out << "exponent = " << format_number(fit.exponent) << '\n'
          << "exponent_stderr = " << format_number(fit.exponent_stderr) << '\n'
          << "prefactor = " << format_number(std::exp(fit.log_prefactor)) << '\n'
          << "residual_rms = " << format_number(fit.residual_rms) << '\n'
          << "n_range = " << format_number(fit.n_min) << ' ' << format_number(fit.n_max) << '\n'
          << "points = " << fit.points << '\n';
      if (json) json->stream() << to_json(fit).dump(2) << '\n';
    }
    if (json) json->finish();
    return kOk;
  }
};

// ---------------------------------------------------------------------------

struct FigureCommand {
  std::string which;
  FigureOptions options;
  OutputOptions output;

  void add(CLI::App* app) {
    app->add_option("figure", which, "fig1a, fig1b or fig2")
        ->required()
        ->check(CLI::IsMember({"fig1a", "fig1b", "fig2"}));
    app->add_option("--n-list", options.n_values, "override the N values")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    app->add_option("--gammas", options.gammas, "fig1b noise exponents")->delimiter(',');
    app->add_option("--epsilon", options.epsilon, "ballistic noise strength")->check(CLI::PositiveNumber);
    app->add_option("--gamma", options.gamma, "fig2 noise exponent")->check(CLI::Range(0.0, 1.0));
    app->add_option("--sigma", options.sigma, "prefactor of the scaling time")->check(CLI::PositiveNumber);
    app->add_option("--alpha-step", options.alpha_step, "fig2 alpha grid spacing")->check(CLI::PositiveNumber);
    output.add(app);
  }

  int run(std::ostream& out, std::ostream& err) {
    const Figure f = figure_from_string(which);
    for (double g : options.gammas)
      if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("--gammas must lie in [0, 1]");
    options.threads = output.threads;
    options.timing = output.timing;
    Output csv(output.out_path, out);
    auto svg = optional_output(output.svg_path, out);

    const auto records = figure_data(f, options);
    write_csv(csv.stream(), records);
    csv.finish();

    std::ostream& summary = csv.is_file() ? out : err;
    if (f == Figure::fig2)
      for (const auto& row : fig2_crossover(records))
        summary << "crossover width N=" << row.n_atoms << " " << format_number(row.width) << '\n';

    if (svg) {
      std::vector<Series> series;
      PlotSpec spec{which};
      if (f == Figure::fig2) {
        std::map<int, Series> by_n;
        for (const auto& r : records) {
          auto& s = by_n[r.n_atoms];
          s.label = "N=" + std::to_string(r.n_atoms);
          s.x.push_back(r.alpha);
          s.y.push_back(plateau_normalized(r));
        }
        for (auto& [n, s] : by_n) series.push_back(std::move(s));
        spec.x_label = "alpha";
        spec.y_label = "xi^-2 / (N^(1-gamma) / 4 eps)";
        spec.log_x = false;
      } else {
        series = series_by_strategy(records);
      }
      svg->stream() << render_svg(series, spec);
      svg->finish();
    }
    return report_failures(records, err);
  }
};

// ---------------------------------------------------------------------------

struct SelftestCommand {
  unsigned threads = 0;

  void add(CLI::App* app) { app->add_option("--threads", threads, "worker threads (0: default)"); }

  int run(std::ostream& out, std::ostream&) {
    bool all = true;
    for (const auto& c : run_selftest(threads)) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
      all = all && c.pass;
    }
    return all ? kOk : kNumericFailure;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splices the entries of `--config FILE` into the argument list as
// `--key value` (or `--key` for `true`). Keys also given on the command line
// are skipped so explicit flags win.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  std::size_t at = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      at = i;
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      at = i;
      args.erase(args.begin() + i);
      break;
    }
  }
  if (at == 0) return args;

  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? a.npos : a.find('=') - 2));

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty() || key == "config")
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad key");
    if (given.count(key)) continue;
    if (value == "true") {
      extra.push_back("--" + key);
    } else if (value != "false") {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metrological gain of one-axis-twisted spin states", "spingain"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GainCommand gain;
  SweepCommand sweep;
  FitCommand fit;
  FigureCommand figure;
  SelftestCommand selftest;
  auto setup = [&](const char* name, const char* help, auto& cmd) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", "key = value file; command-line flags take precedence");
    cmd.add(sub);
    return sub;
  };
  auto* gain_app = setup("gain", "gain of one preparation", gain);
  auto* sweep_app = setup("sweep", "gains over a list of N", sweep);
  auto* fit_app = setup("fit", "power-law fit of a sweep CSV", fit);
  auto* figure_app = setup("figure", "datasets for the scaling figures", figure);
  auto* selftest_app = setup("selftest", "oracle and consistency checks", selftest);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  std::vector<const char*> argp;
  for (const auto& a : args) argp.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (gain_app->parsed()) return gain.run(out, err);
    if (sweep_app->parsed()) return sweep.run(out, err);
    if (fit_app->parsed()) return fit.run(out, err);
    if (figure_app->parsed()) return figure.run(out, err);
    if (selftest_app->parsed()) return selftest.run(out, err);
  } catch (const Unwritable& e) {
    err << "error: " << e.what() << '\n';
    return kUnwritablePath;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kInvalidConfig;
}

}  // namespace spingain::cli
