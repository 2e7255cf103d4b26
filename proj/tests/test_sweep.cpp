#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "spingain/sweep.hpp"

using namespace spingain;

TEST_CASE("power-law fit of exact data") {
  std::vector<double> n, g;
  for (int k = 7; k <= 14; ++k) {
    n.push_back(std::ldexp(1.0, k));
    g.push_back(3.0 * std::pow(n.back(), 0.8));
  }
  const auto f = fit_power_law(n, g);
  CHECK(f.exponent == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(f.exponent_stderr < 1e-10);
  CHECK(std::exp(f.log_prefactor) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.points == 4);
  CHECK(f.n_min == 2048.0);
  const auto full = fit_power_law(n, g, false);
  CHECK(full.points == 8);
  CHECK(full.exponent == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("power-law fit with multiplicative noise") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> n, g;
  for (int k = 0; k < 40; ++k) {
    n.push_back(100.0 * std::pow(1.2, k));
    g.push_back(3.0 * std::pow(n.back(), 0.8) * (1.0 + noise(rng)));
  }
  const auto f = fit_power_law(n, g);
  CHECK(f.exponent_stderr > 0.0);
  CHECK(std::abs(f.exponent - 0.8) < 3.0 * f.exponent_stderr);
}

TEST_CASE("fit input validation") {
  const std::vector<double> n{1, 2, 3, 4, 5, 6, 7, 8}, g{1, 2, 3, -4, 5, 0, 7, 8};
  const auto f = fit_power_law(n, g, false);
  CHECK(f.points == 6);
  CHECK(!f.warnings.empty());
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);

  std::vector<SweepRecord> recs(6);
  for (int i = 0; i < 6; ++i) {
    recs[i].n_atoms = 100 << i;
    recs[i].xi_inv_sq = std::pow(recs[i].n_atoms, 0.5);
  }
  recs[2].error = "failed";
  const auto fr = fit_exponent(recs, false);
  CHECK(fr.points == 5);
  CHECK(fr.exponent == doctest::Approx(0.5));
  CHECK(!fr.warnings.empty());
}

TEST_CASE("sweep ordering and failures") {
  SweepRequest req;
  req.strategy = Strategy::L;
  req.n_values = {64, 32};
  CHECK_THROWS_AS(sweep_n(req), std::invalid_argument);
  req.n_values = {32, 32};
  CHECK_THROWS_AS(sweep_n(req), std::invalid_argument);

  // N = 2 is below what the time optimizer accepts: recorded, not fatal
  req.n_values = {2, 64, 128};
  const auto recs = sweep_n(req);
  REQUIRE(recs.size() == 3);
  CHECK(!recs[0].ok());
  CHECK(recs[1].ok());
  CHECK(recs[2].ok());
  CHECK(recs[2].xi_inv_sq > recs[1].xi_inv_sq);
  CHECK(recs[1].seconds == 0.0);
}

TEST_CASE("sweep records respect the Fisher bound") {
  SweepRequest req;
  req.n_values = {50, 100, 200, 400};
  req.policy = TimePolicy::scaling;
  req.alpha = 0.6;
  for (auto s : {Strategy::L, Strategy::NL, Strategy::Q, Strategy::MAI}) {
    req.strategy = s;
    for (const auto& r : sweep_n(req)) {
      REQUIRE(r.ok());
      CHECK(r.xi_inv_sq <= r.fq_over_n * (1.0 + 1e-12));
      CHECK(r.chit == doctest::Approx(std::pow(r.n_atoms, -0.6)));
      CHECK(r.xi_inv_sq_pred > 0.0);
    }
  }
}

TEST_CASE("sweep is independent of the thread count") {
  SweepRequest req;
  req.strategy = Strategy::MAI;
  req.noise = {NoiseKind::ballistic, 0.05, 0.65};
  req.n_values = {100, 200, 400, 800, 1600};
  req.threads = 1;
  const auto a = sweep_n(req);
  req.threads = 3;
  const auto b = sweep_n(req);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].xi_inv_sq == b[i].xi_inv_sq);
    CHECK(a[i].chit == b[i].chit);
  }
}

TEST_CASE("echo sweep: no noise equals zero-strength ballistic noise") {
  SweepRequest req;
  req.strategy = Strategy::MAI;
  req.n_values = {100, 1000, 10000};
  req.policy = TimePolicy::scaling;
  const auto a = sweep_n(req);
  req.noise = {NoiseKind::ballistic, 0.0, 0.65};
  const auto b = sweep_n(req);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i].xi_inv_sq - b[i].xi_inv_sq) <= 1e-12 * a[i].xi_inv_sq);
}

TEST_CASE("crossover width") {
  const std::vector<double> alpha{0.5, 0.6, 0.7, 0.8};
  // linear ramp from 0 to 1 over [0.5, 0.8]: values in [1/4, 3/4] over half the span
  CHECK(crossover_width(alpha, std::vector<double>{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) == doctest::Approx(0.15));
  CHECK(crossover_width(alpha, std::vector<double>{1.0, 1.0, 1.0, 1.0}) == 0.0);
  CHECK(crossover_width(alpha, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == doctest::Approx(0.3));
  CHECK_THROWS_AS(crossover_width(alpha, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("figure 2 crossover sharpens with N") {
  FigureOptions opt;
  opt.n_values = {100, 1000, 10000};
  opt.alpha_step = 0.02;
  const auto recs = figure_data(Figure::fig2, opt);
  CHECK(recs.size() == 3 * 26);
  const auto rows = fig2_crossover(recs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].width > rows[1].width);
  CHECK(rows[1].width > rows[2].width);
  for (const auto& r : recs) {
    CHECK(r.strategy == "mai");
    CHECK(r.noise.kind == NoiseKind::ballistic);
  }
}

TEST_CASE("figure 1a rows") {
  FigureOptions opt;
  opt.n_values = {100, 10000};
  const auto recs = figure_data(Figure::fig1a, opt);
  std::map<std::string, int> count;
  for (const auto& r : recs) {
    ++count[r.strategy];
    if (r.strategy == "mai" && r.n_atoms == 10000)
      CHECK(r.xi_inv_sq / 1e4 * std::exp(1.0) == doctest::Approx(1.0).epsilon(0.02));
    if (r.strategy == "sql") CHECK(r.xi_inv_sq == 1.0);
    if (r.strategy == "hl") CHECK(r.xi_inv_sq == r.n_atoms);
  }
  for (const char* s : {"l", "nl", "q", "mai", "sql", "hl"}) CHECK(count[s] == 2);
  CHECK(default_figure_n(Figure::fig2) == std::vector<int>{100, 1000, 10000, 100000});
}

TEST_CASE("names round-trip") {
  for (auto p : {TimePolicy::optimize, TimePolicy::scaling, TimePolicy::fixed})
    CHECK(time_policy_from_string(to_string(p)) == p);
  for (auto f : {Figure::fig1a, Figure::fig1b, Figure::fig2}) CHECK(figure_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(figure_from_string("fig3"), std::invalid_argument);
  CHECK_THROWS_AS(time_policy_from_string("later"), std::invalid_argument);
}
