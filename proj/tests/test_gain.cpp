#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spingain/dense.hpp"
#include "spingain/gain.hpp"

using namespace spingain;

namespace {

GramData at_state(const DickeVector& psi, Strategy s, double chitau = 0.0) {
  return gram_data(psi, make_basis(s, spin_operators(psi.n_atoms(), psi.window()), chitau));
}

// Brute-force maximum of (v.c)^2 / (N c^T Gamma c) over unit c in R^3:
// spherical grid, then a shrinking pattern search.
double sphere_search(const Eigen::Vector3d& v, const Eigen::Matrix3d& gamma, int n) {
  auto f = [&](double th, double ph) {
    const Eigen::Vector3d c(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    const double num = v.dot(c);
    return num * num / (n * c.dot(gamma * c));
  };
  double bt = 0.0, bp = 0.0, best = -1.0;
  for (int i = 0; i <= 90; ++i)
    for (int j = 0; j < 180; ++j) {
      const double th = std::numbers::pi * i / 90.0, ph = 2.0 * std::numbers::pi * j / 180.0;
      const double val = f(th, ph);
      if (val > best) best = val, bt = th, bp = ph;
    }
  for (double step = 0.05; step > 1e-12; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        const double val = f(bt + dt, bp + dp);
        if (val > best) best = val, bt += dt, bp += dp, moved = true;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("coherent state sits at the standard quantum limit") {
  for (int n : {10, 100, 1000}) {
    const auto ax = optimize_axis(at_state(coherent_state_x(n), Strategy::L), n);
    CHECK(ax.gain.xi_inv_sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ax.degenerate);
  }
}

TEST_CASE("single observable reduces to the scalar quotient") {
  GramData g;
  g.gamma = Eigen::MatrixXd::Constant(1, 1, 2.5);
  g.signal = Eigen::MatrixXd::Zero(1, 3);
  g.signal(0, 2) = 7.0;
  g.means = Eigen::VectorXd::Zero(1);
  g.set_axis(Eigen::Vector3d::UnitZ());
  const auto r = rayleigh_gain(g, 10);
  CHECK(r.xi_inv_sq == doctest::Approx(49.0 / (10 * 2.5)).epsilon(1e-15));
  CHECK(r.coefficients.size() == 1);
  CHECK(!r.null_signal);

  g.set_axis(Eigen::Vector3d::UnitX());
  const auto z = rayleigh_gain(g, 10);
  CHECK(z.null_signal);
  CHECK(z.xi_inv_sq == 0.0);
  CHECK_THROWS_AS(rayleigh_gain(g, 0), std::invalid_argument);
}

TEST_CASE("linear gain against an exhaustive search over coefficients") {
  const int n = 100;
  const double chit = std::pow(3.0, 1.0 / 6.0) * std::pow(n, -2.0 / 3.0);
  auto g = at_state(oat_state(n, chit), Strategy::L);
  const auto ax = optimize_axis(g, n);
  g.set_axis(ax.axis);
  const double brute = sphere_search(g.v, g.gamma, n);
  CHECK(ax.gain.xi_inv_sq == doctest::Approx(brute).epsilon(1e-6));
  // the coefficients solve the problem they report
  const Eigen::VectorXd c = ax.gain.coefficients;
  const double direct = std::pow(g.v.dot(c), 2) / (n * c.dot(g.gamma * c));
  CHECK(direct == doctest::Approx(ax.gain.xi_inv_sq).epsilon(1e-12));
}

TEST_CASE("gain does not depend on the coefficient scale or the pseudo-inverse cutoff") {
  const int n = 300;
  const double chit = std::pow(n, -0.6);
  const auto s = spin_operators(n);
  for (auto label : {Strategy::L, Strategy::NL, Strategy::Q, Strategy::MAI}) {
    const auto g = gram_data(oat_state(n, chit), make_basis(label, s, label == Strategy::MAI ? -chit : 0.0));
    const double a = optimize_axis(g, n, 1e-10).gain.xi_inv_sq;
    const double b = optimize_axis(g, n, 1e-14).gain.xi_inv_sq;
    CHECK(std::abs(a - b) < 1e-6 * b);
  }
  // near the coherent state Gamma is singular along symmetry directions
  const auto g0 = gram_data(oat_state(n, 1e-4), make_basis(Strategy::Q, s));
  CHECK(std::abs(optimize_axis(g0, n, 1e-10).gain.xi_inv_sq / optimize_axis(g0, n, 1e-14).gain.xi_inv_sq - 1.0) <
        1e-6);

  auto g = gram_data(oat_state(n, chit), make_basis(Strategy::Q, s));
  g.set_axis(optimize_axis(g, n).axis);
  const auto r = rayleigh_gain(g, n);
  for (double scale : {1e-3, 7.0}) {
    const Eigen::VectorXd c = scale * r.coefficients;
    CHECK(std::pow(g.v.dot(c), 2) / (n * c.dot(g.gamma * c)) == doctest::Approx(r.xi_inv_sq).epsilon(1e-10));
  }
}

TEST_CASE("zero twisting gives unit gain with a degenerate axis") {
  for (auto s : {Strategy::L, Strategy::NL, Strategy::Q, Strategy::MAI, Strategy::QFI}) {
    const auto r = strategy_gain(PreparationSpec::at_time(64, 0.0), s);
    CHECK(r.xi_inv_sq == doctest::Approx(1.0).epsilon(1e-12));
    if (s != Strategy::QFI) CHECK(r.degenerate);
  }
}

TEST_CASE("nonlinear optimum lies in the y-z plane") {
  const int n = 200;
  auto g = at_state(oat_state(n, std::pow(n, -0.6)), Strategy::NL);
  const auto ax = optimize_axis(g, n);
  CHECK(std::abs(ax.axis[0]) < 1e-6);
  const auto grid = grid_search_axis(g, n);
  CHECK(grid.gain.xi_inv_sq == doctest::Approx(ax.gain.xi_inv_sq).epsilon(1e-9));
  CHECK(ax.gain.xi_inv_sq >= grid.gain.xi_inv_sq * (1.0 - 1e-12));
}

TEST_CASE("echo axis: full search equals the y-z plane search") {
  const int n = 1000;
  const double chit = std::pow(n, -0.6);
  auto g = at_state(oat_state(n, chit, kTailCutoff), Strategy::MAI, -chit);
  const auto full = optimize_axis(g, n);
  auto plane_gain = [&](double th) {
    g.set_axis({0.0, std::cos(th), std::sin(th)});
    return rayleigh_gain(g, n).xi_inv_sq;
  };
  double best_th = 0.0, plane = 0.0;
  for (int i = 0; i < 720; ++i) {
    const double th = std::numbers::pi * i / 720.0;
    if (const double val = plane_gain(th); val > plane) plane = val, best_th = th;
  }
  double lo = best_th - std::numbers::pi / 720.0, hi = best_th + std::numbers::pi / 720.0;
  for (int it = 0; it < 100; ++it) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    (plane_gain(a) < plane_gain(b) ? lo : hi) = (plane_gain(a) < plane_gain(b) ? a : b);
  }
  plane = std::max(plane, plane_gain(0.5 * (lo + hi)));
  CHECK(std::abs(full.gain.xi_inv_sq - plane) / full.gain.xi_inv_sq < 1e-6);
}

TEST_CASE("strategies are nested below the Fisher information") {
  for (double alpha : {0.5, 0.6, 0.75}) {
    const auto spec = PreparationSpec::from_scaling(400, alpha, 1.0);
    const double l = strategy_gain(spec, Strategy::L).xi_inv_sq;
    const double nl = strategy_gain(spec, Strategy::NL).xi_inv_sq;
    const double q = strategy_gain(spec, Strategy::Q).xi_inv_sq;
    const double mai = strategy_gain(spec, Strategy::MAI).xi_inv_sq;
    const double fq = strategy_gain(spec, Strategy::QFI).xi_inv_sq;
    CHECK(l <= nl * (1 + 1e-12));
    CHECK(nl <= q * (1 + 1e-12));
    CHECK(q <= fq * (1 + 1e-12));
    CHECK(mai <= fq * (1 + 1e-12));
  }
}

TEST_CASE("Fisher information of pure states") {
  CHECK(qfi_pure(coherent_state_x(500)) == doctest::Approx(500.0).epsilon(1e-12));
  const int n = 40;
  for (double chit : {0.03, 0.2}) {
    Eigen::Vector3d axis;
    const double f = qfi_pure(oat_state(n, chit), axis);
    CHECK(f == doctest::Approx(dense::qfi_pure(dense::oat_state(n, chit))).epsilon(1e-12));
    CHECK(axis.norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(strategy_gain(PreparationSpec::at_time(10, 0.1, {NoiseKind::diffusive, 0.1}), Strategy::QFI),
                  std::invalid_argument);
}

TEST_CASE("banded engine against the dense oracle") {
  const NoiseModel noises[] = {{}, {NoiseKind::ballistic, 0.2, 0.5}, {NoiseKind::diffusive, 0.2}};
  for (int n : {8, 16, 32}) {
    for (const auto& noise : noises)
      for (auto s : {Strategy::L, Strategy::NL, Strategy::Q, Strategy::MAI}) {
        const auto spec = PreparationSpec::from_scaling(n, 0.55, 1.3, noise);
        const double a = strategy_gain(spec, s).xi_inv_sq;
        const double b = dense::strategy_gain(spec, s).xi_inv_sq;
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
      }
  }
  // independent fields for preparation and echo
  NoiseModel indep{NoiseKind::ballistic, 0.2, 0.5};
  indep.same_shot = false;
  const auto spec = PreparationSpec::from_scaling(16, 0.6, 1.0, indep);
  CHECK(strategy_gain(spec, Strategy::MAI).xi_inv_sq ==
        doctest::Approx(dense::strategy_gain(spec, Strategy::MAI, std::nullopt, 60).xi_inv_sq).epsilon(1e-10));
}

TEST_CASE("echo time") {
  const auto spec = PreparationSpec::from_scaling(200, 0.55, 1.0);
  const auto def = strategy_gain(spec, Strategy::MAI);
  CHECK(def.chitau == doctest::Approx(-spec.chit));
  CHECK(strategy_gain(spec, Strategy::MAI, 0.0).xi_inv_sq <= def.xi_inv_sq);
  CHECK_THROWS_AS(strategy_gain(spec, Strategy::L, -0.01), std::invalid_argument);
  const auto sweep = sweep_echo_time(spec);
  CHECK(sweep.best_gain >= sweep.gain_at_minus_t * (1.0 - 1e-12));
  CHECK(sweep.gain_at_minus_t == doctest::Approx(def.xi_inv_sq).epsilon(1e-12));
}

TEST_CASE("time optimization") {
  const int n = 2000;
  const auto r = optimize_time(n, Strategy::L);
  // neighbouring times do not do better
  for (double f : {0.97, 1.03}) {
    const auto g = strategy_gain(PreparationSpec::at_time(n, r.chit * f), Strategy::L);
    CHECK(g.xi_inv_sq <= r.xi_inv_sq);
  }
  CHECK(r.iterations > 0);
  // an off-centre hint fails the three-point check and goes through the grid
  const auto far = optimize_time(n, Strategy::L, {}, r.chit * 3.0);
  CHECK(far.xi_inv_sq == doctest::Approx(r.xi_inv_sq).epsilon(1e-9));
  CHECK_THROWS_AS(optimize_time(2, Strategy::L), std::invalid_argument);

  // dense and banded optimizations agree
  const auto a = optimize_time(40, Strategy::Q);
  const auto b = dense::optimize_time(40, Strategy::Q);
  CHECK(a.xi_inv_sq == doctest::Approx(b.xi_inv_sq).epsilon(1e-10));
}

TEST_CASE("Monte-Carlo gain with jackknife error") {
  const auto spec = PreparationSpec::from_scaling(24, 0.6, 1.0, {NoiseKind::ballistic, 0.5, 0.65});
  McRequest req;
  req.n_atoms = 24;
  req.chit = spec.chit;
  req.epsilon = 0.5;
  req.gamma = 0.65;
  req.seed = 4242;
  req.samples = 100000;
  const auto s = spin_operators(24);
  req.readout = make_basis(Strategy::NL, s).ops;
  const auto mc = mc_gain(ballistic_mc_oracle(req), 24);
  const double exact = strategy_gain(spec, Strategy::NL).xi_inv_sq;
  CHECK(mc.stderr > 0.0);
  CHECK(std::abs(mc.xi_inv_sq - exact) < 3.0 * mc.stderr);
}
