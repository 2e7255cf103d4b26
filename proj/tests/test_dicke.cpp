#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spingain/dense.hpp"
#include "spingain/dicke.hpp"

using namespace spingain;

namespace {

std::vector<double> twist_phases(const DickeVector& s, double chit) {
  std::vector<double> ph;
  const auto w = s.window();
  for (std::size_t i = w.first; i < w.end(); ++i) {
    const double m = magnetization(s.n_atoms(), i);
    ph.push_back(chit * m * m);
  }
  return ph;
}

double max_entry_diff(const BandedOperator& a, const dense::Matrix& b) {
  return (dense::to_dense(a) - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("coherent state amplitudes for N = 2") {
  const auto s = coherent_state_x(2);
  REQUIRE(s.window().size == 3);
  CHECK(s.amplitude(0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.amplitude(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.amplitude(2).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(s.amplitude(1).imag()) < 1e-16);
}

TEST_CASE("coherent state is the S_x eigenstate") {
  for (int n : {1, 5, 64, 1000}) {
    const auto s = coherent_state_x(n);
    const auto sp = spin_operators(n);
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    CHECK(std::abs(expectation(s, sp.x).real() - 0.5 * n) < 1e-9 * n);
    CHECK(std::abs(expectation(s, sp.y)) < 1e-12 * n);
  }
  const auto s4 = coherent_state_x(4);
  const auto sz = spin_operators(4).z;
  CHECK(expectation(s4, band_product(sz, sz)).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coherent state with tail cutoff at large N") {
  const int n = 1 << 30;
  const auto s = coherent_state_x(n, 1e-36);
  CHECK(s.window().size < 1000000);
  CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
  const auto sp = spin_operators(n, s.window());
  CHECK(std::abs(expectation(s, sp.x).real() / (0.5 * n) - 1.0) < 1e-9);
  const double var_z = expectation(s, band_product(sp.z, sp.z)).real();
  CHECK(var_z / (0.25 * n) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coherent state rejects N < 1") {
  CHECK_THROWS_AS(coherent_state_x(0), std::invalid_argument);
  CHECK_THROWS_AS(coherent_state_x(-3), std::invalid_argument);
  CHECK_THROWS_AS(spin_operators(0), std::invalid_argument);
}

TEST_CASE("spin operators for one and two spins") {
  const auto s1 = spin_operators(1);
  CHECK(s1.z.element(0, 0) == cplx(-0.5));
  CHECK(s1.z.element(1, 1) == cplx(0.5));
  const auto s2 = spin_operators(2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s2.x.element(0, 1) - r) < 1e-15);
  CHECK(std::abs(s2.x.element(1, 2) - r) < 1e-15);
  CHECK(std::abs(s2.x.element(0, 2)) == 0.0);
  for (int a = 0; a < 3; ++a) CHECK(s2[a].check_hermitian(1e-15));
}

TEST_CASE("su(2) relations hold entrywise") {
  for (int n : {1, 2, 7, 16, 64}) {
    const auto s = spin_operators(n);
    for (int a = 0; a < 3; ++a) {
      // -i[S_a, S_b] = S_c for cyclic (a, b, c)
      const auto c = band_i_commutator(s[a], s[(a + 1) % 3]);
      const auto diff = dense::to_dense(c) - dense::to_dense(s[(a + 2) % 3]);
      CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("banded algebra against dense matrices") {
  const auto s = spin_operators(2);
  const auto d = dense::spin_matrices(2);
  auto half_anti = 0.5 * band_anticommutator(s.x, s.z);
  CHECK(max_entry_diff(half_anti, (d.x * d.z + d.z * d.x) / 2.0) < 1e-15);

  const auto zz = band_commutator(s.z, s.z);
  CHECK(zz.max_abs() == 0.0);

  const auto s9 = spin_operators(9);
  const auto d9 = dense::spin_matrices(9);
  const auto xy = band_product(s9.x, s9.y);
  CHECK(xy.max_band() <= 2);
  CHECK(max_entry_diff(xy, d9.x * d9.y) < 1e-13);
  const std::vector<double> coeffs{0.3, -1.2, 2.0};
  const std::vector<BandedOperator> ops{s9.x, s9.y, s9.z};
  CHECK(max_entry_diff(band_linear_combination(coeffs, ops), 0.3 * d9.x - 1.2 * d9.y + 2.0 * d9.z) < 1e-14);

  CHECK_THROWS_AS(band_product(s.x, spin_operators(3).x), std::invalid_argument);
  CHECK_THROWS_AS(band_linear_combination(std::vector<double>{1.0}, ops), std::invalid_argument);
}

TEST_CASE("twisted state expectations") {
  const int n = 32;
  const auto s0 = coherent_state_x(n);
  const auto psi = apply_diagonal_phase(s0, twist_phases(s0, 0.1));
  const auto sp = spin_operators(n);
  const dense::Vector ref = dense::oat_state(n, 0.1);
  const auto ds = dense::spin_matrices(n);
  for (int a = 0; a < 3; ++a)
    CHECK(std::abs(expectation(psi, sp[a]) - ref.dot(ds[a] * ref)) < 1e-12);

  const int m = 16;
  const double chit = 0.05;
  const auto c = coherent_state_x(m);
  const auto t = apply_diagonal_phase(c, twist_phases(c, chit));
  const double expect = 0.5 * m * std::pow(std::cos(chit), m - 1);
  CHECK(std::abs(expectation(t, spin_operators(m).x).real() - expect) < 1e-10);
}

TEST_CASE("diagonal phases") {
  const auto s = coherent_state_x(16);
  const auto same = apply_diagonal_phase(s, std::vector<double>(17, 0.0));
  const auto full = apply_diagonal_phase(s, twist_phases(s, 2.0 * std::numbers::pi));
  for (std::size_t i = 0; i <= 16; ++i) {
    CHECK(same.amplitude(i) == s.amplitude(i));
    CHECK(std::abs(full.amplitude(i) - s.amplitude(i)) < 1e-12);
  }
  const auto twisted = apply_diagonal_phase(s, twist_phases(s, 0.37));
  CHECK(std::abs(twisted.norm_squared() - 1.0) < 1e-14);
  CHECK_THROWS_AS(apply_diagonal_phase(s, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("S_z moments are conserved by twisting") {
  const int n = 40;
  const auto s = coherent_state_x(n);
  const auto sp = spin_operators(n);
  const auto z2 = band_product(sp.z, sp.z);
  const auto z4 = band_product(z2, z2);
  const auto t = apply_diagonal_phase(s, twist_phases(s, 0.3));
  CHECK(expectation(t, z2).real() == doctest::Approx(expectation(s, z2).real()).epsilon(1e-12));
  CHECK(expectation(t, z4).real() == doctest::Approx(expectation(s, z4).real()).epsilon(1e-12));
}

TEST_CASE("banded density from a pure state") {
  const int n = 24;
  const auto s = coherent_state_x(n);
  const auto psi = apply_diagonal_phase(s, twist_phases(s, 0.2));
  const auto rho = BandedDensity::from_pure(psi, 4);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  CHECK(rho.coherences().check_hermitian(1e-14));
  const auto sp = spin_operators(n);
  const auto xz = band_product(sp.x, sp.z);
  CHECK(std::abs(expectation(rho, xz) - expectation(psi, xz)) < 1e-12);
  const auto wide = band_product(band_product(sp.x, sp.x), band_product(sp.x, band_product(sp.x, sp.x)));
  CHECK_THROWS_AS(expectation(rho, wide), BandOverflowError);
  CHECK_THROWS_AS(expectation(psi, spin_operators(n + 1).x), std::invalid_argument);
}
