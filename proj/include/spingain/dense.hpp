#pragma once

// Dense brute-force reference for small N (full (N+1) x (N+1) matrices).
// Independent of the banded engine: the coherent state comes from a matrix
// exponential, ballistic noise from Gauss-Hermite quadrature over D and
// diffusive noise from the elementwise channel on the density matrix.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spingain/channels.hpp"
#include "spingain/gain.hpp"
#include "spingain/moments.hpp"

namespace spingain::dense {

inline constexpr int kMaxAtoms = 64;

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Spins {
  Matrix x, y, z;
  const Matrix& operator[](int axis) const;
};

/// Throws std::invalid_argument above kMaxAtoms.
Spins spin_matrices(int n_atoms);
Vector coherent_state_x(int n_atoms);
Vector oat_state(int n_atoms, double chit);
/// exp(-i chitau S_z^2).
Matrix twist(int n_atoms, double chitau);
/// exp(-i phi S_z).
Matrix rotate_z(int n_atoms, double phi);
/// rho(m, m') -> rho(m, m') exp(-variance (m - m')^2 / 2).
Matrix dephase(const Matrix& rho, double variance);
Matrix to_dense(const BandedOperator& op);

std::vector<Matrix> basis_ops(Strategy strategy, const Spins& s, double chitau = 0.0);

/// Nodes and weights for E[f(x)], x ~ Normal(0, 1).
void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w);

GramData gram_data(const PreparationSpec& spec, Strategy strategy, double chitau = 0.0,
                   int quadrature_nodes = 80);

GainResult strategy_gain(const PreparationSpec& spec, Strategy strategy,
                         std::optional<double> chitau = std::nullopt, int quadrature_nodes = 80);

GainResult optimize_time(int n_atoms, Strategy strategy, const NoiseModel& noise = {},
                         std::optional<double> hint = std::nullopt, double rel_tol = 1e-6);

double qfi_pure(const Vector& psi);

/// Classical RK4 integration of the dephasing master equation
/// d rho/dt = -i chi [S_z^2, rho] + gamma_c (S_z rho S_z - 1/2 {S_z^2, rho})
/// from the coherent state, in units chi = 1.
Matrix master_equation_rk4(int n_atoms, double chit, double epsilon, int steps);

}  // namespace spingain::dense
