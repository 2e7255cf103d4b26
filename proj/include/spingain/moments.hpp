#pragma once

// Covariance (Gram) matrix and signal vector of an observable basis.
//
// For observables X_1..X_d and rotation generator S_n:
//   Gamma_ij = 1/2 <{X_i, X_j}> - <X_i><X_j>,   v_i = -i <[X_i, S_n]>.
// The signal is linear in n, so the engine returns the d x 3 matrix W with
// v = W n.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spingain/channels.hpp"
#include "spingain/dicke.hpp"

namespace spingain {

enum class Strategy { L, NL, Q, MAI, QFI };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct ObservableBasis {
  Strategy label = Strategy::L;
  SpinOperators generators;
  std::vector<BandedOperator> ops;
};

/// L = {Sx, Sy, Sz}; NL = {Sy, Sz, 1/2{Sx,Sz}}; Q = the nine operators up to
/// second order; MAI = {U^dag S_a U} with U = exp(-i chitau Sz^2).
ObservableBasis make_basis(Strategy label, const SpinOperators& spins, double chitau = 0.0);

struct GramData {
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd signal;  ///< d x 3, column g is -i<[X_i, S_g]>
  Eigen::VectorXd means;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::VectorXd v;

  std::size_t size() const { return static_cast<std::size_t>(means.size()); }
  /// Sets the rotation axis (must be unit within 1e-12) and recomputes v.
  void set_axis(const Eigen::Vector3d& n);
};

/// Pure-state route. Noise enters as joint Gaussian phase weights on the
/// contraction terms (see PhaseNoise); the default is noiseless.
GramData gram_data(const DickeVector& state, const ObservableBasis& basis,
                   const Eigen::Vector3d& axis = Eigen::Vector3d::UnitZ(),
                   const PhaseNoise& noise = {});

/// Mixed-state route: Tr[rho E^dag(.)] with `echo` the (Markovian) kernel
/// applied to the measured operators and their products.
GramData gram_data(const BandedDensity& rho, const ObservableBasis& basis,
                   const Eigen::Vector3d& axis = Eigen::Vector3d::UnitZ(),
                   const NoiseKernel& echo = identity_kernel());

/// 3 x 3 spin covariance matrix of a pure state.
Eigen::Matrix3d spin_covariance(const DickeVector& state, const SpinOperators& spins);

}  // namespace spingain
