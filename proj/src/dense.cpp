#include "spingain/dense.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace spingain::dense {

namespace {

const cplx I{0.0, 1.0};

void check_size(int n) {
  if (n < 1 || n > kMaxAtoms)
    throw std::invalid_argument("dense oracle supports 1 <= N <= " + std::to_string(kMaxAtoms));
}

cplx trace_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

Matrix diag_phase(int n, const std::function<double(double)>& phase) {
  Matrix u = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) u(i, i) = std::polar(1.0, -phase(i - 0.5 * n));
  return u;
}

struct Realization {
  double weight;
  double prep_d;
  double echo_d;
};

}  // namespace

const Matrix& Spins::operator[](int axis) const {
  switch (axis) {
    case 0: return x;
    case 1: return y;
    case 2: return z;
  }
  throw std::out_of_range("spin axis must be 0, 1 or 2");
}

Spins spin_matrices(int n) {
  check_size(n);
  Matrix up = Matrix::Zero(n + 1, n + 1);
  Matrix z = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    z(i, i) = i - 0.5 * n;
    if (i < n) up(i + 1, i) = std::sqrt(static_cast<double>((n - i) * (i + 1)));
  }
  const Matrix down = up.adjoint();
  return {(up + down) / 2.0, (up - down) / (2.0 * I), z};
}

Vector coherent_state_x(int n) {
  const auto s = spin_matrices(n);
  Vector top = Vector::Zero(n + 1);
  top[n] = 1.0;
  const Matrix r = (-I * (std::numbers::pi / 2.0) * s.y).exp();
  Vector psi = r * top;
  // fix the global phase so the largest amplitude is real positive
  Eigen::Index k = 0;
  psi.cwiseAbs().maxCoeff(&k);
  psi *= std::conj(psi[k]) / std::abs(psi[k]);
  return psi;
}

Vector oat_state(int n, double chit) { return twist(n, chit) * coherent_state_x(n); }

Matrix twist(int n, double chitau) {
  check_size(n);
  return diag_phase(n, [&](double m) { return chitau * m * m; });
}

Matrix rotate_z(int n, double phi) {
  check_size(n);
  return diag_phase(n, [&](double m) { return phi * m; });
}

Matrix dephase(const Matrix& rho, double variance) {
  Matrix out = rho;
  for (Eigen::Index r = 0; r < rho.rows(); ++r)
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      const double k = static_cast<double>(r - c);
      out(r, c) *= std::exp(-0.5 * variance * k * k);
    }
  return out;
}

Matrix to_dense(const BandedOperator& op) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = op.element(r, c);
  return m;
}

std::vector<Matrix> basis_ops(Strategy strategy, const Spins& s, double chitau) {
  const Eigen::Index n = s.z.rows() - 1;
  auto half_anti = [](const Matrix& a, const Matrix& b) -> Matrix { return (a * b + b * a) / 2.0; };
  switch (strategy) {
    case Strategy::L: return {s.x, s.y, s.z};
    case Strategy::NL: return {s.y, s.z, half_anti(s.x, s.z)};
    case Strategy::Q:
      return {s.x, s.y, s.z, s.x * s.x, s.y * s.y, s.z * s.z,
              half_anti(s.x, s.y), half_anti(s.x, s.z), half_anti(s.y, s.z)};
    case Strategy::MAI: {
      const Matrix u = twist(static_cast<int>(n), chitau);
      return {u.adjoint() * s.x * u, u.adjoint() * s.y * u, s.z};
    }
    case Strategy::QFI: break;
  }
  throw std::invalid_argument("the QFI has no observable basis");
}

void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w) {
  if (nodes < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int k = 1; k < nodes; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  x.resize(nodes);
  w.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    x[k] = es.eigenvalues()[k];
    const double v = es.eigenvectors()(0, k);
    w[k] = v * v;
  }
}

GramData gram_data(const PreparationSpec& spec, Strategy strategy, double chitau,
                   int quadrature_nodes) {
  const int n = spec.n_atoms;
  const auto s = spin_matrices(n);
  const Vector psi = oat_state(n, spec.chit);
  const Matrix rho0 = psi * psi.adjoint();
  const auto ops = basis_ops(strategy, s, chitau);
  const auto d = static_cast<Eigen::Index>(ops.size());

  const NoiseModel& noise = spec.noise;
  std::vector<Realization> shots{{1.0, 0.0, 0.0}};
  double prep_var = 0.0, echo_var = 0.0;
  if (!noise.noiseless()) {
    if (noise.kind == NoiseKind::ballistic) {
      const double sd = std::sqrt(noise.epsilon * std::pow(n, noise.gamma));
      std::vector<double> x, w;
      gauss_hermite(quadrature_nodes, x, w);
      shots.clear();
      if (noise.same_shot || chitau == 0.0) {
        for (int i = 0; i < quadrature_nodes; ++i) shots.push_back({w[i], sd * x[i], sd * x[i]});
      } else {
        for (int i = 0; i < quadrature_nodes; ++i)
          for (int k = 0; k < quadrature_nodes; ++k)
            shots.push_back({w[i] * w[k], sd * x[i], sd * x[k]});
      }
    } else {
      prep_var = noise.epsilon * std::abs(spec.chit);
      echo_var = noise.epsilon * std::abs(chitau);
    }
  }

  GramData g;
  g.gamma = Eigen::MatrixXd::Zero(d, d);
  g.signal = Eigen::MatrixXd::Zero(d, 3);
  g.means = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  for (const auto& shot : shots) {
    const Matrix rp = rotate_z(n, spec.chit * shot.prep_d);
    const Matrix rho = dephase(rp * rho0 * rp.adjoint(), prep_var);
    const Matrix re = rotate_z(n, std::abs(chitau) * shot.echo_d);
    std::vector<Matrix> x;
    for (const auto& op : ops) x.push_back(re.adjoint() * op * re);
    for (Eigen::Index a = 0; a < d; ++a) {
      const Matrix xa = dephase(x[a], echo_var);
      g.means[a] += shot.weight * trace_product(rho, xa).real();
      for (int k = 0; k < 3; ++k)
        g.signal(a, k) += shot.weight * (-I * trace_product(rho, xa * s[k] - s[k] * xa)).real();
      for (Eigen::Index b = a; b < d; ++b)
        second(a, b) += shot.weight *
                        trace_product(rho, dephase((x[a] * x[b] + x[b] * x[a]) / 2.0, echo_var)).real();
    }
  }
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a; b < d; ++b)
      g.gamma(a, b) = g.gamma(b, a) = second(a, b) - g.means[a] * g.means[b];
  g.set_axis(Eigen::Vector3d::UnitZ());
  return g;
}

double qfi_pure(const Vector& psi) {
  const int n = static_cast<int>(psi.size()) - 1;
  const auto s = spin_matrices(n);
  Eigen::Matrix3d cov;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const cplx ab = psi.dot(((s[a] * s[b] + s[b] * s[a]) / 2.0) * psi);
      cov(a, b) = ab.real() - psi.dot(s[a] * psi).real() * psi.dot(s[b] * psi).real();
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  return 4.0 * es.eigenvalues()[2];
}

GainResult strategy_gain(const PreparationSpec& spec, Strategy strategy,
                         std::optional<double> chitau, int quadrature_nodes) {
  if (chitau && strategy != Strategy::MAI)
    throw std::invalid_argument("an echo time only applies to the MAI strategy");
  GainResult r;
  r.n_atoms = spec.n_atoms;
  r.chit = spec.chit;
  r.strategy = strategy;
  r.noise = spec.noise;
  r.alpha = spec.alpha;
  r.sigma = spec.sigma;
  if (strategy == Strategy::QFI) {
    if (!spec.noise.noiseless())
      throw std::invalid_argument("the QFI is only available for pure states");
    r.xi_inv_sq = qfi_pure(oat_state(spec.n_atoms, spec.chit)) / spec.n_atoms;
    return r;
  }
  r.chitau = strategy == Strategy::MAI ? chitau.value_or(-spec.chit) : 0.0;
  const auto g = gram_data(spec, strategy, r.chitau, quadrature_nodes);
  const auto ax = optimize_axis(g, spec.n_atoms);
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
  check_size(n_atoms);
  return optimize_time_with(
      [strategy](const PreparationSpec& spec) { return dense::strategy_gain(spec, strategy); }, n_atoms,
      strategy, noise, hint, rel_tol);
}

Matrix master_equation_rk4(int n, double chit, double epsilon, int steps) {
  if (steps < 1) throw std::invalid_argument("master_equation_rk4: steps must be positive");
  const auto s = spin_matrices(n);
  const Matrix z2 = s.z * s.z;
  auto rhs = [&](const Matrix& rho) -> Matrix {
    return -I * (z2 * rho - rho * z2) + epsilon * (s.z * rho * s.z - 0.5 * (z2 * rho + rho * z2));
  };
  const Vector psi = coherent_state_x(n);
  Matrix rho = psi * psi.adjoint();
  const double h = chit / steps;
  for (int i = 0; i < steps; ++i) {
    const Matrix k1 = rhs(rho);
    const Matrix k2 = rhs(rho + 0.5 * h * k1);
    const Matrix k3 = rhs(rho + 0.5 * h * k2);
    const Matrix k4 = rhs(rho + h * k3);
    rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

}  // namespace spingain::dense
