#pragma once

// Symmetric-subspace (Dicke) states and banded collective-spin operators.
//
// Index convention: level i = 0..N corresponds to magnetization m = i - N/2.
// States, operators and densities may hold only a contiguous window of
// levels; everything outside the window is zero.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spingain {

using cplx = std::complex<double>;

/// Thrown when a contraction needs coherences or bands that were not stored.
class BandOverflowError : public std::runtime_error {
 public:
  explicit BandOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Contiguous range [first, first + size) of Dicke levels.
struct Window {
  std::size_t first = 0;
  std::size_t size = 0;

  std::size_t end() const { return first + size; }
  bool contains(const Window& other) const {
    return other.first >= first && other.end() <= end();
  }
  bool operator==(const Window&) const = default;
};

Window full_window(int n_atoms);

/// Grows `w` by `margin` levels on each side, clipped to 0..N.
Window widen(const Window& w, std::size_t margin, int n_atoms);

inline double magnetization(int n_atoms, std::size_t level) {
  return static_cast<double>(level) - 0.5 * n_atoms;
}

/// Pure state in the symmetric subspace.
class DickeVector {
 public:
  DickeVector(int n_atoms, std::size_t first, std::vector<cplx> amplitudes);

  int n_atoms() const { return n_atoms_; }
  Window window() const { return {first_, amps_.size()}; }
  std::span<const cplx> amplitudes() const { return amps_; }
  /// Amplitude at global level; zero outside the stored window.
  cplx amplitude(std::size_t level) const;
  double norm_squared() const;

 private:
  int n_atoms_;
  std::size_t first_;
  std::vector<cplx> amps_;
};

/// Spin-coherent state with S_x eigenvalue N/2. Levels whose probability is
/// below `tail_cutoff` times the peak probability are not stored.
DickeVector coherent_state_x(int n_atoms, double tail_cutoff = 0.0);

/// c_i -> exp(-i phases[i]) c_i, `phases` indexed over the state's window.
DickeVector apply_diagonal_phase(const DickeVector& state, std::span<const double> phases);

/// Hermitian-or-not operator stored as diagonals k = -K..K.
///
/// Entry j of band k is A(j + k, j) for k >= 0 and A(j, j - k) for k < 0,
/// i.e. j is the smaller of the two local indices. Band k has size - |k|
/// entries.
class BandedOperator {
 public:
  BandedOperator(int n_atoms, Window window, int max_band, bool hermitian);

  int n_atoms() const { return n_atoms_; }
  Window window() const { return window_; }
  std::size_t dim() const { return window_.size; }
  int max_band() const { return max_band_; }
  bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  std::size_t band_size(int k) const;
  std::span<cplx> band(int k);
  std::span<const cplx> band(int k) const;

  /// Element by local (window) row/column; zero outside the stored bands.
  cplx element(std::size_t row, std::size_t col) const;

  /// True when band(-k) equals conj(band(k)) within `tol` (absolute).
  bool check_hermitian(double tol = 1e-12) const;
  /// Largest |entry|.
  double max_abs() const;
  /// Drops outer bands whose entries are all below `tol` in magnitude.
  BandedOperator trimmed(double tol = 0.0) const;
  /// Same operator embedded in a larger band limit (new bands zero).
  BandedOperator with_max_band(int max_band) const;

  BandedOperator& operator+=(const BandedOperator& other);
  BandedOperator& operator-=(const BandedOperator& other);
  BandedOperator& operator*=(cplx factor);
  BandedOperator& operator*=(double factor);

 private:
  std::size_t offset(int k) const { return static_cast<std::size_t>(k + max_band_); }

  int n_atoms_;
  Window window_;
  int max_band_;
  bool hermitian_;
  std::vector<std::vector<cplx>> bands_;
};

BandedOperator operator+(BandedOperator a, const BandedOperator& b);
BandedOperator operator-(BandedOperator a, const BandedOperator& b);
BandedOperator operator*(double s, BandedOperator a);
BandedOperator operator*(cplx s, BandedOperator a);

struct SpinOperators {
  BandedOperator x;
  BandedOperator y;
  BandedOperator z;

  const BandedOperator& operator[](int axis) const;
};

SpinOperators spin_operators(int n_atoms);
SpinOperators spin_operators(int n_atoms, Window window);

BandedOperator identity_operator(int n_atoms, Window window);
BandedOperator diagonal_operator(int n_atoms, Window window, std::span<const double> diag);

/// Exact banded product AB (restricted to the common window).
BandedOperator band_product(const BandedOperator& a, const BandedOperator& b);
/// [A, B]; anti-Hermitian when A and B are Hermitian.
BandedOperator band_commutator(const BandedOperator& a, const BandedOperator& b);
/// -i[A, B], so that [A, B] = i * band_i_commutator(A, B); Hermitian for
/// Hermitian inputs.
BandedOperator band_i_commutator(const BandedOperator& a, const BandedOperator& b);
/// AB + BA.
BandedOperator band_anticommutator(const BandedOperator& a, const BandedOperator& b);
/// sum_i coeffs[i] * ops[i]; Hermitian when all ops are Hermitian.
BandedOperator band_linear_combination(std::span<const double> coeffs,
                                       std::span<const BandedOperator> ops);

/// Multiplies band k by factor(k) in place-copy.
template <class F>
BandedOperator scale_bands(BandedOperator op, F&& factor) {
  for (int k = -op.max_band(); k <= op.max_band(); ++k) {
    const auto f = factor(k);
    for (auto& e : op.band(k)) e *= f;
  }
  return op;
}

/// Mixed state stored as coherence bands rho(m, m') with |m - m'| <= K.
class BandedDensity {
 public:
  BandedDensity(BandedOperator coherences);

  static BandedDensity from_pure(const DickeVector& state, int max_band);

  int n_atoms() const { return rho_.n_atoms(); }
  Window window() const { return rho_.window(); }
  int max_band() const { return rho_.max_band(); }
  const BandedOperator& coherences() const { return rho_; }
  double trace() const;

  /// Multiplies coherence band k by decay(k).
  template <class F>
  BandedDensity dephased(F&& decay) const {
    return BandedDensity(scale_bands(rho_, [&](int k) { return decay(k); }));
  }

 private:
  BandedOperator rho_;
};

/// <psi|A|psi>. The operator window must contain the state window.
cplx expectation(const DickeVector& state, const BandedOperator& a);
/// Tr[A rho]. Throws BandOverflowError if A has bands beyond the stored
/// coherences.
cplx expectation(const BandedDensity& rho, const BandedOperator& a);

/// Per-band pieces of <psi|A|psi>: result[k + K] = <psi|A^(k)|psi>.
std::vector<cplx> band_expectations(const DickeVector& state, const BandedOperator& a);

/// result[(ka + Ka) * (2 Kb + 1) + (kb + Kb)] = <psi|A^(ka) B^(kb)|psi>.
std::vector<cplx> band_pair_expectations(const DickeVector& state, const BandedOperator& a,
                                         const BandedOperator& b);

}  // namespace spingain
