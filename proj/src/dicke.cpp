#include "spingain/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spingain {

namespace {

void require_positive(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("number of atoms must be >= 1");
}

void require_same_space(const BandedOperator& a, const BandedOperator& b) {
  if (a.n_atoms() != b.n_atoms()) throw std::invalid_argument("operators act on different N");
  if (!(a.window() == b.window())) throw std::invalid_argument("operators have different windows");
}

void require_state_inside(const Window& state, const BandedOperator& a) {
  if (!a.window().contains(state))
    throw std::invalid_argument("operator window does not cover the state window");
}

}  // namespace

Window full_window(int n_atoms) {
  require_positive(n_atoms);
  return {0, static_cast<std::size_t>(n_atoms) + 1};
}

Window widen(const Window& w, std::size_t margin, int n_atoms) {
  const std::size_t first = w.first > margin ? w.first - margin : 0;
  const std::size_t end = std::min(w.end() + margin, static_cast<std::size_t>(n_atoms) + 1);
  return {first, end - first};
}

// ---------------------------------------------------------------------------
// DickeVector

DickeVector::DickeVector(int n_atoms, std::size_t first, std::vector<cplx> amplitudes)
    : n_atoms_(n_atoms), first_(first), amps_(std::move(amplitudes)) {
  require_positive(n_atoms);
  if (amps_.empty() || first_ + amps_.size() > static_cast<std::size_t>(n_atoms) + 1)
    throw std::invalid_argument("amplitude window exceeds N + 1 levels");
}

cplx DickeVector::amplitude(std::size_t level) const {
  if (level < first_ || level >= first_ + amps_.size()) return {};
  return amps_[level - first_];
}

double DickeVector::norm_squared() const {
  double s = 0.0;
  for (const auto& c : amps_) s += std::norm(c);
  return s;
}

DickeVector coherent_state_x(int n_atoms, double tail_cutoff) {
  if (n_atoms < 1) throw std::invalid_argument("coherent_state_x: N must be >= 1");
  const std::size_t n = static_cast<std::size_t>(n_atoms);
  const std::size_t centre = n / 2;
  const double nd = static_cast<double>(n);

  // log c_{i+1} - log c_i = 0.5 log((N - i) / (i + 1)), accumulated outward
  // from the peak so the stored logs stay O(1) near the bulk. With a cutoff
  // the walk stops once the tail is negligible, so the cost is O(sqrt N).
  const double floor_log = tail_cutoff > 0.0 ? 0.5 * std::log(tail_cutoff) : -HUGE_VAL;
  std::vector<double> up{0.0}, down;
  for (std::size_t i = centre; i < n; ++i) {
    const double di = static_cast<double>(i);
    const double next = up.back() + 0.5 * std::log1p((nd - 2.0 * di - 1.0) / (di + 1.0));
    if (next < floor_log) break;
    up.push_back(next);
  }
  double last = 0.0;
  for (std::size_t i = centre; i > 0; --i) {
    const double di = static_cast<double>(i - 1);
    const double next = last - 0.5 * std::log1p((nd - 2.0 * di - 1.0) / (di + 1.0));
    if (next < floor_log) break;
    down.push_back(last = next);
  }
  const std::size_t lo = centre - down.size(), hi = centre + up.size() - 1;
  std::vector<double> logc(down.rbegin(), down.rend());
  logc.insert(logc.end(), up.begin(), up.end());

  std::vector<cplx> amps(hi - lo + 1);
  double norm = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double a = std::exp(logc[i - lo]);
    amps[i - lo] = a;
    norm += a * a;
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto& a : amps) a *= inv;
  return DickeVector(n_atoms, lo, std::move(amps));
}

DickeVector apply_diagonal_phase(const DickeVector& state, std::span<const double> phases) {
  const auto amps = state.amplitudes();
  if (phases.size() != amps.size())
    throw std::invalid_argument("apply_diagonal_phase: phase count does not match state window");
  std::vector<cplx> out(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i)
    out[i] = amps[i] * std::polar(1.0, -phases[i]);
  return DickeVector(state.n_atoms(), state.window().first, std::move(out));
}

// ---------------------------------------------------------------------------
// BandedOperator

BandedOperator::BandedOperator(int n_atoms, Window window, int max_band, bool hermitian)
    : n_atoms_(n_atoms), window_(window), max_band_(max_band), hermitian_(hermitian) {
  require_positive(n_atoms);
  if (window.size == 0 || window.end() > static_cast<std::size_t>(n_atoms) + 1)
    throw std::invalid_argument("operator window exceeds N + 1 levels");
  if (max_band < 0) throw std::invalid_argument("max_band must be non-negative");
  max_band_ = std::min<int>(max_band, static_cast<int>(window.size) - 1);
  bands_.resize(2 * static_cast<std::size_t>(max_band_) + 1);
  for (int k = -max_band_; k <= max_band_; ++k) bands_[offset(k)].assign(band_size(k), cplx{});
}

std::size_t BandedOperator::band_size(int k) const {
  const std::size_t ak = static_cast<std::size_t>(std::abs(k));
  return ak < window_.size ? window_.size - ak : 0;
}

std::span<cplx> BandedOperator::band(int k) {
  if (std::abs(k) > max_band_) throw BandOverflowError("band index outside stored range");
  return bands_[offset(k)];
}

std::span<const cplx> BandedOperator::band(int k) const {
  if (std::abs(k) > max_band_) throw BandOverflowError("band index outside stored range");
  return bands_[offset(k)];
}

cplx BandedOperator::element(std::size_t row, std::size_t col) const {
  const long k = static_cast<long>(row) - static_cast<long>(col);
  if (std::labs(k) > max_band_ || row >= dim() || col >= dim()) return {};
  return bands_[offset(static_cast<int>(k))][std::min(row, col)];
}

bool BandedOperator::check_hermitian(double tol) const {
  for (int k = 0; k <= max_band_; ++k) {
    const auto& up = bands_[offset(k)];
    const auto& down = bands_[offset(-k)];
    for (std::size_t j = 0; j < up.size(); ++j)
      if (std::abs(up[j] - std::conj(down[j])) > tol) return false;
  }
  return true;
}

double BandedOperator::max_abs() const {
  double m = 0.0;
  for (const auto& b : bands_)
    for (const auto& e : b) m = std::max(m, std::abs(e));
  return m;
}

BandedOperator BandedOperator::trimmed(double tol) const {
  int k_keep = 0;
  for (int k = max_band_; k > 0; --k) {
    bool nonzero = false;
    for (int s : {k, -k})
      for (const auto& e : bands_[offset(s)])
        if (std::abs(e) > tol) nonzero = true;
    if (nonzero) {
      k_keep = k;
      break;
    }
  }
  BandedOperator out(n_atoms_, window_, k_keep, hermitian_);
  for (int k = -k_keep; k <= k_keep; ++k) out.bands_[out.offset(k)] = bands_[offset(k)];
  return out;
}

BandedOperator BandedOperator::with_max_band(int max_band) const {
  BandedOperator out(n_atoms_, window_, std::max(max_band, max_band_), hermitian_);
  for (int k = -max_band_; k <= max_band_; ++k) out.bands_[out.offset(k)] = bands_[offset(k)];
  return out;
}

BandedOperator& BandedOperator::operator+=(const BandedOperator& other) {
  require_same_space(*this, other);
  if (other.max_band_ > max_band_) *this = with_max_band(other.max_band_);
  for (int k = -other.max_band_; k <= other.max_band_; ++k) {
    auto& dst = bands_[offset(k)];
    const auto& src = other.bands_[other.offset(k)];
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

BandedOperator& BandedOperator::operator-=(const BandedOperator& other) {
  require_same_space(*this, other);
  if (other.max_band_ > max_band_) *this = with_max_band(other.max_band_);
  for (int k = -other.max_band_; k <= other.max_band_; ++k) {
    auto& dst = bands_[offset(k)];
    const auto& src = other.bands_[other.offset(k)];
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= src[j];
  }
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

BandedOperator& BandedOperator::operator*=(cplx factor) {
  for (auto& b : bands_)
    for (auto& e : b) e *= factor;
  if (factor.imag() != 0.0) hermitian_ = false;
  return *this;
}

BandedOperator& BandedOperator::operator*=(double factor) {
  for (auto& b : bands_)
    for (auto& e : b) e *= factor;
  return *this;
}

BandedOperator operator+(BandedOperator a, const BandedOperator& b) { return a += b; }
BandedOperator operator-(BandedOperator a, const BandedOperator& b) { return a -= b; }
BandedOperator operator*(double s, BandedOperator a) { return a *= s; }
BandedOperator operator*(cplx s, BandedOperator a) { return a *= s; }

// ---------------------------------------------------------------------------
// Spin operators and algebra

const BandedOperator& SpinOperators::operator[](int axis) const {
  switch (axis) {
    case 0: return x;
    case 1: return y;
    case 2: return z;
  }
  throw std::out_of_range("spin axis must be 0, 1 or 2");
}

SpinOperators spin_operators(int n_atoms) { return spin_operators(n_atoms, full_window(n_atoms)); }

SpinOperators spin_operators(int n_atoms, Window window) {
  BandedOperator sx(n_atoms, window, 1, true), sy(n_atoms, window, 1, true),
      sz(n_atoms, window, 0, true);
  const double n = static_cast<double>(n_atoms);
  auto z = sz.band(0);
  for (std::size_t j = 0; j < window.size; ++j) z[j] = magnetization(n_atoms, window.first + j);
  if (window.size > 1) {
    auto xp = sx.band(1), xm = sx.band(-1), yp = sy.band(1), ym = sy.band(-1);
    for (std::size_t j = 0; j + 1 < window.size; ++j) {
      // <m+1|S+|m> = sqrt((J - m)(J + m + 1)) = sqrt((N - i)(i + 1)), i the level.
      const double i = static_cast<double>(window.first + j);
      const double ladder = std::sqrt((n - i) * (i + 1.0));
      xp[j] = xm[j] = 0.5 * ladder;
      yp[j] = cplx(0.0, -0.5 * ladder);
      ym[j] = cplx(0.0, 0.5 * ladder);
    }
  }
  return {std::move(sx), std::move(sy), std::move(sz)};
}

BandedOperator identity_operator(int n_atoms, Window window) {
  BandedOperator id(n_atoms, window, 0, true);
  for (auto& e : id.band(0)) e = 1.0;
  return id;
}

BandedOperator diagonal_operator(int n_atoms, Window window, std::span<const double> diag) {
  if (diag.size() != window.size) throw std::invalid_argument("diagonal length mismatch");
  BandedOperator d(n_atoms, window, 0, true);
  auto b = d.band(0);
  for (std::size_t j = 0; j < diag.size(); ++j) b[j] = diag[j];
  return d;
}

BandedOperator band_product(const BandedOperator& a, const BandedOperator& b) {
  require_same_space(a, b);
  const long dim = static_cast<long>(a.dim());
  BandedOperator out(a.n_atoms(), a.window(), a.max_band() + b.max_band(), false);
  const int kmax = out.max_band();
  for (int ka = -a.max_band(); ka <= a.max_band(); ++ka) {
    const auto ab = a.band(ka);
    for (int kb = -b.max_band(); kb <= b.max_band(); ++kb) {
      const int k = ka + kb;
      if (std::abs(k) > kmax) continue;
      const auto bb = b.band(kb);
      auto ob = out.band(k);
      // column c, middle l = c + kb, row r = l + ka
      const long c_lo = std::max({0L, -static_cast<long>(kb), -static_cast<long>(k)});
      const long c_hi = std::min({dim - 1, dim - 1 - kb, dim - 1 - k});
      for (long c = c_lo; c <= c_hi; ++c) {
        const long l = c + kb, r = l + ka;
        ob[std::min(r, c)] += ab[std::min(r, l)] * bb[std::min(l, c)];
      }
    }
  }
  return out;
}

BandedOperator band_commutator(const BandedOperator& a, const BandedOperator& b) {
  auto out = band_product(a, b) - band_product(b, a);
  out.set_hermitian(false);
  return out;
}

BandedOperator band_i_commutator(const BandedOperator& a, const BandedOperator& b) {
  auto out = band_commutator(a, b);
  out *= cplx(0.0, -1.0);
  out.set_hermitian(a.hermitian() && b.hermitian());
  return out;
}

BandedOperator band_anticommutator(const BandedOperator& a, const BandedOperator& b) {
  auto out = band_product(a, b) + band_product(b, a);
  out.set_hermitian(a.hermitian() && b.hermitian());
  return out;
}

BandedOperator band_linear_combination(std::span<const double> coeffs,
                                       std::span<const BandedOperator> ops) {
  if (coeffs.size() != ops.size() || ops.empty())
    throw std::invalid_argument("band_linear_combination: size mismatch");
  int kmax = 0;
  bool herm = true;
  for (const auto& op : ops) {
    require_same_space(ops[0], op);
    kmax = std::max(kmax, op.max_band());
    herm = herm && op.hermitian();
  }
  BandedOperator out(ops[0].n_atoms(), ops[0].window(), kmax, herm);
  for (std::size_t i = 0; i < ops.size(); ++i) out += coeffs[i] * ops[i];
  out.set_hermitian(herm);
  return out;
}

// ---------------------------------------------------------------------------
// Densities and contractions

BandedDensity::BandedDensity(BandedOperator coherences) : rho_(std::move(coherences)) {}

BandedDensity BandedDensity::from_pure(const DickeVector& state, int max_band) {
  BandedOperator rho(state.n_atoms(), state.window(), max_band, true);
  const auto c = state.amplitudes();
  for (int k = -rho.max_band(); k <= rho.max_band(); ++k) {
    auto b = rho.band(k);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t r = k >= 0 ? j + k : j, col = k >= 0 ? j : j - k;
      b[j] = c[r] * std::conj(c[col]);
    }
  }
  return BandedDensity(std::move(rho));
}

double BandedDensity::trace() const {
  double t = 0.0;
  for (const auto& e : rho_.band(0)) t += e.real();
  return t;
}

cplx expectation(const DickeVector& state, const BandedOperator& a) {
  const auto parts = band_expectations(state, a);
  return std::accumulate(parts.begin(), parts.end(), cplx{});
}

std::vector<cplx> band_expectations(const DickeVector& state, const BandedOperator& a) {
  if (state.n_atoms() != a.n_atoms()) throw std::invalid_argument("state/operator N mismatch");
  const Window sw = state.window();
  require_state_inside(sw, a);
  const auto c = state.amplitudes();
  const long ns = static_cast<long>(sw.size);
  const long shift = static_cast<long>(sw.first - a.window().first);
  std::vector<cplx> out(2 * static_cast<std::size_t>(a.max_band()) + 1);
  for (int k = -a.max_band(); k <= a.max_band(); ++k) {
    const auto b = a.band(k);
    cplx acc{};
    // state-local column s, row s + k
    const long s_lo = std::max(0L, -static_cast<long>(k));
    const long s_hi = std::min(ns - 1, ns - 1 - k);
    for (long s = s_lo; s <= s_hi; ++s) {
      const long r = s + k;
      acc += std::conj(c[r]) * b[std::min(r, s) + shift] * c[s];
    }
    out[static_cast<std::size_t>(k + a.max_band())] = acc;
  }
  return out;
}

std::vector<cplx> band_pair_expectations(const DickeVector& state, const BandedOperator& a,
                                         const BandedOperator& b) {
  require_same_space(a, b);
  if (state.n_atoms() != a.n_atoms()) throw std::invalid_argument("state/operator N mismatch");
  const Window sw = state.window();
  require_state_inside(sw, a);
  const auto c = state.amplitudes();
  const long ns = static_cast<long>(sw.size);
  const long dim = static_cast<long>(a.dim());
  const long shift = static_cast<long>(sw.first - a.window().first);
  const int Ka = a.max_band(), Kb = b.max_band();
  std::vector<cplx> out((2 * Ka + 1) * (2 * Kb + 1));
  for (int ka = -Ka; ka <= Ka; ++ka) {
    const auto ab = a.band(ka);
    for (int kb = -Kb; kb <= Kb; ++kb) {
      const auto bb = b.band(kb);
      cplx acc{};
      const long s_lo = std::max({0L, -static_cast<long>(ka + kb), -shift - kb});
      const long s_hi = std::min({ns - 1, ns - 1 - (ka + kb), dim - 1 - shift - kb});
      for (long s = s_lo; s <= s_hi; ++s) {
        const long col = s + shift, mid = col + kb, row = mid + ka;
        acc += std::conj(c[s + ka + kb]) * ab[std::min(row, mid)] * bb[std::min(mid, col)] * c[s];
      }
      out[static_cast<std::size_t>((ka + Ka) * (2 * Kb + 1) + (kb + Kb))] = acc;
    }
  }
  return out;
}

cplx expectation(const BandedDensity& rho, const BandedOperator& a) {
  if (rho.n_atoms() != a.n_atoms()) throw std::invalid_argument("density/operator N mismatch");
  const auto& r = rho.coherences();
  require_state_inside(r.window(), a);
  // Bands of A beyond the stored coherences only matter if nonzero.
  const auto at = a.max_band() > r.max_band() ? a.trimmed() : a;
  if (at.max_band() > r.max_band())
    throw BandOverflowError("observable band " + std::to_string(at.max_band()) +
                            " exceeds stored coherence band " + std::to_string(r.max_band()));
  const long shift = static_cast<long>(r.window().first - at.window().first);
  cplx acc{};
  for (int k = -at.max_band(); k <= at.max_band(); ++k) {
    // A(row, col) rho(col, row): rho band -k, same smaller index.
    const auto ab = at.band(k);
    const auto rb = r.band(-k);
    for (std::size_t j = 0; j < rb.size(); ++j) acc += ab[j + shift] * rb[j];
  }
  return acc;
}

}  // namespace spingain
