#include "dirup/periodic_frames.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dirup/compensated_sum.hpp"
#include "dirup/errors.hpp"
#include "dirup/uncertainty.hpp"

namespace dirup {

namespace {

using i128 = __int128;

constexpr double kTwoPi = 2 * std::numbers::pi;

void require_level(int j, int min_j) {
  if (j < min_j) throw InvalidArgument("frame level must be >= " + std::to_string(min_j));
}

double sq_norm(const LatticeIndex& k) { return static_cast<double>(k.squaredNorm()); }

/// Nonnegative residue of num / D modulo 1, as an integer in [0, |D|).
Int phase_residue(i128 num, Int D) {
  const i128 Dp = D < 0 ? -static_cast<i128>(D) : static_cast<i128>(D);
  if (D < 0) num = -num;
  i128 r = num % Dp;
  if (r < 0) r += Dp;
  return static_cast<Int>(r);
}

std::complex<double> unit_phase(Int r, Int Dp) {
  // Center the residue before scaling to keep the angle small.
  Int c = r;
  if (2 * c > Dp) c -= Dp;
  return std::polar(1.0, kTwoPi * static_cast<double>(c) / static_cast<double>(Dp));
}

}  // namespace

double FrameLevel::nu(const LatticeIndex& k) const { return frame->nu(j, k); }
double FrameLevel::mu(const LatticeIndex& k) const { return frame->mu(j, k); }
std::complex<double> FrameLevel::lambda(const LatticeIndex& k) const { return frame->lambda(j, k); }

PeriodicFrame::PeriodicFrame(DilationMatrix A, Direction L)
    : A_(std::move(A)), L_(std::move(L)), norm_L2_(static_cast<double>(L_.norm2())) {
  if (A_.dim() != L_.dim()) throw DimensionMismatch(A_.dim(), L_.dim());
}

FrameLevel PeriodicFrame::level(int j) const {
  require_level(j, 1);
  return FrameLevel{this, j, A_.theta0()};
}

double PeriodicFrame::gauss_arg(int j, const LatticeIndex& q) const {
  return norm_L2_ * sq_norm(q) / (static_cast<double>(j) * static_cast<double>(j - 1));
}

double PeriodicFrame::f(int j, const LatticeIndex& k) const {
  require_level(j, 1);
  if (k.isZero()) return 1.0;
  if (j == 1) return 0.0;
  return std::exp(-gauss_arg(j, k));
}

/// sqrt(1 - f_j(q)^2), evaluated without cancellation for small q.
double PeriodicFrame::complement(int j, const LatticeIndex& q) const {
  if (q.isZero()) return 0.0;
  if (j == 1) return 1.0;
  return std::sqrt(-std::expm1(-2 * gauss_arg(j, q)));
}

double PeriodicFrame::nu_reduced(int j, const LatticeIndex& k, bool shifted) const {
  const int m = j - 1;
  auto red = A_.reduce(m, k);
  if (shifted) red.p += A_.k0();
  if (red.boundary.empty()) {
    return A_.in_B_lattice(red.p) ? f(j, red.q) : complement(j, red.q);
  }
  // k sits on a cell face; it belongs to the closed cell around the origin
  // (mod B^j) iff moving across some subset of those faces lands in B Z^d.
  const std::size_t nb = red.boundary.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << nb); ++mask) {
    LatticeIndex p = red.p;
    for (std::size_t b = 0; b < nb; ++b) {
      if (mask & (std::size_t{1} << b)) p(red.boundary[b]) -= 1;
    }
    if (A_.in_B_lattice(p)) return std::numbers::sqrt2 / 2;
  }
  throw CoverageViolation("lattice point " + to_string(k) + " matches no mask case at level " + std::to_string(j));
}

double PeriodicFrame::nu(int j, const LatticeIndex& k) const {
  require_level(j, 1);
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  if (A_.interior_level(k) <= j - 1) return f(j, k);
  return nu_reduced(j, k, false);
}

double PeriodicFrame::nu_shifted(int j, const LatticeIndex& k) const {
  require_level(j, 1);
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  if (A_.interior_level(k) <= j - 1) return complement(j, k);
  return nu_reduced(j, k, true);
}

double PeriodicFrame::mu(int j, const LatticeIndex& k) const { return std::numbers::sqrt2 * nu(j, k); }

std::complex<double> PeriodicFrame::character(int j, const LatticeIndex& k) const {
  require_level(j, 0);
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  if (j <= A_.max_exact_power()) {
    const IntMatrix& adj = A_.adj_B_power(j);
    i128 num = 0;
    for (int a = 0; a < dim(); ++a) {
      i128 row = 0;
      for (int b = 0; b < dim(); ++b) row += static_cast<i128>(adj(a, b)) * k(b);
      num += static_cast<i128>(A_.k0()(a)) * row;
    }
    const Int D = A_.det_power(j);
    return unit_phase(phase_residue(num, D), D < 0 ? -D : D);
  }
  double t = A_.inv_A_power_k0(j).dot(k.cast<double>());
  t -= std::round(t);
  return std::polar(1.0, kTwoPi * t);
}

std::complex<double> PeriodicFrame::lambda(int j, const LatticeIndex& k) const {
  return character(j, k) * (std::numbers::sqrt2 * nu_shifted(j, k));
}

int PeriodicFrame::product_cutoff(const LatticeIndex& k) const { return A_.interior_level(k) + 1; }

int PeriodicFrame::ball_cutoff(const LatticeIndex& k) const {
  const double r = k.cast<double>().norm();
  if (r == 0) return A_.j0();
  const int j1 = static_cast<int>(std::floor(std::log(2 * r) / std::log1p(A_.theta0()))) + 1;
  return std::max(A_.j0(), j1);
}

double PeriodicFrame::xi_hat_from(int j, const LatticeIndex& k, int R) const {
  require_level(j, 0);
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  if (k.isZero()) return 1.0;
  if (R < product_cutoff(k)) throw InvalidArgument("xi_hat cutoff below the certified interior level");
  double prod = 1.0;
  for (int r = j + 1; r < R; ++r) {
    prod *= nu(r, k);
    if (prod == 0) return 0.0;
  }
  // sum_{r >= R'} 1 / (r (r-1)) = 1 / (R' - 1).
  const int tail_from = std::max(j + 1, R);
  return prod * std::exp(-norm_L2_ * sq_norm(k) / static_cast<double>(tail_from - 1));
}

double PeriodicFrame::xi_hat(int j, const LatticeIndex& k, int extra) const {
  if (extra < 0) throw InvalidArgument("xi_hat extra cutoff must be >= 0");
  if (k.isZero()) return 1.0;
  return xi_hat_from(j, k, product_cutoff(k) + extra);
}

double PeriodicFrame::phi_hat(int j, const LatticeIndex& k) const {
  return std::pow(2.0, -0.5 * j) * xi_hat(j, k);
}

std::complex<double> PeriodicFrame::psi_hat(int j, const LatticeIndex& k) const {
  return lambda(j + 1, k) * phi_hat(j + 1, k);
}

std::vector<LatticeIndex> lattice_ball(int d, double r) {
  if (d < 1) throw InvalidArgument("lattice ball dimension must be >= 1");
  const Int R = static_cast<Int>(std::floor(r));
  const double r2 = r * r;
  std::vector<LatticeIndex> out;
  if (R < 0) return out;
  LatticeIndex k = LatticeIndex::Constant(d, -R);
  while (true) {
    if (sq_norm(k) <= r2) out.push_back(k);
    int a = d - 1;
    while (a >= 0 && k(a) == R) {
      k(a) = -R;
      --a;
    }
    if (a < 0) break;
    ++k(a);
  }
  return out;
}

namespace {

/// Bound on sum over ||k|| > r of xi_hat(j, k)^2, using xi_hat <= exp(-||L||^2 ||k||^2 / (max(j+1, R(k)) - 1))
/// with R monotone in ||k||, and at most (2s+1)^d points of norm in (s-1, s].
double xi_tail_bound(const PeriodicFrame& frame, int j, double r) {
  const int d = frame.dim();
  const double l2 = static_cast<double>(frame.direction().norm2());
  CompensatedSum<double> acc;
  for (Int s = static_cast<Int>(std::floor(r)) + 1;; ++s) {
    const double inner = std::max(r, static_cast<double>(s - 1));
    const int R = frame.dilation().interior_level_for_norm(static_cast<double>(s)) + 1;
    const double denom = static_cast<double>(std::max(j + 1, R) - 1);
    const double term = std::pow(2.0 * static_cast<double>(s) + 1, d) * std::exp(-2 * l2 * inner * inner / denom);
    acc += term;
    if (term == 0 || (term < 1e-40 * acc.value() && inner > 2 * std::sqrt(denom / l2))) break;
  }
  return acc.value();
}

}  // namespace

FrameElementCoeffs frame_element_coeffs(const PeriodicFrame& frame, int j, double eps) {
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("truncation eps must lie in (0, 1)");
  require_level(j, 0);
  const int d = frame.dim();
  const double l2 = static_cast<double>(frame.direction().norm2());
  double r = std::sqrt((j + 1) * std::log(1 / eps) / l2) + 1;
  for (int attempt = 0; attempt < 64; ++attempt, r += 1) {
    CoeffMapBuilder<double> phi(d);
    CoeffMapBuilder<double> psi(d);
    CompensatedSum<double> phi_mass;
    CompensatedSum<double> psi_mass;
    for (const auto& k : lattice_ball(d, r)) {
      const double a = frame.phi_hat(j, k);
      const std::complex<double> b = frame.psi_hat(j, k);
      phi.add(k, a);
      psi.add(k, b);
      phi_mass += a * a;
      psi_mass += std::norm(b);
    }
    FrameElementCoeffs out;
    out.j = j;
    out.truncation_radius = r;
    out.phi_mass = phi_mass.value();
    out.psi_mass = psi_mass.value();
    out.phi_tail_bound = std::pow(2.0, -j) * xi_tail_bound(frame, j, r);
    out.psi_tail_bound = 2 * std::pow(2.0, -(j + 1)) * xi_tail_bound(frame, j + 1, r);
    const double e2 = eps * eps;
    if (out.phi_tail_bound < e2 * out.phi_mass && out.psi_tail_bound < e2 * out.psi_mass) {
      out.phi_hat = std::move(phi).build();
      out.psi_hat = std::move(psi).build();
      return out;
    }
  }
  throw BudgetExceeded("frame element window did not reach the requested tail bound");
}

std::vector<LatticeIndex> fundamental_domain_points(const DilationMatrix& A, int j) {
  require_level(j, 0);
  const int d = A.dim();
  const IntMatrix& Bj = A.B_power(j);
  LatticeIndex h(d);
  for (int i = 0; i < d; ++i) h(i) = (Bj.row(i).cwiseAbs().sum() + 1) / 2 + 1;
  std::vector<LatticeIndex> out;
  LatticeIndex k = -h;
  while (true) {
    if (A.in_fundamental_domain(j, k)) out.push_back(k);
    int a = d - 1;
    while (a >= 0 && k(a) == h(a)) {
      k(a) = -h(a);
      --a;
    }
    if (a < 0) break;
    ++k(a);
  }
  if (out.size() != (std::size_t{1} << j)) {
    throw Error("fundamental domain K_" + std::to_string(j) + " has " + std::to_string(out.size()) + " points");
  }
  return out;
}

UepReport uep_identity_check(const PeriodicFrame& frame, int j) {
  return uep_identity_check(frame, j, fundamental_domain_points(frame.dilation(), j));
}

UepReport uep_identity_check(const PeriodicFrame& frame, int j, const std::vector<LatticeIndex>& window) {
  require_level(j, 1);
  const LatticeIndex s = frame.dilation().B_power(j - 1) * frame.dilation().k0();
  UepReport rep;
  rep.j = j;
  rep.points = window.size();
  for (const auto& k : window) {
    const LatticeIndex ks = k + s;
    const double mu_k = frame.mu(j, k);
    const double mu_ks = frame.mu(j, ks);
    const std::complex<double> la_k = frame.lambda(j, k);
    const std::complex<double> la_ks = frame.lambda(j, ks);
    rep.residual_norm = std::max(rep.residual_norm, std::abs(mu_k * mu_k + std::norm(la_k) - 2.0));
    rep.residual_cross = std::max(rep.residual_cross, std::abs(mu_k * mu_ks + la_k * std::conj(la_ks)));
  }
  return rep;
}

namespace {

/// sum_{k in reps} |sum_m a_m exp(2 pi i <m, A^{-j} k>)|^2 with exact phases.
double translate_energy(const DilationMatrix& A, int j, const CoeffMap& f, const std::vector<std::complex<double>>& a,
                        const std::vector<LatticeIndex>& reps) {
  const int d = A.dim();
  const Int D = A.det_power(j);
  const Int Dp = D < 0 ? -D : D;
  const IntMatrix& adj = A.adj_B_power(j);
  std::vector<std::complex<double>> table(static_cast<std::size_t>(Dp));
  for (Int r = 0; r < Dp; ++r) table[static_cast<std::size_t>(r)] = unit_phase(r, Dp);
  // u_m = adj(B^j) m reduced mod |D|; the phase of (m, k) is <u_m, k> / D.
  std::vector<Int> u(f.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LatticeIndex m = f.index(i);
    for (int row = 0; row < d; ++row) {
      i128 s = 0;
      for (int c = 0; c < d; ++c) s += static_cast<i128>(adj(row, c)) * m(c);
      u[i * d + row] = phase_residue(s, Dp);
    }
  }
  CompensatedSum<double> total;
  std::vector<Int> kr(d);
  for (const auto& k : reps) {
    for (int c = 0; c < d; ++c) kr[c] = static_cast<Int>(phase_residue(k(c), Dp));
    CompensatedSum<std::complex<double>> inner;
    for (std::size_t i = 0; i < f.size(); ++i) {
      i128 s = 0;
      for (int c = 0; c < d; ++c) s += static_cast<i128>(u[i * d + c]) * kr[c];
      Int r = static_cast<Int>(s % Dp);
      if (D < 0) r = (Dp - r) % Dp;
      inner += a[i] * table[static_cast<std::size_t>(r)];
    }
    total += std::norm(inner.value());
  }
  return total.value();
}

}  // namespace

CascadeReport parseval_cascade_check(const PeriodicFrame& frame, const CoeffMap& f, int J, double budget) {
  require_level(J, 0);
  if (f.dim() != frame.dim()) throw DimensionMismatch(frame.dim(), f.dim());
  if (J > frame.dilation().max_exact_power()) throw BudgetExceeded("cascade depth beyond exact arithmetic range");
  const double work = std::ldexp(1.0, J + 2) * static_cast<double>(std::max<std::size_t>(f.size(), 1));
  if (work > budget) throw BudgetExceeded("cascade to depth " + std::to_string(J) + " exceeds the work budget");

  const DilationMatrix& A = frame.dilation();
  CascadeReport rep;
  rep.J = J;
  rep.norm2 = squared_norm(f);
  std::vector<std::complex<double>> a(f.size());
  CompensatedSum<double> untranslated;
  CompensatedSum<double> wavelet;
  for (int j = 0; j <= J; ++j) {
    const auto reps = coset_reps_level(A, j);
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = f.value(i) * frame.phi_hat(j, f.index(i));
    rep.E.push_back(translate_energy(A, j, f, a, reps));
    if (j == J) break;
    CompensatedSum<std::complex<double>> at_origin;
    for (const auto& v : a) at_origin += v;
    untranslated += std::norm(at_origin.value());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = f.value(i) * std::conj(frame.psi_hat(j, f.index(i)));
    rep.W.push_back(translate_energy(A, j, f, a, reps));
    wavelet += rep.W.back();
  }
  for (int j = 0; j < J; ++j) {
    rep.residual.push_back(rep.E[j + 1] - rep.E[j] - rep.W[j]);
    rep.max_residual = std::max(rep.max_residual, std::abs(rep.residual.back()));
  }
  rep.energy_gap = rep.norm2 - rep.E[J];
  rep.untranslated_reading = untranslated.value() + wavelet.value();
  return rep;
}

double psi_limit(int d) {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  const double x = d;
  return 0.25 * (x + 2) * (x * x - 2 * x + 4) / (x * x * x);
}

LimitRow up_limit_row(const PeriodicFrame& frame, int j, double eps) {
  const auto coeffs = frame_element_coeffs(frame, j, eps);
  LimitRow row;
  row.j = j;
  const auto phi = up_directional(coeffs.phi_hat, frame.direction());
  const auto psi = up_directional(coeffs.psi_hat, frame.direction());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.up_phi = phi.up.value_or(nan);
  row.up_psi = psi.up.value_or(nan);
  row.target_phi = 0.25;
  row.target_psi = psi_limit(frame.dim());
  row.norm_phi = coeffs.phi_mass;
  row.norm_psi = coeffs.psi_mass;
  return row;
}

std::vector<LimitRow> up_limit_sweep(const PeriodicFrame& frame, const std::vector<int>& js, double eps) {
  for (std::size_t i = 1; i < js.size(); ++i) {
    if (js[i] <= js[i - 1]) throw InvalidArgument("level list must be strictly ascending");
  }
  std::vector<LimitRow> rows;
  for (int j : js) rows.push_back(up_limit_row(frame, j, eps));
  return rows;
}

CoeffMap xi0_coeffs(const Direction& L, int j, double eps) {
  require_level(j, 1);
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("truncation eps must lie in (0, 1)");
  const double l2 = static_cast<double>(L.norm2());
  const double r = std::sqrt(j * std::log(1 / eps) / l2) + 1;
  CoeffMapBuilder<double> b(L.dim());
  for (const auto& k : lattice_ball(L.dim(), r)) b.add(k, std::exp(-l2 * sq_norm(k) / j));
  return std::move(b).build();
}

CoeffMap eta_coeffs(const PeriodicFrame& frame, int j, double eps) {
  require_level(j, 1);
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("truncation eps must lie in (0, 1)");
  const double l2 = static_cast<double>(frame.direction().norm2());
  const double r = std::sqrt((j + 1) * std::log(1 / eps) / l2) + 1;
  CoeffMapBuilder<double> b(frame.dim());
  for (const auto& k : lattice_ball(frame.dim(), r)) {
    const double c = l2 * sq_norm(k);
    const double amp = std::sqrt(-std::expm1(-2 * c / (static_cast<double>(j) * (j + 1)))) * std::exp(-c / (j + 1));
    b.add(k, frame.character(j, k) * amp);
  }
  return std::move(b).build();
}

std::pair<double, double> reference_limits_check(const PeriodicFrame& frame, int j, double eps) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto xi = up_directional(xi0_coeffs(frame.direction(), j, eps), frame.direction());
  const auto eta = up_directional(eta_coeffs(frame, j, eps), frame.direction());
  return {xi.up.value_or(nan), eta.up.value_or(nan)};
}

}  // namespace dirup
