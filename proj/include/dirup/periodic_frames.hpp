#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "dirup/coeff_map.hpp"
#include "dirup/dilation.hpp"
#include "dirup/lattice.hpp"

namespace dirup {

class PeriodicFrame;

/// Level-j view of a frame: the masks nu_j, mu_j and lambda_j.
struct FrameLevel {
  const PeriodicFrame* frame = nullptr;
  int j = 0;
  double theta0 = 0;

  double nu(const LatticeIndex& k) const;
  double mu(const LatticeIndex& k) const;
  std::complex<double> lambda(const LatticeIndex& k) const;
};

/// Parseval wavelet frame on the torus built from a dilation matrix and a
/// localization direction L.
///
/// Level masks follow f_j(k) = exp(-||L||^2 ||k||^2 / (j (j-1))). Level 1 uses
/// the limit f_1(0) = 1; only the origin is ever evaluated there because
/// int(K_0) = {0}.
class PeriodicFrame {
 public:
  PeriodicFrame(DilationMatrix A, Direction L);

  const DilationMatrix& dilation() const { return A_; }
  const Direction& direction() const { return L_; }
  int dim() const { return A_.dim(); }

  /// f_j(k), j >= 1.
  double f(int j, const LatticeIndex& k) const;
  /// B^j-periodic mask nu_j(k), j >= 1.
  double nu(int j, const LatticeIndex& k) const;
  /// nu_j(k + B^{j-1} k0).
  double nu_shifted(int j, const LatticeIndex& k) const;
  /// mu_j(k) = sqrt(2) nu_j(k).
  double mu(int j, const LatticeIndex& k) const;
  /// exp(2 pi i <k0, B^{-j} k>).
  std::complex<double> character(int j, const LatticeIndex& k) const;
  /// lambda_j(k) = character(j, k) mu_j(k + B^{j-1} k0).
  std::complex<double> lambda(int j, const LatticeIndex& k) const;

  /// Smallest R such that nu_r(k) = f_r(k) for every r >= R.
  int product_cutoff(const LatticeIndex& k) const;
  /// max(j0, floor(log_{1 + theta0}(2 ||k||)) + 1).
  int ball_cutoff(const LatticeIndex& k) const;

  /// Infinite product of nu_r(k) over r > j. Factors below the cutoff are
  /// multiplied out; the rest telescope to one Gaussian. `extra` moves the
  /// cutoff further out.
  double xi_hat(int j, const LatticeIndex& k, int extra = 0) const;
  /// Same product with an explicit cutoff R >= product_cutoff(k).
  double xi_hat_from(int j, const LatticeIndex& k, int R) const;

  /// 2^{-j/2} xi_hat(j, k).
  double phi_hat(int j, const LatticeIndex& k) const;
  /// lambda_{j+1}(k) phi_hat(j+1, k).
  std::complex<double> psi_hat(int j, const LatticeIndex& k) const;

  FrameLevel level(int j) const;

 private:
  double gauss_arg(int j, const LatticeIndex& q) const;
  double complement(int j, const LatticeIndex& q) const;
  double nu_reduced(int j, const LatticeIndex& k, bool shifted) const;

  DilationMatrix A_;
  Direction L_;
  double norm_L2_;
};

struct FrameElementCoeffs {
  CoeffMap phi_hat;
  CoeffMap psi_hat;
  int j = 0;
  double truncation_radius = 0;
  /// Upper bounds on the squared mass outside the window.
  double phi_tail_bound = 0;
  double psi_tail_bound = 0;
  double phi_mass = 0;
  double psi_mass = 0;
};

/// Coefficients of phi_j and psi_j on a Euclidean lattice ball. The radius
/// starts where exp(-||L||^2 r^2 / (j+1)) = eps, plus one shell, and grows
/// until each tail bound is below eps^2 times the retained mass.
FrameElementCoeffs frame_element_coeffs(const PeriodicFrame& frame, int j, double eps = 1e-8);

/// Lattice points of K_j = Z^d cap B^j [-1/2, 1/2)^d; exactly 2^j of them.
std::vector<LatticeIndex> fundamental_domain_points(const DilationMatrix& A, int j);

struct UepReport {
  int j = 0;
  std::size_t points = 0;
  /// max |mu_j(k)^2 + |lambda_j(k)|^2 - 2|.
  double residual_norm = 0;
  /// max |mu_j(k) mu_j(k+s) + lambda_j(k) conj(lambda_j(k+s))|, s = B^{j-1} k0.
  double residual_cross = 0;
};

UepReport uep_identity_check(const PeriodicFrame& frame, int j);
UepReport uep_identity_check(const PeriodicFrame& frame, int j, const std::vector<LatticeIndex>& window);

struct CascadeReport {
  int J = 0;
  /// E_j for j = 0..J.
  std::vector<double> E;
  /// W_j for j = 0..J-1.
  std::vector<double> W;
  /// E_{j+1} - E_j - W_j for j = 0..J-1.
  std::vector<double> residual;
  double max_residual = 0;
  double norm2 = 0;
  /// ||f||^2 - E_J.
  double energy_gap = 0;
  /// sum_{j<J} |<f, phi_j>|^2 + sum_{j<J} W_j.
  double untranslated_reading = 0;
};

/// Energies of f against translates phi_j(. - A^{-j} k) and psi_j(. - A^{-j} k),
/// k over coset_reps_level(A, j). Throws BudgetExceeded when the number of
/// coefficient-translate pairs would exceed `budget`.
CascadeReport parseval_cascade_check(const PeriodicFrame& frame, const CoeffMap& f, int J, double budget = 5e7);

struct LimitRow {
  int j = 0;
  double up_phi = 0;
  double up_psi = 0;
  double target_phi = 0;
  double target_psi = 0;
  double norm_phi = 0;
  double norm_psi = 0;
};

/// (d+2)(d^2-2d+4) / (4 d^3).
double psi_limit(int d);

LimitRow up_limit_row(const PeriodicFrame& frame, int j, double eps);
std::vector<LimitRow> up_limit_sweep(const PeriodicFrame& frame, const std::vector<int>& js, double eps);

/// exp(-||L||^2 ||k||^2 / j) on the ball where it is at least eps.
CoeffMap xi0_coeffs(const Direction& L, int j, double eps);
/// character(j, k) (1 - exp(-2||L||^2||k||^2/(j(j+1))))^{1/2} exp(-||L||^2||k||^2/(j+1)).
CoeffMap eta_coeffs(const PeriodicFrame& frame, int j, double eps);

/// UP_L of xi0_j and eta_j.
std::pair<double, double> reference_limits_check(const PeriodicFrame& frame, int j, double eps = 1e-10);

/// Points of Z^d with Euclidean norm at most r, in lexicographic order.
std::vector<LatticeIndex> lattice_ball(int d, double r);

}  // namespace dirup
