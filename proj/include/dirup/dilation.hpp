#pragma once

#include <Eigen/Core>

#include <vector>

#include "dirup/lattice.hpp"

namespace dirup {

/// Integer dilation matrix A with |det A| = 2 and every eigenvalue of modulus
/// above one, plus the exact and floating-point data derived from B = A^T.
class DilationMatrix {
 public:
  /// Checks the matrix and picks the nontrivial digit k0.
  static DilationMatrix validate(const IntMatrix& A);

  int dim() const { return static_cast<int>(A_.rows()); }
  const IntMatrix& A() const { return A_; }
  const IntMatrix& B() const { return B_; }
  Int det() const { return det_; }

  /// Nontrivial digit: k0 lies outside A Z^d and B Z^d and <k0, B^{-1} k0> = 1/2 mod 1.
  const LatticeIndex& k0() const { return k0_; }

  /// Largest j for which B^j, A^j and adj(B)^j are held exactly.
  int max_exact_power() const { return static_cast<int>(B_pow_.size()) - 1; }
  const IntMatrix& B_power(int j) const;
  const IntMatrix& A_power(int j) const;
  /// adj(B^j) = adj(B)^j, so B^{-j} = adj_B_power(j) / det_power(j).
  const IntMatrix& adj_B_power(int j) const;
  Int det_power(int j) const;

  bool in_B_lattice(const LatticeIndex& p) const;
  bool in_A_lattice(const LatticeIndex& p) const;

  /// k = q + B^m p with B^{-m} q in [-1/2, 1/2)^d; `boundary` lists the axes
  /// where that component equals -1/2 exactly.
  struct Reduction {
    LatticeIndex q;
    LatticeIndex p;
    std::vector<int> boundary;
  };
  Reduction reduce(int m, const LatticeIndex& k) const;

  /// Exact test of B^{-m} k in [-1/2, 1/2)^d.
  bool in_fundamental_domain(int m, const LatticeIndex& k) const;

  /// Smallest m0 such that B^{-m} k lies in (-1/2, 1/2)^d for every m >= m0,
  /// certified from the operator norms of B^{-m}.
  int interior_level(const LatticeIndex& k) const;
  int interior_level_for_norm(double norm) const;

  /// ||B^{-m}||_2.
  double inv_power_norm(int m) const;
  int norm_table_size() const { return static_cast<int>(inv_norms_.size()); }

  /// Spectral radius of B^{-1}.
  double rho() const { return rho_; }
  double theta0() const { return theta0_; }
  /// Smallest j0 with the ball of radius (1 + theta0)^j / 2 inside int(K_{j-1})
  /// for every tabulated j >= j0.
  int j0() const { return j0_; }

  /// A^{-j} k0 in floating point, so that <k0, B^{-j} k> = <A^{-j} k0, k>.
  const Eigen::VectorXd& inv_A_power_k0(int j) const;

 private:
  DilationMatrix() = default;
  void build_exact_powers();
  void build_norm_table();

  IntMatrix A_;
  IntMatrix B_;
  IntMatrix adjB_;
  IntMatrix adjA_;
  Int det_ = 0;
  LatticeIndex k0_;
  std::vector<IntMatrix> B_pow_;
  std::vector<IntMatrix> A_pow_;
  std::vector<IntMatrix> adjB_pow_;
  std::vector<double> inv_norms_;
  std::vector<double> envelope_;
  std::vector<Eigen::VectorXd> w_;
  double rho_ = 0;
  double theta0_ = 0;
  int j0_ = 0;
};

/// Digit expansions sum_{i<j} e_i A^i k0 with e_i in {0, 1}: 2^j pairwise
/// incongruent representatives of Z^d / A^j Z^d.
std::vector<LatticeIndex> coset_reps_level(const DilationMatrix& A, int j);

/// Exact determinant of a small integer matrix.
Int int_determinant(const IntMatrix& M);
/// Exact adjugate of a small integer matrix.
IntMatrix int_adjugate(const IntMatrix& M);

}  // namespace dirup
