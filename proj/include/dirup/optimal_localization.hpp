#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include <json.hpp>

#include "dirup/coeff_map.hpp"
#include "dirup/lattice.hpp"

namespace dirup {

/// Finite nonempty set of distinct lattice points, kept in lexicographic order.
class SupportSet {
 public:
  explicit SupportSet(std::vector<LatticeIndex> points);

  static SupportSet box(const LatticeIndex& N);
  /// Union of the coordinate axes segments {t e_j : |t| <= n}.
  static SupportSet cross(Int n, int d);
  /// {k0 + iL : 0 <= i <= m}.
  static SupportSet line(const LatticeIndex& k0, const Direction& L, Int m);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<LatticeIndex>& points() const { return points_; }

 private:
  int dim_;
  std::vector<LatticeIndex> points_;
};

nlohmann::json to_json(const SupportSet& S);
SupportSet support_from_json(const nlohmann::json& j);

/// Maximal run start, start + L, ..., start + (length-1) L inside a support set.
struct Thread {
  LatticeIndex start;
  Int length = 0;

  LatticeIndex point(Int i, const Direction& L) const { return start + i * L.coords(); }
};

/// Partition of S into maximal L-progressions, longest first; equal lengths
/// ordered by lexicographically smallest start.
std::vector<Thread> thread_decompose(const SupportSet& S, const Direction& L);

/// Tridiagonal Toeplitz matrix of size m+1 with 1/2 on both off-diagonals.
Eigen::MatrixXd halves_toeplitz(int m);

/// Eigenpairs of halves_toeplitz(m): cos(pi n/(m+2)) with unnormalized
/// eigenvector sin(pi n j/(m+2)), j = 1..m+1, for n = 1..m+1 (descending).
std::vector<std::pair<double, Eigen::VectorXd>> toeplitz_eigenpairs(int m);

struct MinVarSolution {
  CoeffMap polynomial;
  double var_angular = 0;
  Int m0 = 0;
  double up = 0;
};

/// Polynomial with least angular variance among those supported in S: the
/// sine profile along the longest thread. Throws InfiniteVariance when no
/// thread has two points.
MinVarSolution min_var_directional(const SupportSet& S, const Direction& L, bool normalize = false);

/// Unit-norm tensor sine profile on the box [-N, N] minimizing the
/// coordinate-wise angular variance, together with that variance.
std::pair<CoeffMap, double> min_var_gg_rect(const LatticeIndex& N);

}  // namespace dirup
