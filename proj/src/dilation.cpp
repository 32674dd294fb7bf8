#include "dirup/dilation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "dirup/errors.hpp"

namespace dirup {

namespace {

using i128 = __int128;

constexpr Int kExactEntryLimit = Int{1} << 40;
constexpr int kMaxExactPower = 60;
constexpr int kNormTableSize = 640;

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

IntMatrix checked_product(const IntMatrix& X, const IntMatrix& Y, bool& ok) {
  IntMatrix Z(X.rows(), Y.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      i128 s = 0;
      for (Eigen::Index l = 0; l < X.cols(); ++l) s += static_cast<i128>(X(i, l)) * Y(l, j);
      if (s >= kExactEntryLimit || s <= -kExactEntryLimit) ok = false;
      Z(i, j) = static_cast<Int>(s);
    }
  }
  return Z;
}

Eigen::Matrix<i128, Eigen::Dynamic, 1> wide_product(const IntMatrix& M, const LatticeIndex& k) {
  Eigen::Matrix<i128, Eigen::Dynamic, 1> y(M.rows());
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    i128 s = 0;
    for (Eigen::Index l = 0; l < M.cols(); ++l) s += static_cast<i128>(M(i, l)) * k(l);
    y(i) = s;
  }
  return y;
}

/// Candidate digits ordered by l1 norm, then lexicographically descending.
std::vector<LatticeIndex> digit_candidates(int d, Int radius) {
  std::vector<LatticeIndex> out;
  LatticeIndex v = LatticeIndex::Constant(d, -radius);
  while (true) {
    if (!v.isZero()) out.push_back(v);
    int a = d - 1;
    while (a >= 0 && v(a) == radius) {
      v(a) = -radius;
      --a;
    }
    if (a < 0) break;
    ++v(a);
  }
  std::stable_sort(out.begin(), out.end(), [](const LatticeIndex& x, const LatticeIndex& y) {
    const Int nx = x.cwiseAbs().sum();
    const Int ny = y.cwiseAbs().sum();
    if (nx != ny) return nx < ny;
    return lex_less(y, x);
  });
  return out;
}

}  // namespace

Int int_determinant(const IntMatrix& M) {
  if (M.rows() != M.cols()) throw InvalidArgument("determinant of a non-square matrix");
  const Eigen::Index n = M.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  std::vector<std::vector<i128>> a(n, std::vector<i128>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a[i][j] = M(i, j);
  }
  i128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      Eigen::Index r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    }
    prev = a[k][k];
  }
  return static_cast<Int>(sign * a[n - 1][n - 1]);
}

IntMatrix int_adjugate(const IntMatrix& M) {
  const Eigen::Index n = M.rows();
  IntMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      IntMatrix minor(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = M(r, c);
        }
        ++rr;
      }
      adj(i, j) = (((i + j) % 2) ? -1 : 1) * int_determinant(minor);
    }
  }
  return adj;
}

DilationMatrix DilationMatrix::validate(const IntMatrix& A) {
  if (A.rows() == 0 || A.rows() != A.cols()) throw InvalidArgument("dilation matrix must be square and nonempty");
  DilationMatrix D;
  D.A_ = A;
  D.B_ = A.transpose();
  D.det_ = int_determinant(A);
  if (std::abs(D.det_) != 2) {
    throw InvalidArgument("dilation matrix must have |det| = 2, got " + std::to_string(D.det_));
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(A.cast<double>(), false);
  double min_mod = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) min_mod = std::min(min_mod, std::abs(es.eigenvalues()(i)));
  if (!(min_mod > 1 + 1e-9)) {
    throw InvalidArgument("dilation matrix has an eigenvalue of modulus <= 1 (min modulus " +
                          std::to_string(min_mod) + ")");
  }
  D.rho_ = 1.0 / min_mod;
  D.theta0_ = 0.9 * (1.0 / D.rho_ - 1.0);
  D.adjA_ = int_adjugate(A);
  D.adjB_ = int_adjugate(D.B_);

  const int d = static_cast<int>(A.rows());
  for (Int radius = 1; radius <= 4 && D.k0_.size() == 0; ++radius) {
    for (const auto& v : digit_candidates(d, radius)) {
      if (D.in_A_lattice(v) || D.in_B_lattice(v)) continue;
      // <v, B^{-1} v> = <v, adj(B) v> / det; with |det| = 2 it is 1/2 mod 1 iff the numerator is odd.
      const i128 num = static_cast<i128>(v.dot(D.adjB_ * v));
      if (num % 2 != 0) {
        D.k0_ = v;
        break;
      }
    }
  }
  if (D.k0_.size() == 0) throw InvalidArgument("no admissible digit k0 found for this dilation matrix");

  D.build_exact_powers();
  D.build_norm_table();
  return D;
}

void DilationMatrix::build_exact_powers() {
  const int d = dim();
  B_pow_ = {IntMatrix::Identity(d, d)};
  A_pow_ = {IntMatrix::Identity(d, d)};
  adjB_pow_ = {IntMatrix::Identity(d, d)};
  for (int j = 1; j <= kMaxExactPower; ++j) {
    bool ok = true;
    IntMatrix b = checked_product(B_pow_.back(), B_, ok);
    IntMatrix a = checked_product(A_pow_.back(), A_, ok);
    IntMatrix c = checked_product(adjB_pow_.back(), adjB_, ok);
    if (!ok) break;
    B_pow_.push_back(std::move(b));
    A_pow_.push_back(std::move(a));
    adjB_pow_.push_back(std::move(c));
  }
}

void DilationMatrix::build_norm_table() {
  const int d = dim();
  const Eigen::MatrixXd Binv = adjB_.cast<double>() / static_cast<double>(det_);
  const Eigen::MatrixXd Ainv = adjA_.cast<double>() / static_cast<double>(det_);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
  std::vector<double> row_norm_max;
  inv_norms_.clear();
  for (int m = 0; m < kNormTableSize; ++m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
    inv_norms_.push_back(svd.singularValues()(0));
    row_norm_max.push_back(P.rowwise().norm().maxCoeff());
    P = P * Binv;
  }
  int p = 1;
  while (p < kNormTableSize && !(inv_norms_[p] < 1)) ++p;
  if (p >= kNormTableSize / 2) throw InvalidArgument("powers of B^{-1} do not contract within the table range");
  const int n_env = kNormTableSize - p + 1;
  envelope_.assign(n_env, 0);
  for (int m0 = 0; m0 < n_env; ++m0) {
    double e = 0;
    for (int r = 0; r < p; ++r) e = std::max(e, inv_norms_[m0 + r]);
    envelope_[m0] = m0 > 0 ? std::min(e, envelope_[m0 - 1]) : e;
  }

  w_.clear();
  Eigen::VectorXd w = k0_.cast<double>();
  for (int j = 0; j < kNormTableSize; ++j) {
    w_.push_back(w);
    w = Ainv * w;
  }

  // Ball of radius (1 + theta0)^j / 2 inside int(K_{j-1}) iff that radius times
  // every row norm of B^{-(j-1)} stays below 1/2.
  const double log_growth = std::log1p(theta0_);
  j0_ = -1;
  for (int j = kNormTableSize - 1; j >= 1; --j) {
    const double lhs = j * log_growth + std::log(row_norm_max[j - 1]);
    if (!(lhs < 0)) {
      j0_ = j + 1;
      break;
    }
  }
  if (j0_ < 0) j0_ = 1;
  if (j0_ >= kNormTableSize - 1) throw InvalidArgument("theta0 ball inclusion never holds for this dilation matrix");
}

const IntMatrix& DilationMatrix::B_power(int j) const {
  if (j < 0 || j > max_exact_power()) throw BudgetExceeded("exact power B^" + std::to_string(j) + " out of range");
  return B_pow_[j];
}

const IntMatrix& DilationMatrix::A_power(int j) const {
  if (j < 0 || j > max_exact_power()) throw BudgetExceeded("exact power A^" + std::to_string(j) + " out of range");
  return A_pow_[j];
}

const IntMatrix& DilationMatrix::adj_B_power(int j) const {
  if (j < 0 || j > max_exact_power()) throw BudgetExceeded("exact power adj(B)^" + std::to_string(j) + " out of range");
  return adjB_pow_[j];
}

Int DilationMatrix::det_power(int j) const {
  if (j < 0 || j > max_exact_power()) throw BudgetExceeded("det(B)^" + std::to_string(j) + " out of range");
  Int D = 1;
  for (int i = 0; i < j; ++i) D *= det_;
  return D;
}

namespace {

bool divisible(const IntMatrix& adj, const LatticeIndex& p, Int det) {
  const LatticeIndex y = adj * p;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) % det != 0) return false;
  }
  return true;
}

}  // namespace

bool DilationMatrix::in_B_lattice(const LatticeIndex& p) const { return divisible(adjB_, p, det_); }

bool DilationMatrix::in_A_lattice(const LatticeIndex& p) const { return divisible(adjA_, p, det_); }

DilationMatrix::Reduction DilationMatrix::reduce(int m, const LatticeIndex& k) const {
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  const Int D = det_power(m);
  const i128 Dp = D < 0 ? -static_cast<i128>(D) : static_cast<i128>(D);
  const int sgn = D < 0 ? -1 : 1;
  auto y = wide_product(adj_B_power(m), k);
  Reduction r;
  r.p.resize(dim());
  for (int i = 0; i < dim(); ++i) {
    const i128 yi = sgn * y(i);
    const i128 pi = floor_div(2 * yi + Dp, 2 * Dp);
    r.p(i) = static_cast<Int>(pi);
    if (2 * (yi - Dp * pi) == -Dp) r.boundary.push_back(i);
  }
  r.q = k - B_power(m) * r.p;
  return r;
}

bool DilationMatrix::in_fundamental_domain(int m, const LatticeIndex& k) const {
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  const Int D = det_power(m);
  const i128 Dp = D < 0 ? -static_cast<i128>(D) : static_cast<i128>(D);
  const int sgn = D < 0 ? -1 : 1;
  auto y = wide_product(adj_B_power(m), k);
  for (int i = 0; i < dim(); ++i) {
    const i128 t = 2 * sgn * y(i);
    if (t < -Dp || t >= Dp) return false;
  }
  return true;
}

int DilationMatrix::interior_level_for_norm(double norm) const {
  if (norm == 0) return 0;
  const double target = 0.5 / (norm * (1 + 1e-9));
  auto it = std::partition_point(envelope_.begin(), envelope_.end(), [&](double e) { return !(e < target); });
  if (it == envelope_.end()) throw BudgetExceeded("lattice point too far out for the certified norm table");
  return static_cast<int>(it - envelope_.begin());
}

int DilationMatrix::interior_level(const LatticeIndex& k) const {
  if (k.size() != dim()) throw DimensionMismatch(dim(), static_cast<int>(k.size()));
  return interior_level_for_norm(k.cast<double>().norm());
}

double DilationMatrix::inv_power_norm(int m) const {
  if (m < 0 || m >= norm_table_size()) throw BudgetExceeded("norm table index out of range");
  return inv_norms_[m];
}

const Eigen::VectorXd& DilationMatrix::inv_A_power_k0(int j) const {
  if (j < 0 || j >= static_cast<int>(w_.size())) throw BudgetExceeded("A^{-j} k0 table index out of range");
  return w_[j];
}

std::vector<LatticeIndex> coset_reps_level(const DilationMatrix& A, int j) {
  if (j < 0) throw InvalidArgument("coset level must be >= 0");
  std::vector<LatticeIndex> reps{LatticeIndex::Zero(A.dim())};
  reps.reserve(std::size_t{1} << j);
  for (int i = 0; i < j; ++i) {
    const LatticeIndex digit = A.A_power(i) * A.k0();
    const std::size_t n = reps.size();
    for (std::size_t r = 0; r < n; ++r) reps.push_back(reps[r] + digit);
  }
  return reps;
}

}  // namespace dirup
