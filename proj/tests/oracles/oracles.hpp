#pragma once

// Independent reference computations used only by the tests. Each one takes a
// different route from the library: dense pair loops instead of hash lookups,
// bisection instead of closed forms, class grouping instead of phase sums.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "dirup/coeff_map.hpp"
#include "dirup/dilation.hpp"
#include "dirup/lattice.hpp"

namespace oracle {

using dirup::Int;
using dirup::LatticeIndex;
using ld = long double;
using cld = std::complex<ld>;

struct DenseEntry {
  std::vector<Int> k;
  cld c;
};

inline std::vector<DenseEntry> dense(const dirup::CoeffMap& f) {
  std::vector<DenseEntry> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = f.index(i);
    out.push_back({std::vector<Int>(idx.data(), idx.data() + idx.size()),
                   cld(f.value(i).real(), f.value(i).imag())});
  }
  return out;
}

struct Up {
  ld var_a;
  ld var_f;
  ld up;
};

/// All-pairs evaluation of the directional product in long double.
inline Up up_directional(const dirup::CoeffMap& f, const std::vector<Int>& L) {
  const auto e = dense(f);
  ld N = 0, m1 = 0, m2 = 0;
  cld S = 0;
  for (const auto& a : e) {
    ld t = 0;
    for (std::size_t i = 0; i < L.size(); ++i) t += static_cast<ld>(L[i]) * a.k[i];
    const ld w = std::norm(a.c);
    N += w;
    m1 += t * w;
    m2 += t * t * w;
    for (const auto& b : e) {
      bool step = true;
      for (std::size_t i = 0; i < L.size(); ++i) step = step && (b.k[i] - a.k[i] == L[i]);
      if (step) S += a.c * std::conj(b.c);
    }
  }
  ld l2 = 0;
  for (Int x : L) l2 += static_cast<ld>(x) * x;
  const ld var_a = N * N / std::norm(S) - 1;
  const ld var_f = m2 / N - (m1 / N) * (m1 / N);
  return {var_a, var_f, var_a * var_f / (l2 * l2)};
}

/// All-pairs coordinate-wise product in long double.
inline Up up_gg(const dirup::CoeffMap& f) {
  const auto e = dense(f);
  const int d = f.dim();
  ld N = 0;
  for (const auto& a : e) N += std::norm(a.c);
  ld numer = 0, denom = 0, var_f = 0;
  for (int j = 0; j < d; ++j) {
    cld S = 0;
    ld m1 = 0, m2 = 0;
    for (const auto& a : e) {
      m1 += a.k[j] * std::norm(a.c);
      m2 += static_cast<ld>(a.k[j]) * a.k[j] * std::norm(a.c);
      for (const auto& b : e) {
        bool step = true;
        for (int i = 0; i < d; ++i) step = step && (b.k[i] - a.k[i] == (i == j ? 1 : 0));
        if (step) S += a.c * std::conj(b.c);
      }
    }
    numer += N * N - std::norm(S);
    denom += std::abs(S);
    var_f += m2 / N - (m1 / N) * (m1 / N);
  }
  const ld var_a = numer / (denom * denom);
  return {var_a, var_f, var_a * var_f};
}

/// Lengths of maximal L-runs found by linear scans over the point list.
inline std::vector<Int> thread_lengths(const std::vector<LatticeIndex>& pts, const LatticeIndex& L) {
  auto member = [&](const LatticeIndex& q) {
    return std::any_of(pts.begin(), pts.end(), [&](const LatticeIndex& p) { return p == q; });
  };
  std::vector<Int> out;
  for (const auto& p : pts) {
    if (member(p - L)) continue;
    Int len = 0;
    LatticeIndex q = p;
    while (member(q)) {
      ++len;
      q += L;
    }
    out.push_back(len);
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

/// Eigenvalues of the (m+1)x(m+1) tridiagonal matrix with 1/2 off the
/// diagonal, by Sturm-sequence bisection; descending.
inline std::vector<double> sturm_eigenvalues(int m) {
  const int n = m + 1;
  auto count_below = [&](ld x) {
    int cnt = 0;
    ld q = -x;
    if (q < 0) ++cnt;
    for (int i = 1; i < n; ++i) {
      if (q == 0) q = 1e-300L;
      q = -x - 0.25L / q;
      if (q < 0) ++cnt;
    }
    return cnt;
  };
  std::vector<double> out;
  for (int idx = n - 1; idx >= 0; --idx) {
    ld lo = -1.0L, hi = 1.0L;
    for (int it = 0; it < 200; ++it) {
      const ld mid = (lo + hi) / 2;
      if (count_below(mid) > idx) hi = mid;
      else lo = mid;
    }
    out.push_back(static_cast<double>((lo + hi) / 2));
  }
  return out;
}

/// Largest |c^T M c| / c^T c found by projected gradient ascent from random
/// starts, where M holds 1/2 at every pair (a, a+L) of the support.
inline double rayleigh_search(const std::vector<LatticeIndex>& pts, const LatticeIndex& L, int restarts, int iters,
                              std::uint64_t seed) {
  const std::size_t n = pts.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (pts[b] - pts[a] == L) edges.emplace_back(a, b);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd c(n), Mc(n);
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.setZero();
    for (auto [a, b] : edges) {
      y(a) += 0.5 * x(b);
      y(b) += 0.5 * x(a);
    }
  };
  double best = 0;
  for (int r = 0; r < restarts; ++r) {
    for (std::size_t i = 0; i < n; ++i) c(i) = g(rng);
    c.normalize();
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    for (int it = 0; it < iters; ++it) {
      apply(c, Mc);
      const double q = c.dot(Mc);
      best = std::max(best, std::abs(q));
      c += sign * (Mc - q * c);
      const double nc = c.norm();
      if (nc == 0) break;
      c /= nc;
    }
    apply(c, Mc);
    best = std::max(best, std::abs(c.dot(Mc)));
  }
  return best;
}

/// True iff a - b lies in M Z^d, decided with a floating-point solve.
inline bool congruent(const dirup::IntMatrix& M, const LatticeIndex& a, const LatticeIndex& b) {
  const Eigen::VectorXd x = M.cast<double>().fullPivLu().solve((a - b).cast<double>());
  return ((x.array() - x.array().round()).abs() < 1e-9).all();
}

/// sum over classes C of Z^d / B^j Z^d of |sum_{m in C} w_m|^2, with classes
/// detected by a floating-point solve of B^j x = m - m'.
inline ld class_grouped_energy(const dirup::IntMatrix& Bj, const std::vector<LatticeIndex>& ms,
                               const std::vector<std::complex<double>>& w) {
  std::vector<int> cls(ms.size(), -1);
  std::vector<cld> sums;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = static_cast<int>(sums.size());
    cld s = cld(w[i].real(), w[i].imag());
    for (std::size_t k = i + 1; k < ms.size(); ++k) {
      if (cls[k] < 0 && congruent(Bj, ms[k], ms[i])) {
        cls[k] = cls[i];
        s += cld(w[k].real(), w[k].imag());
      }
    }
    sums.push_back(s);
  }
  ld e = 0;
  for (const auto& s : sums) e += std::norm(s);
  return e;
}

inline dirup::CoeffMap random_map(int d, int n_points, int spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(-spread, spread);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  dirup::CoeffMapBuilderd b(d);
  for (int i = 0; i < n_points; ++i) {
    LatticeIndex k(d);
    for (int a = 0; a < d; ++a) k(a) = coord(rng);
    const double re = val(rng);
    const double im = val(rng);
    b.add(k, {re, im});
  }
  return std::move(b).build();
}

/// Distinct random lattice points, at most max_size of them, with coordinates
/// in [-spread, spread].
inline std::vector<LatticeIndex> random_points(int d, int max_size, int spread, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, max_size);
  std::uniform_int_distribution<int> coord(-spread, spread);
  const int n = count(rng);
  std::vector<LatticeIndex> out;
  for (int i = 0; i < n; ++i) {
    LatticeIndex k(d);
    for (int a = 0; a < d; ++a) k(a) = coord(rng);
    if (std::none_of(out.begin(), out.end(), [&](const LatticeIndex& p) { return p == k; })) out.push_back(k);
  }
  return out;
}

inline LatticeIndex random_direction(int d, int spread, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(-spread, spread);
  LatticeIndex L(d);
  do {
    for (int a = 0; a < d; ++a) L(a) = coord(rng);
  } while (L.isZero());
  return L;
}

}  // namespace oracle
