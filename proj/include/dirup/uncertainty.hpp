#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirup/coeff_map.hpp"
#include "dirup/compensated_sum.hpp"
#include "dirup/errors.hpp"
#include "dirup/lattice.hpp"

namespace dirup {

enum class UPStatus { Finite, InfiniteAngular, UndefinedMonomial };

std::string to_string(UPStatus s);

/// Variances and product of one uncertainty computation.
///
/// `up` is empty only for UndefinedMonomial, where the product has the form
/// 0 * inf. For InfiniteAngular it holds +inf.
template <typename Scalar>
struct BasicUPReport {
  Scalar var_angular{0};
  Scalar var_frequency{0};
  Scalar commutator_abs{0};
  std::optional<Scalar> up;
  UPStatus status = UPStatus::Finite;
};

using UPReport = BasicUPReport<double>;

/// |<A f, f>| below this fraction of ||f||^2 counts as a structural zero.
inline constexpr double kAngularZeroTol = 1e-14;

namespace detail {

/// ||f||^2 - |S| for S = sum_k c_{k-off} conj(c_k), evaluated as
/// 1/2 sum_k |c_k - w c_{k-off}|^2 with |w| = 1, which avoids cancellation
/// when |S| is close to ||f||^2.
template <typename Scalar>
Scalar shift_gap(const BasicCoeffMap<Scalar>& f, std::span<const Coord> off, const std::complex<Scalar>& S) {
  using Complex = std::complex<Scalar>;
  const Scalar s_abs = std::abs(S);
  const Complex w = s_abs > 0 ? std::conj(S) / s_abs : Complex(1);
  std::vector<Coord> back(off.size());
  for (std::size_t a = 0; a < off.size(); ++a) back[a] = -off[a];
  CompensatedSum<Scalar> acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto prev = f.find_offset(i, back);
    const Complex prev_c = prev ? f.value(*prev) : Complex(0);
    acc += std::norm(f.value(i) - w * prev_c);
    if (!f.find_offset(i, off)) acc += std::norm(f.value(i));
  }
  return acc.value() / 2;
}

template <typename Scalar>
std::complex<Scalar> shift_sum(const BasicCoeffMap<Scalar>& f, std::span<const Coord> off) {
  std::vector<Coord> back(off.size());
  for (std::size_t a = 0; a < off.size(); ++a) back[a] = -off[a];
  CompensatedSum<std::complex<Scalar>> acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (auto j = f.find_offset(i, back)) acc += f.value(*j) * std::conj(f.value(i));
  }
  return acc.value();
}

/// Weighted first moment sum_k t_k |c_k|^2 where t_k = <v, k>. Terms at k
/// and -k are paired, so the result is exactly zero whenever |c_k| = |c_{-k}|.
template <typename Scalar>
Scalar paired_first_moment(const BasicCoeffMap<Scalar>& f, std::span<const Int> v) {
  const int d = f.dim();
  std::vector<Coord> neg(d);
  CompensatedSum<Scalar> acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.key(i);
    Int t = 0;
    bool positive = false;
    bool decided = false;
    for (int a = 0; a < d; ++a) {
      t += v[a] * k[a];
      neg[a] = -k[a];
      if (!decided && k[a] != 0) {
        positive = k[a] > 0;
        decided = true;
      }
    }
    if (t == 0) continue;
    const Scalar w = std::norm(f.value(i));
    const auto mirror = f.find(std::span<const Coord>(neg));
    if (positive) {
      const Scalar wm = mirror ? std::norm(f.value(*mirror)) : Scalar(0);
      acc += static_cast<Scalar>(t) * (w - wm);
    } else if (!mirror) {
      acc += static_cast<Scalar>(t) * w;
    }
  }
  return acc.value();
}

/// Variance of t_k = <v, k> under the weights |c_k|^2 / norm2.
template <typename Scalar>
Scalar directional_variance(const BasicCoeffMap<Scalar>& f, std::span<const Int> v, Scalar norm2) {
  const Scalar mean = paired_first_moment(f, v) / norm2;
  CompensatedSum<Scalar> acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.key(i);
    Int t = 0;
    for (int a = 0; a < f.dim(); ++a) t += v[a] * k[a];
    const Scalar dev = static_cast<Scalar>(t) - mean;
    acc += dev * dev * std::norm(f.value(i));
  }
  return acc.value() / norm2;
}

inline void require_nonempty(std::size_t n) {
  if (n == 0) throw InvalidArgument("uncertainty product of the zero polynomial is undefined");
}

}  // namespace detail

/// Directional uncertainty product along L.
template <typename Scalar>
BasicUPReport<Scalar> up_directional(const BasicCoeffMap<Scalar>& f, const Direction& L) {
  detail::require_nonempty(f.size());
  f.check_dim(L.coords());
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar norm_L2 = static_cast<Scalar>(L.norm2());
  const std::vector<detail::Coord> off = detail::narrow(L.coords());
  const std::vector<Int> v(L.coords().data(), L.coords().data() + L.dim());

  BasicUPReport<Scalar> r;
  if (f.size() == 1) {
    r.var_angular = inf;
    r.var_frequency = 0;
    r.commutator_abs = 0;
    r.status = UPStatus::UndefinedMonomial;
    return r;
  }
  const Scalar N = squared_norm(f);
  const std::complex<Scalar> S = detail::shift_sum(f, std::span<const detail::Coord>(off));
  const Scalar s_abs = std::abs(S);
  r.commutator_abs = norm_L2 * s_abs;
  r.var_frequency = detail::directional_variance(f, std::span<const Int>(v), N);
  if (s_abs < static_cast<Scalar>(kAngularZeroTol) * N) {
    r.var_angular = inf;
    r.up = inf;
    r.status = UPStatus::InfiniteAngular;
    return r;
  }
  const Scalar gap = detail::shift_gap(f, std::span<const detail::Coord>(off), S);
  r.var_angular = gap * (N + s_abs) / (s_abs * s_abs);
  const long double l4 = static_cast<long double>(norm_L2) * static_cast<long double>(norm_L2);
  r.up = static_cast<Scalar>(static_cast<long double>(r.var_angular) *
                             static_cast<long double>(r.var_frequency) / l4);
  return r;
}

/// Coordinate-wise uncertainty product.
template <typename Scalar>
BasicUPReport<Scalar> up_gg(const BasicCoeffMap<Scalar>& f) {
  detail::require_nonempty(f.size());
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  const int d = f.dim();
  BasicUPReport<Scalar> r;
  if (f.size() == 1) {
    r.var_angular = inf;
    r.var_frequency = 0;
    r.status = UPStatus::UndefinedMonomial;
    return r;
  }
  const Scalar N = squared_norm(f);
  CompensatedSum<Scalar> numer;
  CompensatedSum<Scalar> denom;
  CompensatedSum<Scalar> var_f;
  bool any_nonzero = false;
  std::vector<detail::Coord> off(d, 0);
  std::vector<Int> v(d, 0);
  for (int j = 0; j < d; ++j) {
    off[j] = 1;
    v[j] = 1;
    const std::complex<Scalar> S = detail::shift_sum(f, std::span<const detail::Coord>(off));
    const Scalar s_abs = std::abs(S);
    if (s_abs >= static_cast<Scalar>(kAngularZeroTol) * N) any_nonzero = true;
    numer += detail::shift_gap(f, std::span<const detail::Coord>(off), S) * (N + s_abs);
    denom += s_abs;
    var_f += detail::directional_variance(f, std::span<const Int>(v), N);
    off[j] = 0;
    v[j] = 0;
  }
  r.commutator_abs = denom.value();
  r.var_frequency = var_f.value();
  if (!any_nonzero) {
    r.var_angular = inf;
    r.up = inf;
    r.status = UPStatus::InfiniteAngular;
    return r;
  }
  const Scalar den = denom.value();
  r.var_angular = numer.value() / (den * den);
  r.up = static_cast<Scalar>(static_cast<long double>(r.var_angular) * static_cast<long double>(r.var_frequency));
  return r;
}

nlohmann::json to_json(const UPReport& r);

enum class KernelId { PoweredCos, DirichletRect, FejerLimit, FejerLimitGG, DirectionalFejerLimit, MinVarPoly };

struct ClosedFormParams {
  Int n = 0;
  LatticeIndex N;
  LatticeIndex L;
  int d = 0;
  /// Longest-thread index m0 >= 1, or +inf for the limit value.
  double m0 = 0;
};

/// Analytic value of the uncertainty product for the named family.
double closed_form_up(KernelId id, const ClosedFormParams& p);

}  // namespace dirup
