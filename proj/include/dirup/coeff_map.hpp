#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dirup/compensated_sum.hpp"
#include "dirup/errors.hpp"
#include "dirup/lattice.hpp"

namespace dirup {

namespace detail {

using Coord = std::int32_t;

inline bool key_less(std::span<const Coord> a, std::span<const Coord> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline std::uint64_t hash_key(std::span<const Coord> key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Coord c : key) {
    std::uint64_t x = static_cast<std::uint32_t>(c) + h + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    h = x ^ (x >> 31);
  }
  return h;
}

inline Coord narrow_coord(Int v) {
  if (v < std::numeric_limits<Coord>::min() || v > std::numeric_limits<Coord>::max()) {
    throw BudgetExceeded("lattice coordinate out of 32-bit range");
  }
  return static_cast<Coord>(v);
}

}  // namespace detail

template <typename Scalar>
class CoeffMapBuilder;

/// Finitely supported map Z^d -> C: the Fourier coefficients of a trigonometric
/// polynomial. Entries are kept sorted lexicographically by index with exact
/// zeros removed. Immutable once built.
template <typename Scalar>
class BasicCoeffMap {
 public:
  using Complex = std::complex<Scalar>;
  using Coord = detail::Coord;

  BasicCoeffMap() = default;
  explicit BasicCoeffMap(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidArgument("coefficient map dimension must be >= 1");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<const Coord> key(std::size_t i) const {
    return {keys_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  LatticeIndex index(std::size_t i) const {
    LatticeIndex k(dim_);
    auto kk = key(i);
    for (int a = 0; a < dim_; ++a) k(a) = kk[a];
    return k;
  }

  const Complex& value(std::size_t i) const { return values_[i]; }
  const std::vector<Complex>& values() const { return values_; }

  std::optional<std::size_t> find(std::span<const Coord> k) const {
    if (slots_.empty()) return std::nullopt;
    std::size_t pos = detail::hash_key(k) & mask_;
    while (true) {
      const std::uint32_t s = slots_[pos];
      if (s == 0) return std::nullopt;
      auto cand = key(s - 1);
      if (std::equal(cand.begin(), cand.end(), k.begin())) return s - 1;
      pos = (pos + 1) & mask_;
    }
  }

  std::optional<std::size_t> find(const LatticeIndex& k) const {
    check_dim(k);
    Coord buf[kMaxStackDim];
    std::vector<Coord> heap;
    Coord* p = buf;
    if (dim_ > kMaxStackDim) {
      heap.resize(dim_);
      p = heap.data();
    }
    for (int a = 0; a < dim_; ++a) {
      const Int v = k(a);
      if (v < std::numeric_limits<Coord>::min() || v > std::numeric_limits<Coord>::max()) {
        return std::nullopt;
      }
      p[a] = static_cast<Coord>(v);
    }
    return find(std::span<const Coord>(p, dim_));
  }

  bool contains(const LatticeIndex& k) const { return find(k).has_value(); }

  /// c_k, zero outside the support.
  Complex coeff(const LatticeIndex& k) const {
    auto i = find(k);
    return i ? values_[*i] : Complex(0);
  }

  Complex coeff(std::span<const Coord> k) const {
    auto i = find(k);
    return i ? values_[*i] : Complex(0);
  }

  /// Index of the entry at key(i) + offset, if present.
  std::optional<std::size_t> find_offset(std::size_t i, std::span<const Coord> offset) const {
    Coord buf[kMaxStackDim];
    std::vector<Coord> heap;
    Coord* p = buf;
    if (dim_ > kMaxStackDim) {
      heap.resize(dim_);
      p = heap.data();
    }
    auto k = key(i);
    for (int a = 0; a < dim_; ++a) {
      const std::int64_t v = std::int64_t{k[a]} + offset[a];
      if (v < std::numeric_limits<Coord>::min() || v > std::numeric_limits<Coord>::max()) {
        return std::nullopt;
      }
      p[a] = static_cast<Coord>(v);
    }
    return find(std::span<const Coord>(p, dim_));
  }

  void check_dim(const LatticeIndex& k) const {
    if (k.size() != dim_) throw DimensionMismatch(dim_, static_cast<int>(k.size()));
  }

 private:
  friend class CoeffMapBuilder<Scalar>;
  static constexpr int kMaxStackDim = 8;

  void rebuild_index() {
    slots_.clear();
    if (values_.empty()) return;
    std::size_t cap = 16;
    while (cap < 2 * values_.size()) cap <<= 1;
    slots_.assign(cap, 0);
    mask_ = cap - 1;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      std::size_t pos = detail::hash_key(key(i)) & mask_;
      while (slots_[pos] != 0) pos = (pos + 1) & mask_;
      slots_[pos] = static_cast<std::uint32_t>(i + 1);
    }
  }

  int dim_ = 0;
  std::vector<Coord> keys_;
  std::vector<Complex> values_;
  std::vector<std::uint32_t> slots_;
  std::size_t mask_ = 0;
};

/// Accumulates (index, amplitude) pairs; duplicates are summed in insertion order.
template <typename Scalar>
class CoeffMapBuilder {
 public:
  using Complex = std::complex<Scalar>;
  using Coord = detail::Coord;

  explicit CoeffMapBuilder(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidArgument("coefficient map dimension must be >= 1");
  }

  int dim() const { return dim_; }

  void reserve(std::size_t n) {
    keys_.reserve(n * static_cast<std::size_t>(dim_));
    values_.reserve(n);
  }

  void add(std::span<const Coord> k, const Complex& v) {
    if (static_cast<int>(k.size()) != dim_) throw DimensionMismatch(dim_, static_cast<int>(k.size()));
    keys_.insert(keys_.end(), k.begin(), k.end());
    values_.push_back(v);
  }

  void add(const LatticeIndex& k, const Complex& v) {
    if (k.size() != dim_) throw DimensionMismatch(dim_, static_cast<int>(k.size()));
    for (int a = 0; a < dim_; ++a) keys_.push_back(detail::narrow_coord(k(a)));
    values_.push_back(v);
  }

  BasicCoeffMap<Scalar> build() && {
    BasicCoeffMap<Scalar> out(dim_);
    const std::size_t n = values_.size();
    const std::size_t d = static_cast<std::size_t>(dim_);
    auto key = [&](std::size_t i) { return std::span<const Coord>(keys_.data() + i * d, d); };

    bool sorted_unique = true;
    for (std::size_t i = 1; i < n && sorted_unique; ++i) {
      sorted_unique = detail::key_less(key(i - 1), key(i));
    }

    if (sorted_unique) {
      out.keys_.reserve(keys_.size());
      out.values_.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (values_[i] == Complex(0)) continue;
        auto k = key(i);
        out.keys_.insert(out.keys_.end(), k.begin(), k.end());
        out.values_.push_back(values_[i]);
      }
    } else {
      std::vector<std::uint32_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0u);
      std::stable_sort(perm.begin(), perm.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return detail::key_less(key(a), key(b)); });
      std::size_t i = 0;
      while (i < n) {
        auto k = key(perm[i]);
        Complex acc = values_[perm[i]];
        std::size_t j = i + 1;
        while (j < n && std::equal(k.begin(), k.end(), key(perm[j]).begin())) {
          acc += values_[perm[j]];
          ++j;
        }
        if (acc != Complex(0)) {
          out.keys_.insert(out.keys_.end(), k.begin(), k.end());
          out.values_.push_back(acc);
        }
        i = j;
      }
    }
    keys_.clear();
    values_.clear();
    out.rebuild_index();
    return out;
  }

 private:
  int dim_;
  std::vector<Coord> keys_;
  std::vector<Complex> values_;
};

using CoeffMap = BasicCoeffMap<double>;
using CoeffMapBuilderd = CoeffMapBuilder<double>;

template <typename Scalar>
BasicCoeffMap<Scalar> make_coeff_map(int dim,
                                     const std::vector<std::pair<LatticeIndex, std::complex<Scalar>>>& entries) {
  CoeffMapBuilder<Scalar> b(dim);
  b.reserve(entries.size());
  for (const auto& [k, v] : entries) b.add(k, v);
  return std::move(b).build();
}

template <typename To, typename From>
BasicCoeffMap<To> cast(const BasicCoeffMap<From>& f) {
  CoeffMapBuilder<To> b(f.dim());
  b.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    b.add(f.key(i), std::complex<To>(static_cast<To>(f.value(i).real()), static_cast<To>(f.value(i).imag())));
  }
  return std::move(b).build();
}

inline void require_same_dim(int a, int b) {
  if (a != b) throw DimensionMismatch(a, b);
}

/// Parseval pairing sum_k c_k(f) conj(c_k(g)).
template <typename Scalar>
std::complex<Scalar> inner(const BasicCoeffMap<Scalar>& f, const BasicCoeffMap<Scalar>& g) {
  require_same_dim(f.dim(), g.dim());
  CompensatedSum<std::complex<Scalar>> acc;
  if (f.size() <= g.size()) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (auto j = g.find(f.key(i))) acc += f.value(i) * std::conj(g.value(*j));
    }
  } else {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (auto i = f.find(g.key(j))) acc += f.value(*i) * std::conj(g.value(j));
    }
  }
  return acc.value();
}

template <typename Scalar>
Scalar squared_norm(const BasicCoeffMap<Scalar>& f) {
  CompensatedSum<Scalar> acc;
  for (const auto& v : f.values()) acc += std::norm(v);
  return acc.value();
}

namespace detail {

inline std::vector<Coord> narrow(const LatticeIndex& k) {
  std::vector<Coord> out(static_cast<std::size_t>(k.size()));
  for (Eigen::Index a = 0; a < k.size(); ++a) out[a] = narrow_coord(k(a));
  return out;
}

}  // namespace detail

/// <A_L f, f> = sum_k c_{k-L} conj(c_k).
template <typename Scalar>
std::complex<Scalar> shifted_inner(const BasicCoeffMap<Scalar>& f, const LatticeIndex& L) {
  f.check_dim(L);
  const std::vector<detail::Coord> back = detail::narrow(-L);
  CompensatedSum<std::complex<Scalar>> acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (auto j = f.find_offset(i, back)) acc += f.value(*j) * std::conj(f.value(i));
  }
  return acc.value();
}

/// (A_L f)_k = c_{k-L}: multiplication by exp(2 pi i <L, x>).
template <typename Scalar>
BasicCoeffMap<Scalar> apply_A(const BasicCoeffMap<Scalar>& f, const Direction& L) {
  f.check_dim(L.coords());
  CoeffMapBuilder<Scalar> b(f.dim());
  b.reserve(f.size());
  LatticeIndex k(f.dim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    b.add(f.index(i) + L.coords(), f.value(i));
  }
  return std::move(b).build();
}

/// (B_L f)_k = -<L, k> c_k: the operator (i / 2 pi) d/dL.
template <typename Scalar>
BasicCoeffMap<Scalar> apply_B(const BasicCoeffMap<Scalar>& f, const Direction& L) {
  f.check_dim(L.coords());
  CoeffMapBuilder<Scalar> b(f.dim());
  b.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.key(i);
    Int lk = 0;
    for (int a = 0; a < f.dim(); ++a) lk += L[a] * k[a];
    b.add(k, -static_cast<Scalar>(lk) * f.value(i));
  }
  return std::move(b).build();
}

/// g(x) = a exp(2 pi i <K, x>) f(x - x0), i.e. c_k(g) = a exp(-2 pi i <k - K, x0>) c_{k-K}(f).
template <typename Scalar>
BasicCoeffMap<Scalar> shift_modulate(const BasicCoeffMap<Scalar>& f, const LatticeIndex& K,
                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0, Scalar a) {
  f.check_dim(K);
  if (x0.size() != f.dim()) throw DimensionMismatch(f.dim(), static_cast<int>(x0.size()));
  if (a == Scalar(0)) throw InvalidArgument("shift_modulate: amplitude must be nonzero");
  CoeffMapBuilder<Scalar> b(f.dim());
  b.reserve(f.size());
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LatticeIndex m = f.index(i);
    const Scalar phase = -two_pi * m.template cast<Scalar>().dot(x0);
    b.add(m + K, a * std::polar(Scalar(1), phase) * f.value(i));
  }
  return std::move(b).build();
}

template <typename Scalar>
BasicCoeffMap<Scalar> operator*(const std::complex<Scalar>& a, const BasicCoeffMap<Scalar>& f) {
  CoeffMapBuilder<Scalar> b(f.dim());
  b.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) b.add(f.key(i), a * f.value(i));
  return std::move(b).build();
}

template <typename Scalar>
BasicCoeffMap<Scalar> operator+(const BasicCoeffMap<Scalar>& f, const BasicCoeffMap<Scalar>& g) {
  require_same_dim(f.dim(), g.dim());
  CoeffMapBuilder<Scalar> b(f.dim());
  b.reserve(f.size() + g.size());
  for (std::size_t i = 0; i < f.size(); ++i) b.add(f.key(i), f.value(i));
  for (std::size_t i = 0; i < g.size(); ++i) b.add(g.key(i), g.value(i));
  return std::move(b).build();
}

template <typename Scalar>
BasicCoeffMap<Scalar> operator-(const BasicCoeffMap<Scalar>& f, const BasicCoeffMap<Scalar>& g) {
  return f + std::complex<Scalar>(-1) * g;
}

/// Point evaluation sum_k c_k exp(2 pi i <k, x>). Debug utility.
template <typename Scalar>
std::complex<Scalar> evaluate(const BasicCoeffMap<Scalar>& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  if (x.size() != f.dim()) throw DimensionMismatch(f.dim(), static_cast<int>(x.size()));
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  CompensatedSum<std::complex<Scalar>> acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Scalar phase = two_pi * f.index(i).template cast<Scalar>().dot(x);
    acc += f.value(i) * std::polar(Scalar(1), phase);
  }
  return acc.value();
}

}  // namespace dirup
