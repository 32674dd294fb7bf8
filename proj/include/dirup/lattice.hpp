#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>

#include "dirup/errors.hpp"

namespace dirup {

using Int = std::int64_t;

/// A point k of the integer lattice Z^d.
using LatticeIndex = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;

inline LatticeIndex make_index(std::initializer_list<Int> coords) {
  LatticeIndex k(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (Int c : coords) k(i++) = c;
  return k;
}

inline Int dot(const LatticeIndex& a, const LatticeIndex& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(static_cast<int>(a.size()), static_cast<int>(b.size()));
  }
  return a.dot(b);
}

/// Lexicographic order on lattice points of equal dimension.
inline bool lex_less(const LatticeIndex& a, const LatticeIndex& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

std::string to_string(const LatticeIndex& k);

struct LatticeIndexHash {
  std::size_t operator()(const LatticeIndex& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(k.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) {
      h ^= static_cast<std::uint64_t>(k(i)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct LatticeIndexEqual {
  bool operator()(const LatticeIndex& a, const LatticeIndex& b) const noexcept {
    return a.size() == b.size() && a == b;
  }
};

/// Nonzero integer direction L.
class Direction {
 public:
  explicit Direction(LatticeIndex coords) : coords_(std::move(coords)) {
    if (coords_.size() == 0) throw InvalidArgument("direction must have dimension >= 1");
    if (coords_.isZero()) throw InvalidArgument("direction must be a nonzero vector");
  }
  Direction(std::initializer_list<Int> coords) : Direction(make_index(coords)) {}

  int dim() const { return static_cast<int>(coords_.size()); }
  const LatticeIndex& coords() const { return coords_; }
  Int operator[](int i) const { return coords_(i); }

  /// Squared Euclidean norm.
  Int norm2() const { return coords_.squaredNorm(); }

  /// Unit axis direction e_axis in dimension dim.
  static Direction axis(int dim, int axis) {
    LatticeIndex e = LatticeIndex::Zero(dim);
    e(axis) = 1;
    return Direction(std::move(e));
  }

 private:
  LatticeIndex coords_;
};

}  // namespace dirup
