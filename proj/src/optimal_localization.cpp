#include "dirup/optimal_localization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "dirup/uncertainty.hpp"

namespace dirup {

SupportSet::SupportSet(std::vector<LatticeIndex> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("support set must be nonempty");
  dim_ = static_cast<int>(points_.front().size());
  if (dim_ < 1) throw InvalidArgument("support set dimension must be >= 1");
  for (const auto& p : points_) {
    if (p.size() != dim_) throw DimensionMismatch(dim_, static_cast<int>(p.size()));
  }
  std::sort(points_.begin(), points_.end(), lex_less);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i] == points_[i - 1]) throw InvalidArgument("support set points must be distinct");
  }
}

SupportSet SupportSet::box(const LatticeIndex& N) {
  if (N.size() == 0 || (N.array() < 0).any()) throw InvalidArgument("box needs N >= 0 componentwise");
  std::vector<LatticeIndex> pts;
  LatticeIndex k = -N;
  const int d = static_cast<int>(N.size());
  while (true) {
    pts.push_back(k);
    int a = d - 1;
    while (a >= 0 && k(a) == N(a)) {
      k(a) = -N(a);
      --a;
    }
    if (a < 0) break;
    ++k(a);
  }
  return SupportSet(std::move(pts));
}

SupportSet SupportSet::cross(Int n, int d) {
  if (n < 0 || d < 1) throw InvalidArgument("cross needs n >= 0 and d >= 1");
  std::vector<LatticeIndex> pts{LatticeIndex::Zero(d)};
  for (int j = 0; j < d; ++j) {
    for (Int t = -n; t <= n; ++t) {
      if (t == 0) continue;
      LatticeIndex k = LatticeIndex::Zero(d);
      k(j) = t;
      pts.push_back(k);
    }
  }
  return SupportSet(std::move(pts));
}

SupportSet SupportSet::line(const LatticeIndex& k0, const Direction& L, Int m) {
  if (m < 0) throw InvalidArgument("line needs m >= 0");
  if (k0.size() != L.dim()) throw DimensionMismatch(L.dim(), static_cast<int>(k0.size()));
  std::vector<LatticeIndex> pts;
  for (Int i = 0; i <= m; ++i) pts.push_back(k0 + i * L.coords());
  return SupportSet(std::move(pts));
}

nlohmann::json to_json(const SupportSet& S) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : S.points()) out.push_back(std::vector<Int>(p.data(), p.data() + p.size()));
  return out;
}

SupportSet support_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidArgument("support set JSON must be a list of index tuples");
  std::vector<LatticeIndex> pts;
  for (const auto& row : j) {
    const auto v = row.get<std::vector<Int>>();
    pts.push_back(Eigen::Map<const LatticeIndex>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return SupportSet(std::move(pts));
}

std::vector<Thread> thread_decompose(const SupportSet& S, const Direction& L) {
  if (S.dim() != L.dim()) throw DimensionMismatch(S.dim(), L.dim());
  std::unordered_set<LatticeIndex, LatticeIndexHash, LatticeIndexEqual> members(S.points().begin(),
                                                                                  S.points().end());
  std::vector<Thread> threads;
  for (const auto& p : S.points()) {
    if (members.contains(LatticeIndex(p - L.coords()))) continue;
    Thread t{p, 0};
    LatticeIndex q = p;
    while (members.contains(q)) {
      ++t.length;
      q += L.coords();
    }
    threads.push_back(std::move(t));
  }
  // Points are visited in lexicographic order, so a stable sort by length
  // leaves equal-length threads ordered by start.
  std::stable_sort(threads.begin(), threads.end(),
                   [](const Thread& a, const Thread& b) { return a.length > b.length; });
  return threads;
}

Eigen::MatrixXd halves_toeplitz(int m) {
  if (m < 0) throw InvalidArgument("Toeplitz order m must be >= 0");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int i = 0; i < m; ++i) {
    M(i, i + 1) = 0.5;
    M(i + 1, i) = 0.5;
  }
  return M;
}

std::vector<std::pair<double, Eigen::VectorXd>> toeplitz_eigenpairs(int m) {
  if (m < 0) throw InvalidArgument("Toeplitz order m must be >= 0");
  const double h = std::numbers::pi / (m + 2);
  std::vector<std::pair<double, Eigen::VectorXd>> out;
  out.reserve(m + 1);
  for (int n = 1; n <= m + 1; ++n) {
    Eigen::VectorXd v(m + 1);
    for (int j = 1; j <= m + 1; ++j) v(j - 1) = std::sin(h * n * j);
    out.emplace_back(std::cos(h * n), std::move(v));
  }
  return out;
}

MinVarSolution min_var_directional(const SupportSet& S, const Direction& L, bool normalize) {
  const auto threads = thread_decompose(S, L);
  const Thread& longest = threads.front();
  if (longest.length < 2) {
    throw InfiniteVariance("every thread has length 1: the angular variance is infinite on this support");
  }
  const Int m0 = longest.length - 1;
  const double h = std::numbers::pi / static_cast<double>(m0 + 2);
  const double scale = normalize ? std::sqrt(2.0 / static_cast<double>(m0 + 2)) : 1.0;
  CoeffMapBuilder<double> b(S.dim());
  for (Int j = 1; j <= m0 + 1; ++j) {
    b.add(longest.point(j - 1, L), scale * std::sin(h * static_cast<double>(j)));
  }
  MinVarSolution sol;
  sol.polynomial = std::move(b).build();
  sol.m0 = m0;
  const double t = std::tan(h);
  sol.var_angular = t * t;
  sol.up = closed_form_up(KernelId::MinVarPoly, {.m0 = static_cast<double>(m0)});
  return sol;
}

std::pair<CoeffMap, double> min_var_gg_rect(const LatticeIndex& N) {
  if (N.size() == 0 || (N.array() <= 0).any()) throw InvalidArgument("min_var_gg_rect: N must be positive");
  const int d = static_cast<int>(N.size());
  std::vector<std::vector<double>> axis(d);
  double sum_cos = 0;
  double sum_cos2 = 0;
  for (int j = 0; j < d; ++j) {
    const double h = std::numbers::pi / static_cast<double>(2 * N(j) + 2);
    const double inv = 1.0 / std::sqrt(static_cast<double>(N(j) + 1));
    for (Int l = 1; l <= 2 * N(j) + 1; ++l) axis[j].push_back(inv * std::sin(h * static_cast<double>(l)));
    const double c = std::cos(h);
    sum_cos += c;
    sum_cos2 += c * c;
  }
  CoeffMapBuilder<double> b(d);
  LatticeIndex k = -N;
  while (true) {
    double v = 1;
    for (int j = 0; j < d; ++j) v *= axis[j][static_cast<std::size_t>(k(j) + N(j))];
    b.add(k, v);
    int a = d - 1;
    while (a >= 0 && k(a) == N(a)) {
      k(a) = -N(a);
      --a;
    }
    if (a < 0) break;
    ++k(a);
  }
  return {std::move(b).build(), (d - sum_cos2) / (sum_cos * sum_cos)};
}

}  // namespace dirup
