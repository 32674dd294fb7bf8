// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "dirup/dilation.hpp"
#include "dirup/experiments.hpp"
#include "dirup/kernels.hpp"
#include "dirup/optimal_localization.hpp"
#include "dirup/periodic_frames.hpp"
#include "dirup/uncertainty.hpp"
#include "oracles/oracles.hpp"

using namespace dirup;
using std::numbers::pi;

namespace {

/// Collects the first few failure reasons of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) reasons_ += (reasons_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failures_ == 0; }
  std::string detail() const {
    std::string out = failures_ ? std::to_string(failures_) + " failure(s): " + reasons_ : "";
    if (!notes_.empty()) out += (out.empty() ? "" : " | ") + notes_;
    return out;
  }

 private:
  int failures_ = 0;
  std::string reasons_;
  std::string notes_;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

IntMatrix quincunx_matrix() {
  IntMatrix A(2, 2);
  A << 1, 1, -1, 1;
  return A;
}

IntMatrix dyadic_matrix() { return IntMatrix::Constant(1, 1, 2); }

double up_of(const CoeffMap& f, const Direction& L) { return up_directional(f, L).up.value_or(NAN); }

void c1(Check& c) {
  for (const LatticeIndex& l : {make_index({1}), make_index({1, 0}), make_index({1, 1}), make_index({2, -1}),
                                make_index({1, 1, 1})}) {
    const Direction L(l);
    for (Int n = 1; n <= 20; ++n) {
      const double want = 0.25 + 1.0 / (8.0 * n - 2);
      const double got = up_of(powered_cos(n, L), L);
      c.expect(rel(got, want) <= 1e-10, "n=" + std::to_string(n) + " L=" + to_string(l) + " up=" + fmt(got));
    }
  }
}

void c2(Check& c) {
  std::vector<LatticeIndex> dirs;
  for (Int a = -3; a <= 3; ++a) {
    for (Int b = 0; b <= 3; ++b) {
      if (b == 0 && a <= 0) continue;
      dirs.push_back(make_index({a, b}));
    }
  }
  long violations = 0, steps = 0;
  double worst = 0;
  std::string example;
  for (const LatticeIndex& l : dirs) {
    const Direction L(l);
    std::vector<std::vector<double>> grid(21, std::vector<double>(21, NAN));
    for (Int a = 1; a <= 20; ++a) {
      for (Int b = 1; b <= 20; ++b) {
        const LatticeIndex N = make_index({a, b});
        const double want = closed_form_up(KernelId::DirichletRect, {.N = N, .L = l});
        const UPReport r = up_directional(dirichlet_rect(N), L);
        const double got = r.up.value_or(NAN);
        grid[a][b] = got;
        if (std::isinf(want)) {
          c.expect(std::isinf(got), "expected infinite product at N=" + to_string(N));
        } else {
          worst = std::max(worst, std::abs(got - want));
          c.expect(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)),
                   "N=" + to_string(N) + " L=" + to_string(l) + " got " + fmt(got) + " want " + fmt(want));
        }
      }
    }
    // Strict growth along each axis with an active component of L; axes with L_j = 0 leave the product unchanged.
    for (int axis = 0; axis < 2; ++axis) {
      for (Int other = 1; other <= 20; ++other) {
        for (Int t = 1; t < 20; ++t) {
          const double u0 = axis == 0 ? grid[t][other] : grid[other][t];
          const double u1 = axis == 0 ? grid[t + 1][other] : grid[other][t + 1];
          if (!std::isfinite(u0) || !std::isfinite(u1)) continue;
          ++steps;
          const bool ok = l(axis) == 0 ? rel(u1, u0) <= 1e-12 : u1 > u0;
          if (!ok) {
            ++violations;
            if (violations == 1) {
              const LatticeIndex N0 = axis == 0 ? make_index({t, other}) : make_index({other, t});
              const LatticeIndex N1 = axis == 0 ? make_index({t + 1, other}) : make_index({other, t + 1});
              example = "L=" + to_string(l) + " N " + to_string(N0) + "->" + to_string(N1) + ": " + fmt(u0) + "->" + fmt(u1);
            }
          }
        }
      }
    }
  }
  c.expect(violations == 0, "monotonicity broken in " + std::to_string(violations) + " of " + std::to_string(steps) +
                                " axis steps, first " + example);
  c.note("closed form max abs dev=" + fmt(worst));
}

void c3(Check& c) {
  for (int d = 1; d <= 3; ++d) {
    const double target = closed_form_up(KernelId::FejerLimit, {.d = d});
    const LatticeIndex l = LatticeIndex::Ones(d);
    const Direction L(l);
    const std::vector<Int> ns = d == 3 ? std::vector<Int>{32, 64, 96} : std::vector<Int>{32, 64, 128, 256};
    const double tol = d == 3 ? 0.04 : 0.02;
    double prev_l = INFINITY, prev_g = INFINITY;
    for (Int n : ns) {
      const CoeffMap F = fejer_inf(n, d);
      const double eL = rel(up_of(F, L), target);
      const double eG = rel(up_gg(F).up.value_or(NAN), target);
      c.expect(eL < prev_l && eG < prev_g, "error not decreasing at d=" + std::to_string(d) + " n=" + std::to_string(n));
      prev_l = eL;
      prev_g = eG;
    }
    c.expect(prev_l <= tol, "UP_L rel err " + fmt(prev_l) + " at d=" + std::to_string(d));
    c.expect(prev_g <= tol, "UP_GG rel err " + fmt(prev_g) + " at d=" + std::to_string(d));
    c.note("d=" + std::to_string(d) + " n=" + std::to_string(ns.back()) + " err_L=" + fmt(prev_l) + " err_GG=" + fmt(prev_g));
  }
}

void c4(Check& c) {
  const Direction L({1, 2});
  const double fe = up_of(fejer_along(256, L), L);
  c.expect(rel(fe, 0.3) <= 0.01, "F_256^L up=" + fmt(fe));
  double prev = 0;
  for (Int n = 4; n <= 256; n *= 2) {
    const double u = up_of(dirichlet_along(n, L), L);
    c.expect(u > prev, "D_n^L not increasing at n=" + std::to_string(n));
    prev = u;
  }
  c.expect(prev > 10, "D_256^L up only " + fmt(prev));
  c.note("F_256^L=" + fmt(fe) + " D_256^L=" + fmt(prev));
}

void c5(Check& c) {
  const Int n = 40;
  const double scale = static_cast<double>(n) * std::pow(4.0, static_cast<double>(n));
  {
    const Direction L({1, 1});
    const CoeffMap p = perturbed_p(n, L);
    const double uL = up_of(p, L);
    const double gg = up_gg(p).up.value_or(NAN) / scale;
    const double target = 2.0 * 2 / 32;
    c.expect(rel(uL, 0.25) <= 0.05, "UP_L(p~)=" + fmt(uL));
    c.expect(rel(gg, target) <= 0.10, "UP_GG(p~)/(n 4^n)=" + fmt(gg) + " vs " + fmt(target));
    c.note("p~ L=(1,1): UP_L=" + fmt(uL) + " UP_GG/(n4^n)=" + fmt(gg));
    const Direction L2({1, 2});
    const double gg2 = up_gg(perturbed_p(n, L2)).up.value_or(NAN) / scale;
    c.note("supplementary p~ L=(1,2): UP_GG/(n4^n)=" + fmt(gg2) + " vs " + fmt(2.0 * 5 / 32));
  }
  {
    const Direction L({2, 3});
    const CoeffMap t = perturbed_t(n, L);
    const double gg = up_gg(t).up.value_or(NAN) / static_cast<double>(n);
    const double uL = up_of(t, L) / scale;
    const double l4 = 13.0 * 13.0;
    const double target = 4.0 / (32 * l4);
    c.expect(rel(gg, 0.25) <= 0.10, "UP_GG(t~)/n=" + fmt(gg));
    c.expect(rel(uL, target) <= 0.10, "UP_L(t~)/(n 4^n)=" + fmt(uL) + " vs " + fmt(target));
    c.note("t~ L=(2,3): UP_GG/n=" + fmt(gg) + " UP_L/(n4^n)=" + fmt(uL));
  }
}

void c6(Check& c) {
  std::mt19937_64 rng(20261019);
  int done = 0;
  double worst_beat = 0;
  while (done < 50) {
    const int d = 1 + done % 3;
    const SupportSet S(oracle::random_points(d, 60, d == 1 ? 20 : 3, rng));
    const Direction L(oracle::random_direction(d, 2, rng));
    MinVarSolution s;
    try {
      s = min_var_directional(S, L);
    } catch (const InfiniteVariance&) {
      continue;
    }
    ++done;
    const double t = std::tan(pi / static_cast<double>(s.m0 + 2));
    c.expect(std::abs(s.var_angular - t * t) <= 1e-12 * std::max(1.0, t * t), "var differs from tan^2");
    const UPReport r = up_directional(s.polynomial, L);
    c.expect(std::abs(r.var_angular - s.var_angular) <= 1e-12 * std::max(1.0, s.var_angular),
             "up_directional var differs: " + fmt(r.var_angular) + " vs " + fmt(s.var_angular));
    const double q = oracle::rayleigh_search(S.points(), L.coords(), 10000, 60, 1000 + done);
    const double found = q > 0 ? 1 / (q * q) - 1 : INFINITY;
    worst_beat = std::max(worst_beat, s.var_angular - found);
    c.expect(found >= s.var_angular - 1e-9, "Rayleigh search beat the minimum: " + fmt(found));
  }
  c.note("max oracle advantage=" + fmt(worst_beat));
}

void c7(Check& c) {
  double worst_eq = 0, worst_spec = 0;
  for (int m = 0; m <= 50; ++m) {
    const Eigen::MatrixXd M = halves_toeplitz(m);
    const auto pairs = toeplitz_eigenpairs(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    for (int n = 0; n <= m; ++n) {
      const auto& [lambda, v] = pairs[n];
      worst_eq = std::max(worst_eq, (M * v - lambda * v).cwiseAbs().maxCoeff());
      worst_spec = std::max(worst_spec, std::abs(lambda - es.eigenvalues()(m - n)));
    }
  }
  c.expect(worst_eq <= 1e-13, "matrix equation residual " + fmt(worst_eq));
  c.expect(worst_spec <= 1e-12, "spectrum mismatch " + fmt(worst_spec));
  c.note("residual=" + fmt(worst_eq) + " spectrum=" + fmt(worst_spec));
}

void c8(Check& c) {
  std::vector<LatticeIndex> boxes;
  for (Int a = 1; a <= 4; ++a) {
    boxes.push_back(make_index({a}));
    for (Int b = 1; b <= 4; ++b) {
      boxes.push_back(make_index({a, b}));
      for (Int e = 1; e <= 4; ++e) boxes.push_back(make_index({a, b, e}));
    }
  }
  for (const auto& N : boxes) {
    const int d = static_cast<int>(N.size());
    const auto [f, var] = min_var_gg_rect(N);
    double sc = 0, sc2 = 0;
    for (int j = 0; j < d; ++j) {
      const double cj = std::cos(pi / static_cast<double>(2 * N(j) + 2));
      sc += cj;
      sc2 += cj * cj;
      const double s = std::abs(shifted_inner(f, LatticeIndex(LatticeIndex::Unit(d, j))));
      c.expect(std::abs(s - cj) <= 1e-12, "axis sum at N=" + to_string(N));
    }
    c.expect(std::abs(var - (d - sc2) / (sc * sc)) <= 1e-12, "variance formula at N=" + to_string(N));
  }
}

void c9(Check& c) {
  double worst = 0;
  for (const auto& [A, l] : std::vector<std::pair<IntMatrix, LatticeIndex>>{
           {dyadic_matrix(), make_index({1})}, {quincunx_matrix(), make_index({1, 0})}, {quincunx_matrix(), make_index({1, 1})}}) {
    const PeriodicFrame fr(DilationMatrix::validate(A), Direction(l));
    for (int j = 1; j <= 10; ++j) {
      const UepReport r = uep_identity_check(fr, j);
      worst = std::max({worst, r.residual_norm, r.residual_cross});
      c.expect(r.residual_norm < 1e-12 && r.residual_cross < 1e-12, "j=" + std::to_string(j) + " L=" + to_string(l));
    }
  }
  c.note("max residual=" + fmt(worst));
}

void c10(Check& c) {
  double worst_res = 0, worst_gap = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int d = 1 + static_cast<int>(s % 2);
    const PeriodicFrame fr(DilationMatrix::validate(d == 1 ? dyadic_matrix() : quincunx_matrix()),
                           d == 1 ? Direction({1}) : Direction({1, 0}));
    const CoeffMap f = random_real_trig_polynomial(d, 4, s);
    const CascadeReport r = parseval_cascade_check(fr, f, 14);
    for (int j = 0; j <= 12; ++j) worst_res = std::max(worst_res, std::abs(r.residual[j]));
    worst_gap = std::max(worst_gap, r.energy_gap);
    c.expect(r.max_residual < 1e-10, "cascade residual " + fmt(r.max_residual));
    c.expect(r.energy_gap < 1e-6, "||f||^2 - E_14 = " + fmt(r.energy_gap) + " (||f||^2=" + fmt(r.norm2) + ")");
  }
  c.note("max residual=" + fmt(worst_res) + " max gap=" + fmt(worst_gap));
}

void c11(Check& c) {
  for (const auto& [A, l] : std::vector<std::pair<IntMatrix, LatticeIndex>>{{dyadic_matrix(), make_index({1})},
                                                                            {quincunx_matrix(), make_index({1, 0})}}) {
    const PeriodicFrame fr(DilationMatrix::validate(A), Direction(l));
    const LimitRow row = up_limit_row(fr, 400, 1e-10);
    const auto ref = reference_limits_check(fr, 400, 1e-10);
    const std::string tag = " d=" + std::to_string(fr.dim());
    c.expect(rel(row.up_phi, 0.25) <= 0.015, "phi" + tag + " " + fmt(row.up_phi));
    c.expect(rel(row.up_psi, row.target_psi) <= 0.03, "psi" + tag + " " + fmt(row.up_psi));
    c.expect(rel(ref.first, row.up_phi) <= 0.05, "xi0 vs phi" + tag);
    c.expect(rel(ref.second, row.up_psi) <= 0.05, "eta vs psi" + tag);
    c.note(tag.substr(1) + ": phi=" + fmt(row.up_phi) + " psi=" + fmt(row.up_psi) + " xi0=" + fmt(ref.first) +
           " eta=" + fmt(ref.second));
  }
}

void c12(Check& c) {
  const std::vector<std::pair<std::string, nlohmann::json>> runs{
      {"up", {{"kernel", "fejer"}, {"n", 6}, {"d", 2}, {"L", "1,1"}}},
      {"kernel-sweep", {{"kernel", "powered-cos"}, {"n", "1,2,4,8,16"}, {"L", "2,-1"}}},
      {"compare-gg", {{"kernel", "perturbed-p"}, {"n", "5,10"}, {"L", "1,1"}}},
      {"min-var", {{"support", "box"}, {"N", "3,3"}, {"L", "1,0"}}},
      {"frame-uep", {{"L", "1,1"}, {"levels", "2,4,6,8"}}},
      {"frame-cascade", {{"L", "1,0"}, {"J", 8}}},
      {"frame-limits", {{"L", "1"}, {"levels", "20,40,80"}}},
      {"reference-limits", {{"L", "1,0"}, {"levels", "20,40"}}},
  };
  for (const auto& [name, params] : runs) {
    for (int threads : {1, 4}) {
      ExperimentSpec s;
      s.name = name;
      s.params = params;
      s.seed = 42;
      s.threads = threads;
      const std::string a = render(s, run_experiment(s).table);
      const std::string b = render(s, run_experiment(s).table);
      c.expect(a == b, name + " differs between runs with threads=" + std::to_string(threads));
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"exact optimal sequence", c1},  {"dirichlet closed form", c2},   {"fejer limits", c3},
      {"directional kernels", c4},     {"non-equivalence", c5},         {"minimal angular variance", c6},
      {"toeplitz eigenpairs", c7},     {"gg rectangle", c8},            {"uep identities", c9},
      {"parseval cascade", c10},       {"localization limits", c11},    {"determinism", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.ok()) ++failed;
    std::printf("%s %2zu %s (%.1fs)%s%s\n", c.ok() ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                c.detail().empty() ? "" : " -- ", c.detail().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
