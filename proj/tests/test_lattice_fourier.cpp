#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dirup/coeff_map.hpp"
#include "dirup/kernels.hpp"
#include "dirup/lattice_fourier.hpp"
#include "dirup/uncertainty.hpp"
#include "oracles/oracles.hpp"

using namespace dirup;
using cd = std::complex<double>;

namespace {

CoeffMap single(std::initializer_list<Int> k, cd v) {
  return make_coeff_map<double>(static_cast<int>(k.size()), {{make_index(k), v}});
}

}  // namespace

TEST(CoeffMapBuilder, MergesDuplicatesDropsZerosAndSorts) {
  CoeffMapBuilderd b(2);
  b.add(make_index({1, 0}), 2.0);
  b.add(make_index({-1, 3}), 1.0);
  b.add(make_index({1, 0}), -2.0);
  b.add(make_index({0, 0}), 0.0);
  b.add(make_index({-1, -3}), 5.0);
  const CoeffMap f = std::move(b).build();
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f.index(0), make_index({-1, -3}));
  EXPECT_EQ(f.index(1), make_index({-1, 3}));
  EXPECT_FALSE(f.contains(make_index({1, 0})));
}

TEST(CoeffMapBuilder, KeepsSubnormalAmplitudes) {
  const double tiny = std::numeric_limits<double>::denorm_min();
  const CoeffMap f = single({4}, tiny);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.coeff(make_index({4})).real(), tiny);
}

TEST(CoeffMap, LookupMissesOutsideSupportAndOutOfRange) {
  const CoeffMap f = dirichlet_rect(make_index({2, 1}));
  EXPECT_EQ(f.coeff(make_index({2, -1})), cd(1));
  EXPECT_EQ(f.coeff(make_index({3, 0})), cd(0));
  EXPECT_EQ(f.coeff(make_index({Int{1} << 40, 0})), cd(0));
  EXPECT_THROW(f.coeff(make_index({0})), DimensionMismatch);
}

TEST(Direction, RejectsZeroAndEmpty) {
  EXPECT_THROW(Direction({0, 0}), InvalidArgument);
  EXPECT_THROW(Direction(LatticeIndex(0)), InvalidArgument);
  EXPECT_EQ(Direction({2, -1}).norm2(), 5);
}

TEST(Inner, UnitMonomial) { EXPECT_EQ(inner(single({0, 0}, 1.0), single({0, 0}, 1.0)), cd(1)); }

TEST(Inner, DisjointSupports) { EXPECT_EQ(inner(single({1, 0}, 1.0), single({0, 1}, 1.0)), cd(0)); }

TEST(Inner, FejerTwoSquaredNorm) {
  const CoeffMap F2 = fejer_inf(2, 1);
  EXPECT_NEAR(inner(F2, F2).real(), 1.5, 1e-15);
  EXPECT_EQ(inner(F2, F2).imag(), 0.0);
}

TEST(Inner, DimensionMismatch) { EXPECT_THROW(inner(single({0}, 1.0), single({0, 0}, 1.0)), DimensionMismatch); }

TEST(Inner, ConjugateSymmetricOnRandomMaps) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CoeffMap f = oracle::random_map(2, 30, 4, s);
    const CoeffMap g = oracle::random_map(2, 30, 4, 1000 + s);
    const cd fg = inner(f, g);
    const cd gf = inner(g, f);
    EXPECT_NEAR(fg.real(), gf.real(), 1e-13);
    EXPECT_NEAR(fg.imag(), -gf.imag(), 1e-13);
    const cd ff = inner(f, f);
    EXPECT_EQ(ff.imag(), 0.0);
    EXPECT_GE(ff.real(), 0.0);
    EXPECT_NEAR(ff.real(), squared_norm(f), 1e-13);
  }
}

TEST(ShiftModulate, IdentityAndTranslation) {
  const CoeffMap f = powered_cos(3, Direction({1, 2}));
  const CoeffMap g = shift_modulate(f, LatticeIndex(LatticeIndex::Zero(2)), Eigen::VectorXd(Eigen::VectorXd::Zero(2)), 1.0);
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(g.index(i), f.index(i));
    EXPECT_EQ(g.value(i), f.value(i));
  }
  const CoeffMap t = shift_modulate(single({0, 0}, 1.0), make_index({2, 3}), Eigen::VectorXd(Eigen::VectorXd::Zero(2)), 1.0);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.index(0), make_index({2, 3}));
  EXPECT_EQ(t.value(0), cd(1));
}

TEST(ShiftModulate, ScalesNormByAmplitudeSquared) {
  const CoeffMap f = oracle::random_map(3, 25, 3, 7);
  Eigen::VectorXd x0(3);
  x0 << 0.1, -0.4, 0.25;
  const CoeffMap g = shift_modulate(f, make_index({1, -2, 0}), x0, -1.5);
  EXPECT_NEAR(squared_norm(g), 2.25 * squared_norm(f), 1e-12 * squared_norm(f));
  EXPECT_THROW(shift_modulate(f, make_index({0, 0, 0}), x0, 0.0), InvalidArgument);
}

TEST(ShiftModulate, LeavesDirectionalProductUnchanged) {
  const Direction L({1, 1});
  const CoeffMap p2 = powered_cos(2, L);
  Eigen::VectorXd x0(2);
  x0 << 0.3, 0.7;
  const CoeffMap g = shift_modulate(p2, make_index({5, -1}), x0, 2.5);
  const double a = *up_directional(p2, L).up;
  const double b = *up_directional(g, L).up;
  EXPECT_NEAR(b, a, 1e-10 * a);
}

TEST(ApplyA, Examples) {
  const CoeffMap e = apply_A(single({0, 0}, 1.0), Direction({1, 0}));
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e.index(0), make_index({1, 0}));

  const CoeffMap f = make_coeff_map<double>(1, {{make_index({0}), 1.0}, {make_index({1}), 1.0}});
  const CoeffMap g = apply_A(f, Direction({1}));
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.index(0), make_index({1}));
  EXPECT_EQ(g.index(1), make_index({2}));

  const CoeffMap F2 = fejer_inf(2, 1);
  EXPECT_NEAR(inner(apply_A(F2, Direction({1})), F2).real(), 1.0, 1e-15);
  EXPECT_THROW(apply_A(F2, Direction({1, 0})), DimensionMismatch);
}

TEST(ApplyA, PreservesNormExactly) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const CoeffMap f = oracle::random_map(2, 40, 5, s);
    EXPECT_EQ(squared_norm(apply_A(f, Direction({3, -2}))), squared_norm(f));
  }
}

TEST(ApplyB, Examples) {
  EXPECT_TRUE(apply_B(single({0, 0}, 1.0), Direction({2, 3})).empty());
  const CoeffMap g = apply_B(single({1, 0}, 1.0), Direction({2, 3}));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.value(0), cd(-2));
}

TEST(ApplyB, VanishesAgainstRealEvenMaps) {
  for (const CoeffMap& f : {powered_cos(4, Direction({1, 1})), fejer_inf(5, 2), dirichlet_rect(make_index({2, 3}))}) {
    EXPECT_EQ(inner(apply_B(f, Direction({1, 1})), f), cd(0));
  }
}

TEST(ApplyB, CommutatorIdentityOnRandomMaps) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const CoeffMap f = oracle::random_map(2, 30, 4, 50 + s);
    const Direction L({2, -1});
    const CoeffMap lhs = apply_A(apply_B(f, L), L) - apply_B(apply_A(f, L), L);
    const CoeffMap rhs = std::complex<double>(static_cast<double>(L.norm2())) * apply_A(f, L);
    const CoeffMap diff = lhs - rhs;
    for (std::size_t i = 0; i < diff.size(); ++i) EXPECT_LT(std::abs(diff.value(i)), 1e-13);
  }
}

TEST(DiscreteSignal, SingleSample) {
  SignalTensor t{{1, 1}, {cd(2, -1)}};
  const CoeffMap f = from_discrete_signal(t);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.index(0), make_index({0, 0}));
  EXPECT_EQ(f.value(0), cd(2, -1));
}

TEST(DiscreteSignal, OnesGiveDirichlet) {
  const CoeffMap f = from_discrete_signal({{3}, {1.0, 1.0, 1.0}});
  const CoeffMap D1 = dirichlet_rect(make_index({1}));
  ASSERT_EQ(f.size(), D1.size());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f.index(i), D1.index(i));
}

TEST(DiscreteSignal, FejerWeightsGiveFejerKernel) {
  SignalTensor t{{3, 3}, {}};
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) t.data.push_back(1.0 - std::max(std::abs(a), std::abs(b)) / 2.0);
  }
  const CoeffMap f = from_discrete_signal(t);
  const CoeffMap F2 = fejer_inf(2, 2);
  ASSERT_EQ(f.size(), F2.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f.index(i), F2.index(i));
    EXPECT_EQ(f.value(i), F2.value(i));
  }
}

TEST(DiscreteSignal, EvenLengthBiasesNegative) {
  const CoeffMap f = from_discrete_signal({{4}, {1.0, 2.0, 3.0, 4.0}});
  EXPECT_EQ(f.index(0), make_index({-2}));
  EXPECT_EQ(f.index(3), make_index({1}));
}

TEST(DiscreteSignal, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (const std::vector<int>& shape : std::vector<std::vector<int>>{{5}, {4, 3}, {2, 2, 5}, {1, 6}}) {
    SignalTensor t{shape, {}};
    for (std::size_t i = 0; i < t.size(); ++i) t.data.emplace_back(U(rng), U(rng));
    const SignalTensor back = to_discrete_signal(from_discrete_signal(t), shape);
    EXPECT_EQ(back.shape, t.shape);
    EXPECT_EQ(back.data, t.data);
  }
}

TEST(DiscreteSignal, RejectsEmptyAndOutOfWindow) {
  EXPECT_THROW(from_discrete_signal({{0}, {}}), InvalidArgument);
  EXPECT_THROW(from_discrete_signal({{}, {}}), InvalidArgument);
  EXPECT_THROW(to_discrete_signal(dirichlet_rect(make_index({3})), {3}), InvalidArgument);
}

TEST(Json, RoundTripAndSortedEntries) {
  const CoeffMap f = oracle::random_map(2, 12, 3, 5);
  const auto j = to_json(f);
  EXPECT_EQ(j.at("dim"), 2);
  const auto& e = j.at("entries");
  for (std::size_t i = 1; i < e.size(); ++i) {
    const std::vector<Int> a{e[i - 1][0].get<Int>(), e[i - 1][1].get<Int>()};
    const std::vector<Int> b{e[i][0].get<Int>(), e[i][1].get<Int>()};
    EXPECT_LT(a, b);
  }
  const CoeffMap g = coeff_map_from_json(j);
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.value(i), f.value(i));
  EXPECT_EQ(to_json(g).dump(), j.dump());
}

TEST(Evaluate, MatchesClosedFormOfPoweredCos) {
  Eigen::VectorXd x(2);
  x << 0.13, -0.41;
  const Direction L({2, 1});
  const double th = 2 * M_PI * (2 * x(0) + x(1));
  EXPECT_NEAR(evaluate(powered_cos(3, L), x).real(), std::pow(1 + std::cos(th), 3), 1e-12);
}
