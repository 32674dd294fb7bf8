#include "dirup/kernels.hpp"

#include <cmath>
#include <vector>

namespace dirup {

namespace {

void require_positive(Int n, const char* what) {
  if (n < 1) throw InvalidArgument(std::string(what) + ": n must be >= 1");
}

/// C(2n, n+m) / 2^n for m = 0..n. Starts from 2^{-n} and walks the row with
/// C(2n, j+1) = C(2n, j) (2n-j) / (j+1), so no entry overflows for n <= 500.
std::vector<double> powered_cos_row(Int n) {
  std::vector<double> row(static_cast<std::size_t>(2 * n + 1));
  double c = std::ldexp(1.0, -static_cast<int>(n));
  for (Int j = 0; j <= 2 * n; ++j) {
    row[static_cast<std::size_t>(j)] = c;
    c = c * static_cast<double>(2 * n - j) / static_cast<double>(j + 1);
  }
  return row;
}

bool collinear(const LatticeIndex& a, const LatticeIndex& b) {
  // |<a,b>|^2 == |a|^2 |b|^2 in exact integers.
  const __int128 ab = static_cast<__int128>(a.dot(b));
  return ab * ab == static_cast<__int128>(a.squaredNorm()) * static_cast<__int128>(b.squaredNorm());
}

void add_line(CoeffMapBuilder<double>& b, const LatticeIndex& base, const LatticeIndex& step, Int m, double w) {
  b.add(base + m * step, w);
}

/// f + exp(2 pi i <v, x>) + exp(-2 pi i <v, x>).
CoeffMap with_pair(const CoeffMap& f, const LatticeIndex& v) {
  CoeffMapBuilder<double> b(f.dim());
  b.reserve(f.size() + 2);
  for (std::size_t i = 0; i < f.size(); ++i) b.add(f.key(i), f.value(i));
  b.add(v, 1.0);
  b.add(LatticeIndex(-v), 1.0);
  return std::move(b).build();
}

}  // namespace

CoeffMap dirichlet_rect(const LatticeIndex& N) {
  if (N.size() == 0) throw InvalidArgument("dirichlet_rect: empty size vector");
  if ((N.array() <= 0).any()) throw InvalidArgument("dirichlet_rect: N must be positive componentwise");
  const int d = static_cast<int>(N.size());
  CoeffMapBuilder<double> b(d);
  LatticeIndex k = -N;
  while (true) {
    b.add(k, 1.0);
    int a = d - 1;
    while (a >= 0 && k(a) == N(a)) {
      k(a) = -N(a);
      --a;
    }
    if (a < 0) break;
    ++k(a);
  }
  return std::move(b).build();
}

CoeffMap fejer_inf(Int n, int d) {
  require_positive(n, "fejer_inf");
  if (d < 1) throw InvalidArgument("fejer_inf: d must be >= 1");
  CoeffMapBuilder<double> b(d);
  const Int r = n - 1;
  std::vector<detail::Coord> k(d, static_cast<detail::Coord>(-r));
  const double inv = 1.0 / static_cast<double>(n);
  while (true) {
    Int m = 0;
    for (auto c : k) m = std::max<Int>(m, std::abs(Int{c}));
    b.add(k, 1.0 - static_cast<double>(m) * inv);
    int a = d - 1;
    while (a >= 0 && k[a] == r) {
      k[a] = static_cast<detail::Coord>(-r);
      --a;
    }
    if (a < 0) break;
    ++k[a];
  }
  return std::move(b).build();
}

CoeffMap powered_cos(Int n, const Direction& L) {
  require_positive(n, "powered_cos");
  const auto row = powered_cos_row(n);
  CoeffMapBuilder<double> b(L.dim());
  const LatticeIndex zero = LatticeIndex::Zero(L.dim());
  for (Int m = -n; m <= n; ++m) add_line(b, zero, L.coords(), m, row[static_cast<std::size_t>(n + m)]);
  return std::move(b).build();
}

CoeffMap perturbed_p(Int n, const Direction& L) {
  require_positive(n, "perturbed_p");
  const Direction e1 = Direction::axis(L.dim(), 0);
  if (collinear(L.coords(), e1.coords())) {
    throw InvalidArgument("perturbed_p: L must not be collinear with e_1");
  }
  return with_pair(powered_cos(n, L), e1.coords());
}

CoeffMap perturbed_t(Int n, const Direction& L) {
  require_positive(n, "perturbed_t");
  for (int j = 0; j < L.dim(); ++j) {
    if (collinear(L.coords(), Direction::axis(L.dim(), j).coords())) {
      throw InvalidArgument("perturbed_t: L must not be collinear with a coordinate axis");
    }
    if (std::abs(L[j]) <= 1) throw InvalidArgument("perturbed_t: every |L_j| must exceed 1");
  }
  return with_pair(powered_cos(n, Direction::axis(L.dim(), 0)), L.coords());
}

namespace {

LatticeIndex resolve_base(const Direction& L, const std::optional<LatticeIndex>& k0) {
  if (!k0) return LatticeIndex::Zero(L.dim());
  if (k0->size() != L.dim()) throw DimensionMismatch(L.dim(), static_cast<int>(k0->size()));
  return *k0;
}

}  // namespace

CoeffMap dirichlet_along(Int n, const Direction& L, const std::optional<LatticeIndex>& k0) {
  require_positive(n, "dirichlet_along");
  const LatticeIndex base = resolve_base(L, k0);
  CoeffMapBuilder<double> b(L.dim());
  for (Int m = -n; m <= n; ++m) add_line(b, base, L.coords(), m, 1.0);
  return std::move(b).build();
}

CoeffMap fejer_along(Int n, const Direction& L, const std::optional<LatticeIndex>& k0) {
  require_positive(n, "fejer_along");
  const LatticeIndex base = resolve_base(L, k0);
  CoeffMapBuilder<double> b(L.dim());
  for (Int m = -(n - 1); m <= n - 1; ++m) {
    add_line(b, base, L.coords(), m, 1.0 - static_cast<double>(std::abs(m)) / static_cast<double>(n));
  }
  return std::move(b).build();
}

CoeffMap make_kernel(const KernelParams& p) {
  auto need_L = [&]() -> const Direction& {
    if (!p.L) throw InvalidArgument(kernel_name(p.family) + " requires a direction L");
    return *p.L;
  };
  switch (p.family) {
    case KernelFamily::DirichletRect: return dirichlet_rect(p.N);
    case KernelFamily::FejerInf: return fejer_inf(p.n, p.d);
    case KernelFamily::PoweredCos: return powered_cos(p.n, need_L());
    case KernelFamily::PerturbedP: return perturbed_p(p.n, need_L());
    case KernelFamily::PerturbedT: return perturbed_t(p.n, need_L());
    case KernelFamily::DirichletAlongL: return dirichlet_along(p.n, need_L(), p.k0);
    case KernelFamily::FejerAlongL: return fejer_along(p.n, need_L(), p.k0);
  }
  throw InvalidArgument("unknown kernel family");
}

std::string kernel_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::DirichletRect: return "dirichlet";
    case KernelFamily::FejerInf: return "fejer";
    case KernelFamily::PoweredCos: return "powered-cos";
    case KernelFamily::PerturbedP: return "perturbed-p";
    case KernelFamily::PerturbedT: return "perturbed-t";
    case KernelFamily::DirichletAlongL: return "dirichlet-along";
    case KernelFamily::FejerAlongL: return "fejer-along";
  }
  return "unknown";
}

KernelFamily parse_kernel_name(const std::string& name) {
  for (auto f : {KernelFamily::DirichletRect, KernelFamily::FejerInf, KernelFamily::PoweredCos,
                 KernelFamily::PerturbedP, KernelFamily::PerturbedT, KernelFamily::DirichletAlongL,
                 KernelFamily::FejerAlongL}) {
    if (kernel_name(f) == name) return f;
  }
  throw InvalidArgument("unknown kernel: " + name);
}

bool kernel_needs_direction(KernelFamily f) {
  return f != KernelFamily::DirichletRect && f != KernelFamily::FejerInf;
}

}  // namespace dirup
