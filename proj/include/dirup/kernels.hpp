#pragma once

#include <optional>
#include <string>

#include "dirup/coeff_map.hpp"
#include "dirup/lattice.hpp"

namespace dirup {

/// Rectangular Dirichlet kernel: c_k = 1 on -N <= k <= N.
CoeffMap dirichlet_rect(const LatticeIndex& N);

/// Fejer kernel for the max-norm: c_k = 1 - ||k||_inf / n on ||k||_inf < n.
CoeffMap fejer_inf(Int n, int d);

/// (1 + cos 2 pi <L, x>)^n; c_{mL} = C(2n, n+m) / 2^n.
CoeffMap powered_cos(Int n, const Direction& L);

/// powered_cos(n, L) + 2 cos 2 pi x_1. L must not be collinear with e_1.
CoeffMap perturbed_p(Int n, const Direction& L);

/// (1 + cos 2 pi x_1)^n + 2 cos 2 pi <L, x>. L must not be collinear with any
/// axis, and |L_j| > 1 for every j.
CoeffMap perturbed_t(Int n, const Direction& L);

/// Unit weights at k0 + mL, |m| <= n.
CoeffMap dirichlet_along(Int n, const Direction& L, const std::optional<LatticeIndex>& k0 = std::nullopt);

/// Weights 1 - |m| / n at k0 + mL, |m| < n.
CoeffMap fejer_along(Int n, const Direction& L, const std::optional<LatticeIndex>& k0 = std::nullopt);

enum class KernelFamily { DirichletRect, FejerInf, PoweredCos, PerturbedP, PerturbedT, DirichletAlongL, FejerAlongL };

struct KernelParams {
  KernelFamily family = KernelFamily::DirichletRect;
  Int n = 0;
  LatticeIndex N;
  int d = 0;
  std::optional<Direction> L;
  std::optional<LatticeIndex> k0;
};

CoeffMap make_kernel(const KernelParams& p);

/// CLI identifier, e.g. "powered-cos".
std::string kernel_name(KernelFamily f);
KernelFamily parse_kernel_name(const std::string& name);
bool kernel_needs_direction(KernelFamily f);

}  // namespace dirup
