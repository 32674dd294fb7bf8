#include "dirup/uncertainty.hpp"

#include <numbers>

namespace dirup {

std::string to_string(UPStatus s) {
  switch (s) {
    case UPStatus::Finite: return "Finite";
    case UPStatus::InfiniteAngular: return "InfiniteAngular";
    case UPStatus::UndefinedMonomial: return "UndefinedMonomial";
  }
  return "Unknown";
}

namespace {

nlohmann::json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

nlohmann::json to_json(const UPReport& r) {
  return {{"var_angular", number_or_inf(r.var_angular)},
          {"var_frequency", number_or_inf(r.var_frequency)},
          {"commutator_abs", number_or_inf(r.commutator_abs)},
          {"up", r.up ? number_or_inf(*r.up) : nlohmann::json(nullptr)},
          {"status", to_string(r.status)}};
}

double closed_form_up(KernelId id, const ClosedFormParams& p) {
  switch (id) {
    case KernelId::PoweredCos: {
      if (p.n < 1) throw InvalidArgument("PoweredCos needs n >= 1");
      return 0.25 + 1.0 / (8.0 * static_cast<double>(p.n) - 2.0);
    }
    case KernelId::DirichletRect: {
      if (p.N.size() == 0 || p.N.size() != p.L.size()) {
        throw InvalidArgument("DirichletRect needs N and L of equal dimension");
      }
      if ((p.N.array() <= 0).any()) throw InvalidArgument("DirichletRect needs N > 0");
      if (p.L.isZero()) throw InvalidArgument("DirichletRect needs L != 0");
      long double full = 1;
      long double overlap = 1;
      long double var_f = 0;
      for (Eigen::Index j = 0; j < p.N.size(); ++j) {
        const long double side = 2.0L * p.N(j) + 1;
        const long double shared = side - std::abs(p.L(j));
        if (shared <= 0) return std::numeric_limits<double>::infinity();
        full *= side;
        overlap *= shared;
        var_f += static_cast<long double>(p.L(j) * p.L(j)) * p.N(j) * (p.N(j) + 1) / 3.0L;
      }
      const long double l2 = static_cast<long double>(p.L.squaredNorm());
      const long double ratio = full / overlap;
      return static_cast<double>((ratio * ratio - 1) * var_f / (l2 * l2));
    }
    case KernelId::FejerLimit:
    case KernelId::FejerLimitGG: {
      if (p.d < 1) throw InvalidArgument("FejerLimit needs d >= 1");
      const double d = p.d;
      return (d + 1) * (d + 1) * (d + 2) * (d + 2) / (6 * d * (d + 3) * (d + 4));
    }
    case KernelId::DirectionalFejerLimit:
      return 0.3;
    case KernelId::MinVarPoly: {
      const double m0 = p.m0;
      if (std::isinf(m0) && m0 > 0) return std::numbers::pi * std::numbers::pi / 12 - 0.5;
      if (!(m0 >= 1) || m0 != std::floor(m0)) throw InvalidArgument("MinVarPoly needs integer m0 >= 1 or +inf");
      const double t = std::tan(std::numbers::pi / (m0 + 2));
      return m0 * (m0 + 4) / 12 * t * t - 0.5;
    }
  }
  throw InvalidArgument("unknown kernel id");
}

}  // namespace dirup
