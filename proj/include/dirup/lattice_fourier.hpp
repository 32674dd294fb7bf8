#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirup/coeff_map.hpp"
#include "dirup/lattice.hpp"

namespace dirup {

/// Dense d-dimensional complex array in row-major order (last axis fastest).
struct SignalTensor {
  std::vector<int> shape;
  std::vector<std::complex<double>> data;

  std::size_t size() const;
};

/// First index of the centered window of length n: index 0 sits at the
/// center, even lengths extend one further toward negative indices.
inline Int window_start(int n) { return -static_cast<Int>(n / 2); }

/// Reads the tensor entries as Fourier coefficients on the centered window.
CoeffMap from_discrete_signal(const SignalTensor& samples);

/// Inverse of from_discrete_signal over the given window shape; entries of f
/// outside the window raise InvalidArgument.
SignalTensor to_discrete_signal(const CoeffMap& f, const std::vector<int>& shape);

nlohmann::json to_json(const CoeffMap& f);
CoeffMap coeff_map_from_json(const nlohmann::json& j);

}  // namespace dirup
