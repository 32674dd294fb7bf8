#include "dirup/lattice_fourier.hpp"

#include <functional>
#include <numeric>

namespace dirup {

std::string to_string(const LatticeIndex& k) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(k(i));
  }
  return s + ")";
}

std::size_t SignalTensor::size() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, int n) { return a * static_cast<std::size_t>(n); });
}

namespace {

void check_shape(const std::vector<int>& shape) {
  if (shape.empty()) throw InvalidArgument("signal tensor must have at least one axis");
  for (int n : shape) {
    if (n < 1) throw InvalidArgument("signal tensor is empty along an axis");
  }
}

}  // namespace

CoeffMap from_discrete_signal(const SignalTensor& samples) {
  check_shape(samples.shape);
  if (samples.data.size() != samples.size()) {
    throw InvalidArgument("signal tensor data length does not match its shape");
  }
  const int d = static_cast<int>(samples.shape.size());
  CoeffMapBuilder<double> b(d);
  b.reserve(samples.data.size());
  std::vector<detail::Coord> k(d);
  for (int a = 0; a < d; ++a) k[a] = static_cast<detail::Coord>(window_start(samples.shape[a]));
  // Row-major traversal visits indices in lexicographic order.
  for (const auto& v : samples.data) {
    b.add(k, v);
    for (int a = d - 1; a >= 0; --a) {
      if (++k[a] < window_start(samples.shape[a]) + samples.shape[a]) break;
      k[a] = static_cast<detail::Coord>(window_start(samples.shape[a]));
    }
  }
  return std::move(b).build();
}

SignalTensor to_discrete_signal(const CoeffMap& f, const std::vector<int>& shape) {
  check_shape(shape);
  const int d = static_cast<int>(shape.size());
  if (d != f.dim()) throw DimensionMismatch(f.dim(), d);
  SignalTensor out{shape, {}};
  out.data.assign(out.size(), std::complex<double>(0));
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.key(i);
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const Int off = Int{k[a]} - window_start(shape[a]);
      if (off < 0 || off >= shape[a]) {
        throw InvalidArgument("coefficient " + to_string(f.index(i)) + " lies outside the window");
      }
      flat = flat * static_cast<std::size_t>(shape[a]) + static_cast<std::size_t>(off);
    }
    out.data[flat] = f.value(i);
  }
  return out;
}

nlohmann::json to_json(const CoeffMap& f) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (auto c : f.key(i)) row.push_back(c);
    row.push_back(f.value(i).real());
    row.push_back(f.value(i).imag());
    entries.push_back(std::move(row));
  }
  return {{"dim", f.dim()}, {"entries", std::move(entries)}};
}

CoeffMap coeff_map_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw InvalidArgument("coefficient map JSON needs \"dim\" and \"entries\"");
  }
  const int d = j.at("dim").get<int>();
  CoeffMapBuilder<double> b(d);
  for (const auto& row : j.at("entries")) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(d) + 2) {
      throw InvalidArgument("coefficient map entry must hold dim indices plus re, im");
    }
    LatticeIndex k(d);
    for (int a = 0; a < d; ++a) k(a) = row[a].get<Int>();
    b.add(k, {row[d].get<double>(), row[d + 1].get<double>()});
  }
  return std::move(b).build();
}

}  // namespace dirup
