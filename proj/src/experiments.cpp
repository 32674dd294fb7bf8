#include "dirup/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "dirup/dilation.hpp"
#include "dirup/errors.hpp"
#include "dirup/kernels.hpp"
#include "dirup/lattice_fourier.hpp"
#include "dirup/optimal_localization.hpp"
#include "dirup/periodic_frames.hpp"
#include "dirup/uncertainty.hpp"

namespace dirup {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"up",        "kernel-sweep", "compare-gg",   "min-var",
                                              "frame-uep", "frame-cascade", "frame-limits", "reference-limits"};
  return names;
}

ExperimentSpec parse_spec(const json& j) {
  if (!j.is_object()) throw InvalidArgument("experiment spec must be a JSON object");
  static const std::set<std::string> keys{"name", "params", "output", "format", "seed", "threads", "budget"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) throw InvalidArgument("unknown spec field: " + k);
  }
  ExperimentSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    if (j.contains("params")) s.params = j.at("params");
    if (j.contains("output")) s.output = j.at("output").get<std::string>();
    if (j.contains("format")) s.format = j.at("format").get<std::string>();
    if (j.contains("seed") && !j.at("seed").is_null()) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads") && !j.at("threads").is_null()) s.threads = j.at("threads").get<int>();
    if (j.contains("budget")) s.budget = j.at("budget").get<double>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed experiment spec: ") + e.what());
  }
  if (!s.params.is_object()) throw InvalidArgument("spec params must be a JSON object");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), s.name) == names.end()) throw InvalidArgument("unknown experiment: " + s.name);
  if (s.format != "csv" && s.format != "json") throw InvalidArgument("format must be csv or json");
  return s;
}

json spec_echo(const ExperimentSpec& spec) {
  json j = {{"name", spec.name}, {"params", spec.params}, {"format", spec.format}, {"budget", spec.budget}};
  j["seed"] = spec.seed ? json(*spec.seed) : json(nullptr);
  j["threads"] = spec.threads ? json(*spec.threads) : json(nullptr);
  return j;
}

int resolve_threads(const ExperimentSpec& spec) {
  if (spec.threads) {
    if (*spec.threads < 1) throw InvalidArgument("threads must be >= 1");
    return *spec.threads;
  }
  if (const char* env = std::getenv("DIRUP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
    throw InvalidArgument("DIRUP_THREADS must be a positive integer");
  }
  return 1;
}

CoeffMap random_real_trig_polynomial(int d, Int radius, std::uint64_t seed) {
  if (d < 1 || radius < 0) throw InvalidArgument("random polynomial needs d >= 1 and radius >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  CoeffMapBuilder<double> b(d);
  LatticeIndex k = LatticeIndex::Constant(d, -radius);
  // Lex-negative points are filled from their mirror, so draw only for the rest.
  std::vector<std::pair<LatticeIndex, std::complex<double>>> upper;
  while (true) {
    bool positive = false;
    bool zero = true;
    for (int a = 0; a < d; ++a) {
      if (k(a) != 0) {
        positive = k(a) > 0;
        zero = false;
        break;
      }
    }
    if (zero) {
      b.add(k, U(rng));
    } else if (positive) {
      const double re = U(rng);
      const double im = U(rng);
      b.add(k, {re, im});
      b.add(LatticeIndex(-k), {re, -im});
    }
    int a = d - 1;
    while (a >= 0 && k(a) == radius) {
      k(a) = -radius;
      --a;
    }
    if (a < 0) break;
    ++k(a);
  }
  return std::move(b).build();
}

namespace {

// Parameter access with schema validation.

class Params {
 public:
  Params(const json& p, std::set<std::string> allowed) : p_(p) {
    if (!p_.is_object()) throw InvalidArgument("params must be a JSON object");
    for (const auto& [k, v] : p_.items()) {
      if (!allowed.contains(k)) throw InvalidArgument("unknown parameter for this experiment: " + k);
    }
  }

  bool has(const std::string& key) const { return p_.contains(key) && !p_.at(key).is_null(); }

  std::string str(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!p_.at(key).is_string()) throw InvalidArgument("parameter " + key + " must be a string");
    return p_.at(key).get<std::string>();
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = p_.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_real(v.get<std::string>(), key);
    throw InvalidArgument("parameter " + key + " must be a number");
  }

  std::vector<Int> ints(const std::string& key) const {
    if (!has(key)) throw InvalidArgument("missing parameter: " + key);
    return to_ints(p_.at(key), key);
  }

  std::vector<Int> ints(const std::string& key, std::vector<Int> fallback) const {
    return has(key) ? ints(key) : fallback;
  }

  Int integer(const std::string& key) const {
    const auto v = ints(key);
    if (v.size() != 1) throw InvalidArgument("parameter " + key + " must be a single integer");
    return v.front();
  }

  Int integer(const std::string& key, Int fallback) const { return has(key) ? integer(key) : fallback; }

  IntMatrix matrix(const std::string& key) const {
    if (!has(key)) throw InvalidArgument("missing parameter: " + key);
    json v = p_.at(key);
    if (v.is_string() && v.get<std::string>().starts_with("[")) {
      try {
        v = json::parse(v.get<std::string>());
      } catch (const json::exception&) {
        throw InvalidArgument("parameter " + key + " is not a JSON matrix");
      }
    }
    std::vector<std::vector<Int>> rows;
    // "a,b;c,d" lists rows separated by semicolons.
    if (v.is_string()) {
      std::stringstream ss(v.get<std::string>());
      std::string row;
      while (std::getline(ss, row, ';')) rows.push_back(to_ints(json(row), key));
    } else if (v.is_array()) {
      for (const auto& r : v) rows.push_back(to_ints(r, key));
    } else {
      throw InvalidArgument("parameter " + key + " must be a matrix");
    }
    if (rows.empty()) throw InvalidArgument("parameter " + key + " is an empty matrix");
    IntMatrix M(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw InvalidArgument("ragged matrix in parameter " + key);
      for (std::size_t c = 0; c < rows[i].size(); ++c) M(i, c) = rows[i][c];
    }
    return M;
  }

  const json& raw(const std::string& key) const { return p_.at(key); }

 private:
  static double parse_real(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw InvalidArgument("parameter " + key + " is not a number: " + s);
    return x;
  }

  static std::vector<Int> to_ints(const json& v, const std::string& key) {
    std::vector<Int> out;
    auto push = [&](const json& x) {
      if (x.is_number_integer()) {
        out.push_back(x.get<Int>());
      } else if (x.is_number_float() && x.get<double>() == std::floor(x.get<double>())) {
        out.push_back(static_cast<Int>(x.get<double>()));
      } else {
        throw InvalidArgument("parameter " + key + " must hold integers");
      }
    };
    if (v.is_string()) {
      std::stringstream ss(v.get<std::string>());
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const long long x = std::strtoll(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') throw InvalidArgument("parameter " + key + " is not an integer list");
        out.push_back(x);
      }
    } else if (v.is_array()) {
      for (const auto& x : v) push(x);
    } else {
      push(v);
    }
    if (out.empty()) throw InvalidArgument("parameter " + key + " is empty");
    return out;
  }

  const json& p_;
};

LatticeIndex to_index(const std::vector<Int>& v) {
  return Eigen::Map<const LatticeIndex>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json num(double x) { return json(x); }

json opt_num(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
  }
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first failure
/// by index is rethrown, so error reporting does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class Budget {
 public:
  explicit Budget(double cap) : cap_(cap) {
    if (!(cap > 0)) throw InvalidArgument("budget must be positive");
  }
  void charge(double points, const std::string& what) {
    used_ += points;
    if (used_ > cap_) {
      std::ostringstream ss;
      ss << what << " needs about " << used_ << " lattice points, over the budget of " << cap_;
      throw BudgetExceeded(ss.str());
    }
  }

 private:
  double cap_;
  double used_ = 0;
};

std::string join_ints(const std::vector<Int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Kernel construction shared by up / kernel-sweep / compare-gg.

struct KernelRequest {
  KernelFamily family;
  int d = 0;
  std::optional<Direction> L;
  std::optional<LatticeIndex> k0;
  std::optional<std::vector<Int>> N;
};

KernelRequest kernel_request(const Params& p, const std::string& fallback_kernel) {
  KernelRequest r{parse_kernel_name(p.str("kernel", fallback_kernel))};
  if (p.has("L")) r.L = Direction(to_index(p.ints("L")));
  if (p.has("k0")) r.k0 = to_index(p.ints("k0"));
  if (p.has("N")) r.N = p.ints("N");
  if (p.has("d")) {
    r.d = static_cast<int>(p.integer("d"));
    if (r.d < 1) throw InvalidArgument("d must be >= 1");
  } else if (r.L) {
    r.d = r.L->dim();
  } else if (r.N) {
    r.d = static_cast<int>(r.N->size());
  } else {
    r.d = 1;
  }
  if (r.L && r.L->dim() != r.d) throw DimensionMismatch(r.d, r.L->dim());
  if (kernel_needs_direction(r.family) && !r.L) throw InvalidArgument(kernel_name(r.family) + " requires L");
  if (!r.L) r.L = Direction::axis(r.d, 0);
  return r;
}

KernelParams kernel_params(const KernelRequest& r, Int n) {
  KernelParams kp;
  kp.family = r.family;
  kp.n = n;
  kp.d = r.d;
  kp.L = r.L;
  kp.k0 = r.k0;
  if (r.family == KernelFamily::DirichletRect) {
    kp.N = r.N ? to_index(*r.N) : LatticeIndex::Constant(r.d, n);
    if (kp.N.size() != r.d) throw DimensionMismatch(r.d, static_cast<int>(kp.N.size()));
  }
  return kp;
}

double kernel_points(const KernelParams& kp) {
  switch (kp.family) {
    case KernelFamily::DirichletRect: {
      double s = 1;
      for (Eigen::Index i = 0; i < kp.N.size(); ++i) s *= 2.0 * static_cast<double>(kp.N(i)) + 1;
      return s;
    }
    case KernelFamily::FejerInf: return std::pow(2.0 * static_cast<double>(kp.n) - 1, kp.d);
    default: return 2.0 * static_cast<double>(kp.n) + 3;
  }
}

std::optional<double> kernel_closed_form(const KernelParams& kp) {
  if (kp.family == KernelFamily::PoweredCos) return closed_form_up(KernelId::PoweredCos, {.n = kp.n});
  if (kp.family == KernelFamily::DirichletRect) {
    return closed_form_up(KernelId::DirichletRect, {.N = kp.N, .L = kp.L->coords()});
  }
  return std::nullopt;
}

// Experiments.

ExperimentResult run_up(const ExperimentSpec& spec, Budget& budget) {
  const Params p(spec.params, {"kernel", "input", "n", "N", "d", "L", "k0"});
  CoeffMap f;
  std::string label;
  std::optional<double> closed;
  Direction L = Direction::axis(1, 0);
  if (p.has("input")) {
    f = coeff_map_from_json(read_json_file(p.str("input", "")));
    if (f.empty()) throw InvalidArgument("input coefficient map is empty");
    L = p.has("L") ? Direction(to_index(p.ints("L"))) : Direction::axis(f.dim(), 0);
    label = "input";
    budget.charge(static_cast<double>(f.size()), "up");
  } else {
    const auto req = kernel_request(p, "powered-cos");
    const auto kp = kernel_params(req, p.integer("n", 1));
    budget.charge(kernel_points(kp), "up");
    f = make_kernel(kp);
    L = *req.L;
    label = kernel_name(req.family);
    closed = kernel_closed_form(kp);
  }
  const auto r = up_directional(f, L);
  const auto g = up_gg(f);
  ExperimentResult out;
  out.table.columns = {"kernel", "var_angular", "var_frequency", "commutator_abs", "up", "status", "up_gg", "closed_form"};
  out.table.add_row({label, num(r.var_angular), num(r.var_frequency), num(r.commutator_abs), opt_num(r.up),
                     to_string(r.status), opt_num(g.up), opt_num(closed)});
  std::ostringstream ss;
  ss.precision(17);
  ss << "up: " << label << " status=" << to_string(r.status);
  if (r.up) ss << " up=" << *r.up;
  out.summary = ss.str();
  return out;
}

std::optional<double> sweep_limit(KernelFamily fam, int d, bool gg) {
  switch (fam) {
    case KernelFamily::FejerInf: return closed_form_up(KernelId::FejerLimit, {.d = d});
    case KernelFamily::FejerAlongL:
      return gg ? std::nullopt : std::optional<double>(closed_form_up(KernelId::DirectionalFejerLimit, {}));
    case KernelFamily::PoweredCos:
    case KernelFamily::PerturbedP: return gg ? std::nullopt : std::optional<double>(0.25);
    case KernelFamily::DirichletRect:
    case KernelFamily::DirichletAlongL: return std::numeric_limits<double>::infinity();
    default: return std::nullopt;
  }
}

ExperimentResult run_kernel_sweep(const ExperimentSpec& spec, Budget& budget) {
  const Params p(spec.params, {"kernel", "n", "N", "d", "L", "k0", "product", "method"});
  const auto req = kernel_request(p, "fejer");
  const std::string product = p.str("product", "L");
  const std::string method = p.str("method", "numeric");
  if (product != "L" && product != "gg") throw InvalidArgument("product must be L or gg");
  if (method != "numeric" && method != "closed-form") throw InvalidArgument("method must be numeric or closed-form");
  const bool gg = product == "gg";
  const auto ns = p.ints("n");
  std::vector<KernelParams> kps;
  if (req.N) throw InvalidArgument("kernel-sweep varies n; pass d and L instead of N");
  for (Int n : ns) {
    auto kp = kernel_params(req, n);
    if (method == "closed-form") {
      if (gg || !kernel_closed_form(kp)) {
        throw InvalidArgument("closed-form method is available for powered-cos and dirichlet with product L");
      }
    } else {
      budget.charge(kernel_points(kp), "kernel-sweep");
    }
    kps.push_back(std::move(kp));
  }
  const auto limit = sweep_limit(req.family, req.d, gg);
  std::vector<std::optional<double>> ups(kps.size());
  parallel_for(kps.size(), resolve_threads(spec), [&](std::size_t i) {
    if (method == "closed-form") {
      ups[i] = kernel_closed_form(kps[i]);
      return;
    }
    const CoeffMap f = make_kernel(kps[i]);
    ups[i] = gg ? up_gg(f).up : up_directional(f, *req.L).up;
  });
  ExperimentResult out;
  out.table.columns = {"n", "up", "limit", "rel_dev"};
  double last_dev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < kps.size(); ++i) {
    json dev = nullptr;
    if (limit && std::isfinite(*limit) && ups[i]) {
      last_dev = (*ups[i] - *limit) / *limit;
      dev = last_dev;
    }
    out.table.add_row({ns[i], opt_num(ups[i]), opt_num(limit), dev});
  }
  std::ostringstream ss;
  ss.precision(6);
  ss << "kernel-sweep: " << kernel_name(req.family) << " product=" << product << " rows=" << kps.size()
     << " last_rel_dev=" << last_dev;
  out.summary = ss.str();
  return out;
}

ExperimentResult run_compare_gg(const ExperimentSpec& spec, Budget& budget) {
  const Params p(spec.params, {"kernel", "n", "d", "L", "k0"});
  const auto req = kernel_request(p, "perturbed-p");
  const auto ns = p.ints("n");
  const double l2 = static_cast<double>(req.L->norm2());
  const double d = req.d;
  std::vector<KernelParams> kps;
  for (Int n : ns) {
    kps.push_back(kernel_params(req, n));
    budget.charge(kernel_points(kps.back()), "compare-gg");
  }
  struct Row {
    std::optional<double> up_L, up_gg;
  };
  std::vector<Row> rows(kps.size());
  parallel_for(kps.size(), resolve_threads(spec), [&](std::size_t i) {
    const CoeffMap f = make_kernel(kps[i]);
    rows[i] = {up_directional(f, *req.L).up, up_gg(f).up};
  });
  ExperimentResult out;
  out.table.columns = {"n", "up_L", "up_gg", "up_L_scaled", "up_gg_scaled", "target_L", "target_gg"};
  for (std::size_t i = 0; i < kps.size(); ++i) {
    const double n = static_cast<double>(ns[i]);
    const double n4n = n * std::pow(4.0, n);
    std::optional<double> sL = rows[i].up_L, sG = rows[i].up_gg, tL, tG;
    if (req.family == KernelFamily::PerturbedP) {
      if (sG) *sG /= n4n;
      tL = 0.25;
      tG = d * l2 / 32;
    } else if (req.family == KernelFamily::PerturbedT) {
      if (sL) *sL /= n4n;
      if (sG) *sG /= n;
      const double L1 = static_cast<double>((*req.L)[0]);
      tL = L1 * L1 / (32 * l2 * l2);
      tG = (d - 1) / 4;
    }
    out.table.add_row({ns[i], opt_num(rows[i].up_L), opt_num(rows[i].up_gg), opt_num(sL), opt_num(sG), opt_num(tL),
                       opt_num(tG)});
  }
  out.summary = "compare-gg: " + kernel_name(req.family) + " rows=" + std::to_string(kps.size());
  return out;
}

SupportSet support_from_params(const Params& p, int d_hint) {
  if (p.has("support") && p.raw("support").is_array()) return support_from_json(p.raw("support"));
  const std::string kind = p.str("support", "box");
  if (kind == "box") return SupportSet::box(to_index(p.ints("N")));
  if (kind == "cross") return SupportSet::cross(p.integer("n"), static_cast<int>(p.integer("d", d_hint)));
  if (kind == "line") {
    const Direction L(to_index(p.ints("L")));
    const LatticeIndex k0 = p.has("k0") ? to_index(p.ints("k0")) : LatticeIndex::Zero(L.dim());
    return SupportSet::line(k0, L, p.integer("m"));
  }
  if (kind.size() > 5 && kind.substr(kind.size() - 5) == ".json") return support_from_json(read_json_file(kind));
  throw InvalidArgument("support must be box, cross, line, a JSON list or a .json file");
}

ExperimentResult run_min_var(const ExperimentSpec& spec, Budget& budget) {
  const Params p(spec.params, {"support", "mode", "N", "n", "d", "L", "k0", "m"});
  const std::string mode = p.str("mode", "directional");
  ExperimentResult out;
  if (mode == "gg-rect") {
    const auto Nv = p.ints("N");
    const LatticeIndex N = to_index(Nv);
    double pts = 1;
    for (Int n : Nv) pts *= 2.0 * static_cast<double>(n) + 1;
    budget.charge(pts, "min-var");
    const auto [poly, var] = min_var_gg_rect(N);
    const auto r = up_gg(poly);
    out.table.columns = {"N", "var_angular", "var_numeric", "up"};
    out.table.add_row({join_ints(Nv), num(var), num(r.var_angular), opt_num(r.up)});
    std::ostringstream ss;
    ss.precision(17);
    ss << "min-var: gg-rect var=" << var;
    out.summary = ss.str();
    return out;
  }
  if (mode != "directional") throw InvalidArgument("mode must be directional or gg-rect");
  const Direction L(to_index(p.ints("L")));
  const SupportSet S = support_from_params(p, L.dim());
  budget.charge(static_cast<double>(S.size()), "min-var");
  const auto sol = min_var_directional(S, L);
  const auto r = up_directional(sol.polynomial, L);
  const double t = std::tan(std::numbers::pi / static_cast<double>(sol.m0 + 2));
  out.table.columns = {"m0", "var_angular", "var_formula", "var_numeric", "up", "up_formula"};
  out.table.add_row({sol.m0, num(sol.var_angular), num(t * t), num(r.var_angular), opt_num(r.up), num(sol.up)});
  std::ostringstream ss;
  ss.precision(17);
  ss << "min-var: m0=" << sol.m0 << " var=" << sol.var_angular;
  out.summary = ss.str();
  return out;
}

const std::set<std::string> kFrameKeys{"A", "L", "eps", "levels", "frame"};

/// Frame parameters, with keys from an optional frame spec file as defaults.
json merged_frame_params(const json& params) {
  json merged = params;
  if (params.contains("frame") && !params.at("frame").is_null()) {
    const json file = read_json_file(params.at("frame").get<std::string>());
    if (!file.is_object()) throw InvalidArgument("frame spec file must hold a JSON object");
    for (const auto& [k, v] : file.items()) {
      if (!kFrameKeys.contains(k) || k == "frame") throw InvalidArgument("unknown key in frame spec file: " + k);
      if (!merged.contains(k)) merged[k] = v;
    }
    merged.erase("frame");
  }
  return merged;
}

PeriodicFrame frame_from_params(const Params& p) {
  const Direction L(to_index(p.ints("L")));
  IntMatrix A;
  if (p.has("A")) {
    A = p.matrix("A");
  } else if (L.dim() == 1) {
    A = IntMatrix::Constant(1, 1, 2);
  } else if (L.dim() == 2) {
    A.resize(2, 2);
    A << 1, 1, -1, 1;
  } else {
    throw InvalidArgument("A is required for d > 2");
  }
  return PeriodicFrame(DilationMatrix::validate(A), L);
}

std::vector<int> levels_from_params(const Params& p, std::vector<Int> fallback) {
  std::vector<int> out;
  for (Int j : p.ints("levels", std::move(fallback))) out.push_back(static_cast<int>(j));
  return out;
}

ExperimentResult run_frame_uep(const ExperimentSpec& spec, Budget& budget) {
  const json merged = merged_frame_params(spec.params);
  const Params p(merged, {"A", "L", "eps", "levels"});
  const PeriodicFrame frame = frame_from_params(p);
  const auto levels = levels_from_params(p, {2, 3, 4, 5, 6, 7, 8, 9, 10});
  for (int j : levels) {
    if (j < 1) throw InvalidArgument("UEP levels must be >= 1");
    budget.charge(4 * std::ldexp(1.0, j), "frame-uep");
  }
  std::vector<UepReport> reps(levels.size());
  parallel_for(levels.size(), resolve_threads(spec), [&](std::size_t i) { reps[i] = uep_identity_check(frame, levels[i]); });
  ExperimentResult out;
  out.table.columns = {"j", "points", "residual_norm", "residual_cross"};
  double worst = 0;
  for (const auto& r : reps) {
    out.table.add_row({r.j, r.points, num(r.residual_norm), num(r.residual_cross)});
    worst = std::max({worst, r.residual_norm, r.residual_cross});
  }
  std::ostringstream ss;
  ss.precision(3);
  ss << "frame-uep: levels=" << levels.size() << " max_residual=" << worst;
  out.summary = ss.str();
  return out;
}

ExperimentResult run_frame_cascade(const ExperimentSpec& spec, Budget& budget) {
  json merged = merged_frame_params(spec.params);
  const Params p(merged, {"A", "L", "eps", "levels", "J", "input", "radius"});
  const PeriodicFrame frame = frame_from_params(p);
  const int J = static_cast<int>(p.integer("J", 12));
  if (J < 0) throw InvalidArgument("J must be >= 0");
  CoeffMap f;
  if (p.has("input")) {
    f = coeff_map_from_json(read_json_file(p.str("input", "")));
  } else {
    f = random_real_trig_polynomial(frame.dim(), p.integer("radius", 4), spec.seed.value_or(0));
  }
  if (f.dim() != frame.dim()) throw DimensionMismatch(frame.dim(), f.dim());
  budget.charge(std::ldexp(1.0, J + 2) * static_cast<double>(f.size()), "frame-cascade");
  const auto rep = parseval_cascade_check(frame, f, J, spec.budget);
  ExperimentResult out;
  out.table.columns = {"j", "E", "W", "residual"};
  for (int j = 0; j <= J; ++j) {
    if (j < J) {
      out.table.add_row({j, num(rep.E[j]), num(rep.W[j]), num(rep.residual[j])});
    } else {
      out.table.add_row({j, num(rep.E[j]), nullptr, nullptr});
    }
  }
  std::ostringstream ss;
  ss.precision(17);
  ss << "norm2=" << rep.norm2 << " energy_gap=" << rep.energy_gap << " max_residual=" << rep.max_residual
     << " untranslated_reading=" << rep.untranslated_reading;
  out.table.comments.push_back(ss.str());
  out.summary = "frame-cascade: " + ss.str();
  return out;
}

double frame_window_points(const PeriodicFrame& frame, int j, double eps) {
  const double r = std::sqrt((j + 2) * std::log(1 / eps) / static_cast<double>(frame.direction().norm2())) + 2;
  return 2 * std::pow(2 * r + 1, frame.dim());
}

ExperimentResult run_frame_limits(const ExperimentSpec& spec, Budget& budget) {
  const json merged = merged_frame_params(spec.params);
  const Params p(merged, {"A", "L", "eps", "levels"});
  const PeriodicFrame frame = frame_from_params(p);
  const double eps = p.real("eps", 1e-8);
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("eps must lie in (0, 1)");
  const auto levels = levels_from_params(p, {50, 100, 200, 400});
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || (i > 0 && levels[i] <= levels[i - 1])) throw InvalidArgument("levels must be ascending");
    budget.charge(frame_window_points(frame, levels[i], eps), "frame-limits");
  }
  std::vector<LimitRow> rows(levels.size());
  parallel_for(levels.size(), resolve_threads(spec), [&](std::size_t i) { rows[i] = up_limit_row(frame, levels[i], eps); });
  ExperimentResult out;
  out.table.columns = {"j", "up_phi", "up_psi", "target_phi", "target_psi", "norm_phi", "norm_psi"};
  for (const auto& r : rows) {
    out.table.add_row({r.j, num(r.up_phi), num(r.up_psi), num(r.target_phi), num(r.target_psi), num(r.norm_phi),
                       num(r.norm_psi)});
  }
  std::ostringstream ss;
  ss.precision(6);
  if (!rows.empty()) {
    const auto& last = rows.back();
    ss << "frame-limits: j=" << last.j << " phi_rel_dev=" << (last.up_phi - last.target_phi) / last.target_phi
       << " psi_rel_dev=" << (last.up_psi - last.target_psi) / last.target_psi;
  }
  out.summary = ss.str();
  return out;
}

ExperimentResult run_reference_limits(const ExperimentSpec& spec, Budget& budget) {
  const json merged = merged_frame_params(spec.params);
  const Params p(merged, {"A", "L", "eps", "levels"});
  const PeriodicFrame frame = frame_from_params(p);
  const double eps = p.real("eps", 1e-10);
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("eps must lie in (0, 1)");
  const auto levels = levels_from_params(p, {50, 100, 200, 400});
  for (int j : levels) {
    if (j < 1) throw InvalidArgument("levels must be >= 1");
    budget.charge(frame_window_points(frame, j, eps), "reference-limits");
  }
  std::vector<std::pair<double, double>> vals(levels.size());
  parallel_for(levels.size(), resolve_threads(spec),
               [&](std::size_t i) { vals[i] = reference_limits_check(frame, levels[i], eps); });
  ExperimentResult out;
  out.table.columns = {"j", "up_xi0", "up_eta", "target_phi", "target_psi"};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.table.add_row({levels[i], num(vals[i].first), num(vals[i].second), num(0.25), num(psi_limit(frame.dim()))});
  }
  out.summary = "reference-limits: rows=" + std::to_string(levels.size());
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.format != "csv" && spec.format != "json") throw InvalidArgument("format must be csv or json");
  Budget budget(spec.budget);
  ExperimentResult out;
  try {
    if (spec.name == "up") {
      out = run_up(spec, budget);
    } else if (spec.name == "kernel-sweep") {
      out = run_kernel_sweep(spec, budget);
    } else if (spec.name == "compare-gg") {
      out = run_compare_gg(spec, budget);
    } else if (spec.name == "min-var") {
      out = run_min_var(spec, budget);
    } else if (spec.name == "frame-uep") {
      out = run_frame_uep(spec, budget);
    } else if (spec.name == "frame-cascade") {
      out = run_frame_cascade(spec, budget);
    } else if (spec.name == "frame-limits") {
      out = run_frame_limits(spec, budget);
    } else if (spec.name == "reference-limits") {
      out = run_reference_limits(spec, budget);
    } else {
      throw InvalidArgument("unknown experiment: " + spec.name);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed parameter: ") + e.what());
  }
  std::vector<std::string> header{std::string("dirup ") + kVersion, "spec: " + spec_echo(spec).dump()};
  out.table.comments.insert(out.table.comments.begin(), header.begin(), header.end());
  return out;
}

std::string render(const ExperimentSpec& spec, const Table& t) {
  return spec.format == "json" ? render_json(t) : render_csv(t);
}

int run(const ExperimentSpec& spec, std::ostream& err) {
  ExperimentResult result;
  try {
    result = run_experiment(spec);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return exit_code::budget;
  } catch (const InvalidArgument& e) {
    err << "invalid: " << e.what() << "\n";
    return exit_code::validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::failure;
  }
  const std::string text = render(spec, result.table);
  if (spec.output.empty() || spec.output == "-") {
    std::cout << text << std::flush;
  } else {
    std::ofstream out(spec.output, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
      err << "error: cannot write " << spec.output << "\n";
      return exit_code::failure;
    }
  }
  err << result.summary << "\n";
  return exit_code::ok;
}

}  // namespace dirup
