// Copyright 2026 The ddprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ddprobe/decoupling.hpp"
#include "ddprobe/generators.hpp"
#include "ddprobe/models.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ddprobe {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { fig1, fig2, shallow_pocket, mixture, custom };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fig1: return "fig1";
    case ExperimentKind::fig2: return "fig2";
    case ExperimentKind::shallow_pocket: return "shallow-pocket";
    case ExperimentKind::mixture: return "mixture";
    case ExperimentKind::custom: return "custom";
  }
  return "?";
}

inline ExperimentKind parse_experiment(const std::string& s) {
  if (s == "fig1") return ExperimentKind::fig1;
  if (s == "fig2") return ExperimentKind::fig2;
  if (s == "shallow-pocket" || s == "shallow_pocket") return ExperimentKind::shallow_pocket;
  if (s == "mixture") return ExperimentKind::mixture;
  if (s == "custom") return ExperimentKind::custom;
  throw ConfigError("unknown experiment '" + s + "'");
}

// Unset optionals take per-experiment defaults (see resolved()).
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::fig1;

  // amplitude damping and mixture
  double gamma = 1.0;
  std::optional<double> total_time;

  // spin-boson dephasing
  double kappa = 0.25;
  double omega_c = 100.0;
  std::optional<double> temperature;  // default omega_c / 100

  // shallow pocket
  double g = 1.0;
  double gamma_cauchy = 1.0;

  // mixture: share of gamma assigned to the intrinsic Lindbladian
  double intrinsic_fraction = 0.5;
  int substeps_per_pulse = 1;
  double integration_tolerance = 1e-6;

  // custom experiment: model variants to run
  std::vector<std::string> variants;

  std::string scheme = "random";         // random | cyclic (custom only)
  std::string averaging = "trajectory";  // trajectory | channel

  std::optional<std::vector<int>> dt_exponents;
  int n_trajectories = 100;
  std::uint64_t master_seed = 20260101;
  std::string output_path = "results.csv";
  bool emit_svg = false;
  int threads = 0;  // 0 = hardware concurrency

  double resolved_total_time() const {
    if (total_time) return *total_time;
    switch (experiment) {
      case ExperimentKind::fig2: return 50.0 / omega_c;
      case ExperimentKind::shallow_pocket: return 1.0;
      default: return 1.0 / gamma;
    }
  }
  double resolved_temperature() const { return temperature ? *temperature : omega_c / 100.0; }
  std::vector<int> resolved_exponents() const {
    if (dt_exponents) return *dt_exponents;
    const int kmax = (experiment == ExperimentKind::fig2 || experiment == ExperimentKind::mixture) ? 12 : 14;
    std::vector<int> ks(kmax + 1);
    for (int k = 0; k <= kmax; ++k) ks[k] = k;
    return ks;
  }
  int resolved_threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  void validate() const {
    if (n_trajectories < 1) throw ConfigError("n_trajectories must be >= 1");
    const auto ks = resolved_exponents();
    if (ks.empty()) throw ConfigError("dt_exponents must be nonempty");
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (ks[i] < 0 || ks[i] > 30) throw ConfigError("dt_exponents must lie in [0, 30]");
      if (i > 0 && ks[i] <= ks[i - 1]) throw ConfigError("dt_exponents must be strictly increasing");
    }
    if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
    if (!(resolved_total_time() > 0.0)) throw ConfigError("total_time must be > 0");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be > 0");
    if (!(omega_c > 0.0)) throw ConfigError("omega_c must be > 0");
    if (!(resolved_temperature() >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (!(g > 0.0)) throw ConfigError("g must be > 0");
    if (!(gamma_cauchy > 0.0)) throw ConfigError("gamma_cauchy must be > 0");
    if (!(intrinsic_fraction >= 0.0 && intrinsic_fraction <= 1.0))
      throw ConfigError("intrinsic_fraction must lie in [0, 1]");
    if (substeps_per_pulse < 1) throw ConfigError("substeps_per_pulse must be >= 1");
    if (!(integration_tolerance > 0.0)) throw ConfigError("integration_tolerance must be > 0");
    if (scheme != "random" && scheme != "cyclic") throw ConfigError("scheme must be random or cyclic");
    if (averaging != "trajectory" && averaging != "channel")
      throw ConfigError("averaging must be trajectory or channel");
    if (experiment == ExperimentKind::custom && variants.empty())
      throw ConfigError("custom experiment needs a nonempty 'variants' list");
  }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<int> exponents;
  std::vector<ErrorCurve> curves;
  std::vector<std::pair<std::string, double>> scalars;
  double wall_seconds = 0.0;

  std::optional<double> scalar(const std::string& name) const {
    for (const auto& [k, v] : scalars)
      if (k == name) return v;
    return std::nullopt;
  }
  const ErrorCurve& curve(const std::string& tag) const {
    for (const auto& c : curves)
      if (c.model_tag == tag) return c;
    throw std::out_of_range("no curve tagged '" + tag + "'");
  }
};

//----------------------------------------------------------------------------
// JSON configuration (strict: unknown keys are rejected)
//----------------------------------------------------------------------------

inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         ExperimentConfig base = ExperimentConfig{}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = std::move(base);
  static const std::set<std::string> known = {
      "experiment",   "gamma",        "total_time",         "kappa",
      "omega_c",      "temperature",  "g",                  "gamma_cauchy",
      "intrinsic_fraction", "substeps_per_pulse", "integration_tolerance", "variants",
      "scheme",       "averaging",    "dt_exponents",       "n_trajectories",
      "master_seed",  "output_path",  "emit_svg",           "threads"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

  try {
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("total_time")) c.total_time = j.at("total_time").get<double>();
    if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
    if (j.contains("omega_c")) c.omega_c = j.at("omega_c").get<double>();
    if (j.contains("temperature")) c.temperature = j.at("temperature").get<double>();
    if (j.contains("g")) c.g = j.at("g").get<double>();
    if (j.contains("gamma_cauchy")) c.gamma_cauchy = j.at("gamma_cauchy").get<double>();
    if (j.contains("intrinsic_fraction")) c.intrinsic_fraction = j.at("intrinsic_fraction").get<double>();
    if (j.contains("substeps_per_pulse")) c.substeps_per_pulse = j.at("substeps_per_pulse").get<int>();
    if (j.contains("integration_tolerance"))
      c.integration_tolerance = j.at("integration_tolerance").get<double>();
    if (j.contains("variants")) c.variants = j.at("variants").get<std::vector<std::string>>();
    if (j.contains("scheme")) c.scheme = j.at("scheme").get<std::string>();
    if (j.contains("averaging")) c.averaging = j.at("averaging").get<std::string>();
    if (j.contains("dt_exponents")) c.dt_exponents = j.at("dt_exponents").get<std::vector<int>>();
    if (j.contains("n_trajectories")) c.n_trajectories = j.at("n_trajectories").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("emit_svg")) c.emit_svg = j.at("emit_svg").get<bool>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = ExperimentConfig{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse config file '" + path + "': " + e.what());
  }
  return config_from_json(j, std::move(base));
}

//----------------------------------------------------------------------------
// Runners
//----------------------------------------------------------------------------

namespace detail {

inline CurveOptions curve_options(const ExperimentConfig& c, SchemeKind scheme) {
  CurveOptions o;
  o.scheme = scheme;
  o.averaging = c.averaging == "channel" ? Averaging::channel_mean : Averaging::per_trajectory_error;
  o.threads = c.resolved_threads();
  return o;
}

inline SchemeKind config_scheme(const ExperimentConfig& c) {
  return c.scheme == "cyclic" ? SchemeKind::cyclic : SchemeKind::random;
}

inline std::vector<double> dt_list(double t, const std::vector<int>& ks) {
  std::vector<double> dts;
  dts.reserve(ks.size());
  for (int k : ks) dts.push_back(std::ldexp(t, -k));
  return dts;
}

template <TrajectoryModel M>
ErrorCurve run_curve(const M& model, const ExperimentConfig& c, const std::vector<int>& ks,
                     SchemeKind scheme) {
  return mean_error_curve(model, dt_list(model.total_time(), ks), c.n_trajectories,
                          c.master_seed, curve_options(c, scheme));
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// Mixture model whose substep count is doubled per dt until the integration
// error estimate meets the tolerance.
class AdaptiveMixture {
 public:
  AdaptiveMixture(MixtureModel base, long long max_total_substeps = 1LL << 24)
      : base_(std::move(base)), max_total_(max_total_substeps) {}

  double total_time() const { return base_.total_time(); }
  const PulseSet& pulses() const { return base_.pulses(); }
  std::optional<double> asymptote() const { return base_.asymptote(); }
  std::string tag() const { return base_.tag(); }

  int substeps_for(double dt, int n) const {
    int m = base_.substeps_per_pulse();
    while (base_.with_substeps(m).error_estimate(dt, n) > base_.tolerance()) {
      if (static_cast<long long>(m) * 2 * n > max_total_)
        throw IntegrationError("mixture: cannot meet integration tolerance within the substep budget",
                               base_.with_substeps(m).error_estimate(dt, n));
      m *= 2;
    }
    return m;
  }

  TrajectoryEvaluator prepare(double dt, int n) const {
    auto model = std::make_shared<const MixtureModel>(base_.with_substeps(substeps_for(dt, n)));
    auto steps = std::make_shared<const std::vector<Matrix>>(model->step_propagators(dt, n));
    return {[model, steps](const PulseTrajectory& tr) { return model->channel(*steps, tr); }, {}};
  }

 private:
  MixtureModel base_;
  long long max_total_;
};

inline GKSLGenerator ad_generator_or_zero(double gamma) {
  if (gamma > 0.0) return ad_lindbladian(gamma);
  return GKSLGenerator(Operator::zero(2), {{pauli::minus(), 0.0}});
}

inline ExperimentResult run_fig1(const ExperimentConfig& c) {
  c.validate();
  detail::Stopwatch sw;
  ExperimentResult r{c, c.resolved_exponents(), {}, {}, 0.0};
  const double t = c.resolved_total_time();
  const AmplitudeDampingModel intrinsic(c.gamma, t, Variant::intrinsic);
  const AmplitudeDampingModel dilated(c.gamma, t, Variant::dilated);
  r.curves.push_back(detail::run_curve(intrinsic, c, r.exponents, SchemeKind::random));
  r.curves.push_back(detail::run_curve(dilated, c, r.exponents, SchemeKind::random));
  r.scalars.emplace_back("closed_form_asymptote", ad_asymptote_closed_form(c.gamma * t));
  r.wall_seconds = sw.seconds();
  return r;
}

inline ExperimentResult run_fig2(const ExperimentConfig& c) {
  c.validate();
  detail::Stopwatch sw;
  ExperimentResult r{c, c.resolved_exponents(), {}, {}, 0.0};
  const double t = c.resolved_total_time();
  const SpinBosonParams p{c.kappa, c.omega_c, c.resolved_temperature()};
  const SpinBosonPDModel intrinsic(p, t, Variant::intrinsic);
  const SpinBosonPDModel dilated(p, t, Variant::dilated);
  r.curves.push_back(detail::run_curve(intrinsic, c, r.exponents, SchemeKind::random));
  r.curves.push_back(detail::run_curve(dilated, c, r.exponents, SchemeKind::random));
  r.scalars.emplace_back("free_decoherence_integral", intrinsic.free_decoherence());
  r.scalars.emplace_back("intrinsic_error", intrinsic.intrinsic_error());
  r.wall_seconds = sw.seconds();
  return r;
}

inline ExperimentResult run_shallow_pocket(const ExperimentConfig& c) {
  c.validate();
  detail::Stopwatch sw;
  ExperimentResult r{c, c.resolved_exponents(), {}, {}, 0.0};
  const double t = c.resolved_total_time();
  const ShallowPocketModel free_decay(c.g, c.gamma_cauchy, t, PulseSet({pauli::I()}),
                                      "shallow_pocket_free");
  const ShallowPocketModel z2(c.g, c.gamma_cauchy, t, z2_set(), "shallow_pocket_z2_cyclic");
  const ShallowPocketModel random(c.g, c.gamma_cauchy, t, pauli_set(), "shallow_pocket_random");
  r.curves.push_back(detail::run_curve(free_decay, c, r.exponents, SchemeKind::cyclic));
  r.curves.push_back(detail::run_curve(z2, c, r.exponents, SchemeKind::cyclic));
  r.curves.push_back(detail::run_curve(random, c, r.exponents, SchemeKind::random));
  r.scalars.emplace_back("free_decay_error", dephasing_error(std::exp(-c.g * c.gamma_cauchy * t)));
  r.wall_seconds = sw.seconds();
  return r;
}

inline ExperimentResult run_mixture(const ExperimentConfig& c) {
  c.validate();
  detail::Stopwatch sw;
  ExperimentResult r{c, c.resolved_exponents(), {}, {}, 0.0};
  const double t = c.resolved_total_time();
  const double g_int = c.intrinsic_fraction * c.gamma;
  const double g_ext = (1.0 - c.intrinsic_fraction) * c.gamma;
  const GKSLGenerator l_int = ad_generator_or_zero(g_int);
  const PulseSet v = pauli_set();
  const AdaptiveMixture model(
      MixtureModel(l_int, g_ext, c.substeps_per_pulse, t, v, c.integration_tolerance));
  r.curves.push_back(detail::run_curve(model, c, r.exponents, SchemeKind::random));

  const double norm_bar = frobenius(average_generator(l_int, v));
  const double norm_int = frobenius(l_int.hamiltonian_part() + l_int.dissipator());
  r.scalars.emplace_back("norm_lbar_int", norm_bar);
  r.scalars.emplace_back("norm_l_int", norm_int);
  r.scalars.emplace_back("norm_bound_holds", norm_bar <= norm_int + 1e-12 ? 1.0 : 0.0);
  if (!(norm_bar <= norm_int + 1e-12))
    throw NumericalError("mixture: averaged-generator norm bound violated");
  for (int k : r.exponents) {
    const double dt = std::ldexp(t, -k);
    r.scalars.emplace_back("substeps_k" + std::to_string(k),
                           model.substeps_for(dt, commensurate_steps(t, dt)));
  }
  r.wall_seconds = sw.seconds();
  return r;
}

inline ExperimentResult run_custom(const ExperimentConfig& c) {
  c.validate();
  detail::Stopwatch sw;
  ExperimentResult r{c, c.resolved_exponents(), {}, {}, 0.0};
  const double t = c.resolved_total_time();
  const SchemeKind scheme = detail::config_scheme(c);
  const SpinBosonParams p{c.kappa, c.omega_c, c.resolved_temperature()};
  for (const auto& name : c.variants) {
    if (name == "ad_intrinsic") {
      r.curves.push_back(detail::run_curve(AmplitudeDampingModel(c.gamma, t, Variant::intrinsic), c, r.exponents, scheme));
    } else if (name == "ad_dilated") {
      r.curves.push_back(detail::run_curve(AmplitudeDampingModel(c.gamma, t, Variant::dilated), c, r.exponents, scheme));
    } else if (name == "pd_intrinsic") {
      r.curves.push_back(detail::run_curve(SpinBosonPDModel(p, t, Variant::intrinsic), c, r.exponents, scheme));
    } else if (name == "pd_dilated") {
      r.curves.push_back(detail::run_curve(SpinBosonPDModel(p, t, Variant::dilated), c, r.exponents, scheme));
    } else if (name == "shallow_pocket_free") {
      r.curves.push_back(detail::run_curve(
          ShallowPocketModel(c.g, c.gamma_cauchy, t, PulseSet({pauli::I()}), name), c, r.exponents, scheme));
    } else if (name == "shallow_pocket_z2") {
      r.curves.push_back(detail::run_curve(ShallowPocketModel(c.g, c.gamma_cauchy, t, z2_set(), name), c, r.exponents, scheme));
    } else if (name == "shallow_pocket_pauli") {
      r.curves.push_back(detail::run_curve(ShallowPocketModel(c.g, c.gamma_cauchy, t, pauli_set(), name), c, r.exponents, scheme));
    } else if (name == "mixture") {
      const AdaptiveMixture model(MixtureModel(ad_generator_or_zero(c.intrinsic_fraction * c.gamma),
                                               (1.0 - c.intrinsic_fraction) * c.gamma,
                                               c.substeps_per_pulse, t, pauli_set(),
                                               c.integration_tolerance));
      r.curves.push_back(detail::run_curve(model, c, r.exponents, scheme));
    } else {
      throw ConfigError("unknown variant '" + name + "'");
    }
  }
  r.wall_seconds = sw.seconds();
  return r;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case ExperimentKind::fig1: return run_fig1(c);
    case ExperimentKind::fig2: return run_fig2(c);
    case ExperimentKind::shallow_pocket: return run_shallow_pocket(c);
    case ExperimentKind::mixture: return run_mixture(c);
    case ExperimentKind::custom: return run_custom(c);
  }
  throw ConfigError("unknown experiment");
}

//----------------------------------------------------------------------------
// CSV
//----------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "experiment,model_variant,dt,k,n_trajectories,mean_error,std_error,asymptote";

namespace detail {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

inline int exponent_of(int n_steps) {
  int k = 0;
  while ((1 << k) < n_steps) ++k;
  return (1 << k) == n_steps ? k : -1;
}

}  // namespace detail

inline std::string to_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& c : r.curves)
    for (const auto& p : c.points) {
      out << to_string(r.config.experiment) << ',' << c.model_tag << ',' << detail::fmt_double(p.dt)
          << ',' << detail::exponent_of(p.n_steps) << ',' << p.n_trajectories << ','
          << detail::fmt_double(p.mean_error) << ',' << detail::fmt_double(p.std_error) << ','
          << (c.asymptote ? detail::fmt_double(*c.asymptote) : std::string()) << '\n';
    }
  return out.str();
}

inline void write_csv(const ExperimentResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << to_csv(r);
  out.flush();
  if (!out) throw OutputError("write to '" + path + "' failed");
}

struct CsvRow {
  std::string experiment;
  std::string model_variant;
  double dt = 0.0;
  int k = 0;
  int n_trajectories = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  std::optional<double> asymptote;
};

inline std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw OutputError("CSV header mismatch");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw OutputError("CSV row has " + std::to_string(f.size()) + " fields");
    CsvRow r;
    r.experiment = f[0];
    r.model_variant = f[1];
    r.dt = std::strtod(f[2].c_str(), nullptr);
    r.k = std::stoi(f[3]);
    r.n_trajectories = std::stoi(f[4]);
    r.mean_error = std::strtod(f[5].c_str(), nullptr);
    r.std_error = std::strtod(f[6].c_str(), nullptr);
    if (!f[7].empty()) r.asymptote = std::strtod(f[7].c_str(), nullptr);
    rows.push_back(std::move(r));
  }
  return rows;
}

// Groups parsed rows back into curves, preserving row order.
inline std::vector<ErrorCurve> curves_from_csv(const std::string& text) {
  std::vector<ErrorCurve> curves;
  for (const auto& row : parse_csv(text)) {
    auto it = std::find_if(curves.begin(), curves.end(),
                           [&](const ErrorCurve& c) { return c.model_tag == row.model_variant; });
    if (it == curves.end()) {
      curves.push_back({row.model_variant, {}, row.asymptote});
      it = std::prev(curves.end());
    }
    it->points.push_back({row.dt, row.k >= 0 ? (1 << row.k) : 0, row.mean_error, row.std_error,
                          row.n_trajectories});
  }
  return curves;
}

//----------------------------------------------------------------------------
// SVG: one polyline per curve on a log2(dt) axis, dashed asymptotes.
//----------------------------------------------------------------------------

inline std::string to_svg(const ExperimentResult& r) {
  const double w = 720, h = 480, ml = 70, mr = 180, mt = 30, mb = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymax = 0.0;
  for (const auto& c : r.curves) {
    for (const auto& p : c.points) {
      xmin = std::min(xmin, std::log2(p.dt));
      xmax = std::max(xmax, std::log2(p.dt));
      ymax = std::max(ymax, p.mean_error + p.std_error);
    }
    if (c.asymptote) ymax = std::max(ymax, *c.asymptote);
  }
  if (!(xmax > xmin)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.05;
  // dt decreases to the right.
  auto X = [&](double dt) { return ml + (xmax - std::log2(dt)) / (xmax - xmin) * (w - ml - mr); };
  auto Y = [&](double e) { return h - mb - e / ymax * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
    << "\" text-anchor=\"middle\" font-size=\"13\">log2(dt), decreasing</text>\n";
  s << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
    << "\" font-size=\"13\" transform=\"rotate(-90 16 " << (mt + h - mb) / 2
    << ")\" text-anchor=\"middle\">mean decoupling error</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double e = ymax * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", e);
    s << "<text x=\"" << ml - 6 << "\" y=\"" << Y(e) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << label << "</text>\n";
  }
  for (std::size_t ci = 0; ci < r.curves.size(); ++ci) {
    const auto& c = r.curves[ci];
    const char* col = colors[ci % 6];
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : c.points) s << X(p.dt) << ',' << Y(p.mean_error) << ' ';
    s << "\"/>\n";
    for (const auto& p : c.points)
      s << "<circle cx=\"" << X(p.dt) << "\" cy=\"" << Y(p.mean_error) << "\" r=\"2.5\" fill=\"" << col
        << "\"/>\n";
    if (c.asymptote)
      s << "<line x1=\"" << ml << "\" y1=\"" << Y(*c.asymptote) << "\" x2=\"" << w - mr << "\" y2=\""
        << Y(*c.asymptote) << "\" stroke=\"" << col << "\" stroke-dasharray=\"6,4\"/>\n";
    s << "<text x=\"" << w - mr + 10 << "\" y=\"" << mt + 18 * (ci + 1) << "\" font-size=\"12\" fill=\""
      << col << "\">" << c.model_tag << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void write_svg(const ExperimentResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << to_svg(r);
  if (!out) throw OutputError("write to '" + path + "' failed");
}

}  // namespace ddprobe
