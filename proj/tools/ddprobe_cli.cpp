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

// Batch driver: ddprobe <experiment> [--config FILE] [overrides...]

#include "ddprobe/ddprobe.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Overrides {
  std::string config;
  std::optional<int> trajectories;
  std::optional<std::uint64_t> seed;
  std::vector<int> exponents;
  std::optional<std::string> out;
  bool svg = false;
  std::optional<int> threads;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("-n,--trajectories", o.trajectories, "trajectories per dt");
  sub->add_option("-s,--seed", o.seed, "master seed");
  sub->add_option("-k,--dt-exponents", o.exponents, "comma-separated k list, dt = t / 2^k")->delimiter(',');
  sub->add_option("-o,--out", o.out, "CSV output path");
  sub->add_flag("--svg", o.svg, "also write an SVG plot next to the CSV");
  sub->add_option("-j,--threads", o.threads, "worker threads (0 = all cores)");
}

ddprobe::ExperimentConfig resolve(ddprobe::ExperimentKind kind, const Overrides& o) {
  ddprobe::ExperimentConfig base;
  base.experiment = kind;
  ddprobe::ExperimentConfig c = o.config.empty() ? base : ddprobe::load_config(o.config, base);
  if (c.experiment != kind)
    throw ddprobe::ConfigError(std::string("config names experiment '") + to_string(c.experiment) +
                               "' but the subcommand is '" + to_string(kind) + "'");
  if (o.trajectories) c.n_trajectories = *o.trajectories;
  if (o.seed) c.master_seed = *o.seed;
  if (!o.exponents.empty()) c.dt_exponents = o.exponents;
  if (o.out) c.output_path = *o.out;
  if (o.svg) c.emit_svg = true;
  if (o.threads) c.threads = *o.threads;
  c.validate();
  return c;
}

std::string svg_path(const std::string& csv) {
  std::filesystem::path p(csv);
  p.replace_extension(".svg");
  return p.string();
}

void summarize(const ddprobe::ExperimentResult& r) {
  const auto& c = r.config;
  std::printf("%s: %zu dt values, %d trajectories, seed %llu, %.2f s\n", to_string(c.experiment),
              r.exponents.size(), c.n_trajectories, static_cast<unsigned long long>(c.master_seed),
              r.wall_seconds);
  for (const auto& [name, v] : r.scalars) std::printf("  %-28s %.10g\n", name.c_str(), v);
  for (const auto& curve : r.curves) {
    const auto& first = curve.points.front();
    const auto& last = curve.points.back();
    std::printf("  %-28s k=%d: %.6g +- %.2g   k=%d: %.6g +- %.2g\n", curve.model_tag.c_str(),
                r.exponents.front(), first.mean_error, first.std_error, r.exponents.back(), last.mean_error,
                last.std_error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical-decoupling error sweeps for intrinsic and extrinsic decoherence"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, ddprobe::ExperimentKind>> kinds = {
      {"fig1", ddprobe::ExperimentKind::fig1},
      {"fig2", ddprobe::ExperimentKind::fig2},
      {"shallow-pocket", ddprobe::ExperimentKind::shallow_pocket},
      {"mixture", ddprobe::ExperimentKind::mixture},
      {"custom", ddprobe::ExperimentKind::custom}};
  const std::vector<std::string> help = {
      "amplitude damping: Lindbladian vs dilated qubit-qubit model",
      "spin-boson pure dephasing: Lindbladian vs bath filter function",
      "Cauchy-distributed classical field with free, Z2 and Pauli pulses",
      "joint intrinsic and extrinsic amplitude damping",
      "any model and variants selected from the config file"};

  Overrides o;
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    subs.push_back(app.add_subcommand(kinds[i].first, help[i]));
    add_common(subs.back(), o);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    ddprobe::ExperimentKind kind = ddprobe::ExperimentKind::fig1;
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) kind = kinds[i].second;
    const ddprobe::ExperimentConfig c = resolve(kind, o);
    const ddprobe::ExperimentResult r = ddprobe::run_experiment(c);
    ddprobe::write_csv(r, c.output_path);
    std::printf("wrote %s\n", c.output_path.c_str());
    if (c.emit_svg) {
      const std::string svg = svg_path(c.output_path);
      ddprobe::write_svg(r, svg);
      std::printf("wrote %s\n", svg.c_str());
    }
    summarize(r);
  } catch (const ddprobe::ConfigError& e) {
    std::cerr << "ddprobe: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ddprobe: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
