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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "ddprobe/ddprobe.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace ddprobe;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  notes.push_back(std::string(ok ? "ok    " : "FAIL  ") + buf);
  pass = pass && ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, "exception: %s", e.what());
  }
  const double s = seconds_since(t0);
  o.check(s < budget_s, "runtime %.2f s (limit %.0f s)", s, budget_s);
  for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
  std::printf("criterion %d [%s]: %s\n", id, title, o.pass ? "PASS" : "FAIL");
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

const ErrorPoint& at_k(const ErrorCurve& c, const std::vector<int>& ks, int k) {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] == k) return c.points.at(i);
  throw std::out_of_range("exponent not in sweep");
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GKSLGenerator random_generator(std::mt19937_64& rng, bool dissipative) {
  std::uniform_real_distribution<double> rate(0.01, 3.0);
  const oracle::Mat h0 = oracle::random_matrix(rng, 2);
  const Operator h(0.5 * (h0 + h0.adjoint()));
  if (!dissipative) return GKSLGenerator::hamiltonian_only(h);
  std::vector<JumpTerm> jumps;
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n; ++k) {
    oracle::Mat a = oracle::random_matrix(rng, 2);
    a -= (a.trace() / 2.0) * oracle::Mat::Identity(2, 2);
    jumps.push_back({Operator(a), rate(rng)});
  }
  return GKSLGenerator(h, std::move(jumps));
}

}  // namespace

int main() {
  std::printf("ddprobe acceptance run\n");

  run(1, "fast-pulse amplitude-damping limit", 1.0, [](Outcome& o) {
    const Superoperator lbar1 = average_generator(ad_lindbladian(1.0), pauli_set());
    // independent construction of the averaged generator, entry by entry
    const oracle::Mat sm = oracle::sigma_minus(), sp = sm.adjoint();
    const oracle::Mat lref = oracle::superop(
        [&](const oracle::Mat& r) -> oracle::Mat { return -(r - sm * r * sp - sp * r * sm); }, 2);
    double worst = 0.0, worst_taylor = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double gt = 0.5 * i;
      const double got = asymptotic_error(lbar1, gt, 2);
      worst = std::max(worst, std::abs(got - oracle::eq5(gt)));
      const oracle::Mat e = oracle::expm_taylor(gt * lref) - oracle::Mat::Identity(4, 4);
      worst_taylor = std::max(worst_taylor, std::abs(e.squaredNorm() / 4.0 - oracle::eq5(gt)));
    }
    o.check(worst < 1e-10, "max |asymptotic_error - closed form| over 20 gt in (0,10]: %.2e (tol 1e-10)", worst);
    o.check(worst_taylor < 1e-10, "closed form vs Taylor exponential of the written-out generator: %.2e",
            worst_taylor);
    const double at20 = asymptotic_error(lbar1, 20.0, 2);
    o.check(std::abs(at20 - 0.75) < 1e-6, "gt = 20: %.12f, |.-3/4| = %.2e (tol 1e-6)", at20,
            std::abs(at20 - 0.75));
  });

  run(2, "intrinsic dephasing error", 1.0, [](Outcome& o) {
    // jump sigma_z at rate 1/4: integrated exponent Gamma * D with D the dissipator
    const GKSLGenerator l(Operator::zero(2), {{pauli::Z(), 0.25}});
    const Superoperator d = l.dissipator();
    double worst_analytic = 0.0, worst_exp = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double g = 0.3 * i;
      const double ref = oracle::eq7(g);
      worst_analytic = std::max(worst_analytic, std::abs(dephasing_error(std::exp(-g)) - ref));
      worst_exp = std::max(worst_exp, std::abs(decoupling_error(matrix_exp(cplx(g) * d)) - ref));
    }
    o.check(worst_analytic < 1e-12, "analytic path, max deviation over 20 values: %.2e (tol 1e-12)",
            worst_analytic);
    o.check(worst_exp < 1e-12, "superoperator-exponential path, max deviation: %.2e (tol 1e-12)", worst_exp);
  });

  run(3, "dilation exactness", 1.0, [](Outcome& o) {
    for (double gt : {0.1, 1.0, 3.0}) {
      const double gamma = 1.0;
      const Superoperator dil =
          channel_from_dilation(ad_segment_unitary(ad_theta(gt, gamma)), pauli::ket0(), 2);
      const Superoperator kraus = ad_exact_channel(gt, gamma);
      const Superoperator gen = matrix_exp(cplx(gt) * ad_lindbladian(gamma).superoperator());
      const oracle::Mat ode = oracle::expm_taylor(
          gt * oracle::superop([&](const oracle::Mat& r) { return oracle::ad_rhs(r, gamma); }, 2));
      const double a = frobenius(dil - kraus), b = frobenius(dil - gen);
      const double c = (dil.matrix() - ode).norm();
      o.check(a < 1e-12 && b < 1e-12 && c < 1e-12,
              "gt = %.1f: |dil - kraus| %.1e, |dil - exp(tL)| %.1e, |dil - taylor| %.1e (tol 1e-12)", gt, a,
              b, c);
    }
  });

  run(4, "fig1 trend", 120.0, [](Outcome& o) {
    ExperimentConfig c;  // gamma = 1, t = 1, 100 trajectories, fixed master seed
    const ExperimentResult r = run_fig1(c);
    const auto ks = r.exponents;
    const double target = oracle::eq5(1.0);
    const ErrorPoint& pi = at_k(r.curve("ad_intrinsic"), ks, 14);
    const double dev = std::abs(pi.mean_error - target);
    o.check(dev <= 3.0 * pi.std_error,
            "intrinsic k=14: mean %.8f, closed form %.8f, |diff| %.2e vs 3 se %.2e (%.1f se)",
            pi.mean_error, target, dev, 3.0 * pi.std_error, dev / pi.std_error);
    const ErrorPoint& pd = at_k(r.curve("ad_dilated"), ks, 14);
    o.check(pd.mean_error < 0.02, "dilated k=14: mean %.3e (< 0.02)", pd.mean_error);
    for (int k : {4, 8}) {
      const ErrorPoint& a = at_k(r.curve("ad_dilated"), ks, k);
      const ErrorPoint& b = at_k(r.curve("ad_dilated"), ks, k + 4);
      const double slack = 3.0 * std::hypot(a.std_error, b.std_error);
      o.check(b.mean_error < a.mean_error + slack, "dilated k=%d -> k=%d: %.3e -> %.3e (slack %.1e)", k,
              k + 4, a.mean_error, b.mean_error, slack);
    }
  });

  run(5, "fig2 features", 600.0, [](Outcome& o) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::fig2;  // kappa 0.25, omega_c 100, T 1, t 0.5, 100 trajectories
    const ExperimentResult r = run_fig2(c);
    const auto ks = r.exponents;
    const double g_lib = *r.scalar("free_decoherence_integral");
    const double g_gsl = oracle::gamma_qag(0.25, 100.0, 1.0, 0.5);
    const double line = *r.scalar("intrinsic_error");
    const double line_gsl = oracle::eq7(g_gsl);
    o.check(std::abs(line - line_gsl) <= 1e-6 * line_gsl,
            "(a) intrinsic line %.12f vs GSL-quadrature line %.12f, rel diff %.1e (tol 1e-6)", line, line_gsl,
            std::abs(line - line_gsl) / line_gsl);
    o.check(std::abs(g_lib - g_gsl) <= 1e-6 * g_gsl, "(a) Gamma(t): %.12f vs %.12f", g_lib, g_gsl);
    for (const auto& p : r.curve("pd_intrinsic").points)
      if (p.mean_error != r.curve("pd_intrinsic").points.front().mean_error)
        o.check(false, "(a) intrinsic curve not constant across dt");
    // exceedance must be larger than the quadrature tolerance to count
    for (int k = 0; k <= 3; ++k) {
      const ErrorPoint& p = at_k(r.curve("pd_dilated"), ks, k);
      const double margin = p.mean_error - line;
      o.check(margin > 1e-6 * line, "(b) k=%d (dt = %.4f = %.1f/omega_c): dilated %.6f vs line %.6f, margin %+.2e",
              k, p.dt, p.dt * 100.0, p.mean_error, line, margin);
    }
    const ErrorPoint& p12 = at_k(r.curve("pd_dilated"), ks, 12);
    o.check(p12.mean_error < line && p12.mean_error < 0.05, "(c) k=12: dilated %.3e (< line %.4f, < 0.05)",
            p12.mean_error, line);
  });

  run(6, "shallow pocket", 30.0, [](Outcome& o) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::shallow_pocket;  // g gamma = 1, t = 1
    const ExperimentResult r = run_shallow_pocket(c);
    double worst_z2 = 0.0;
    for (const auto& p : r.curve("shallow_pocket_z2_cyclic").points)
      if (p.n_steps % 2 == 0) worst_z2 = std::max(worst_z2, p.mean_error);
    const ShallowPocketModel z2(1.0, 1.0, 1.0, z2_set());
    for (int n = 2; n <= 1000; n += 2)
      worst_z2 = std::max(worst_z2, decoupling_error(shallow_pocket_channel(
                                        sample_trajectory(Scheme::cyclic(), 2, n, 1.0 / n), z2_set(), z2)));
    o.check(worst_z2 <= 1e-12, "cyclic Z2, even N: max error %.1e (tol 1e-12)", worst_z2);
    double worst_free = 0.0;
    for (const auto& p : r.curve("shallow_pocket_free").points)
      worst_free = std::max(worst_free, std::abs(p.mean_error - oracle::eq7(1.0)));
    o.check(worst_free <= 1e-12, "free decay vs (1 - e^-1)^2 / 2: max deviation %.1e (tol 1e-12)", worst_free);
    std::vector<double> x, y;
    for (int k = 8; k <= 14; ++k) {
      const ErrorPoint& p = at_k(r.curve("shallow_pocket_random"), r.exponents, k);
      x.push_back(p.dt);
      y.push_back(p.mean_error);
    }
    const double slope = loglog_slope(x, y);
    o.check(std::abs(slope - 1.0) <= 0.15, "random Pauli log-log slope over k = 8..14: %.3f (1 +- 0.15)", slope);
  });

  run(7, "no-decoupling property", 5.0, [](Outcome& o) {
    std::mt19937_64 rng(20260101);
    double min_diss = 1e300, max_ham = 0.0;
    for (int i = 0; i < 50; ++i)
      min_diss = std::min(min_diss, dissipative_residual(random_generator(rng, true), pauli_set()));
    for (int i = 0; i < 50; ++i)
      max_ham = std::max(max_ham, dissipative_residual(random_generator(rng, false), pauli_set()));
    o.check(min_diss > 1e-8, "50 dissipative generators: min residual %.3e (> 1e-8)", min_diss);
    o.check(max_ham < 1e-10, "50 Hamiltonian generators: max residual %.1e (< 1e-10)", max_ham);
  });

  run(8, "structural suite", 300.0, [](Outcome& o) {
    // CPTP checks over every model's trajectory channels
    int checked = 0;
    double worst_tp = 0.0, worst_eig = 0.0;
    auto record = [&](const Superoperator& s) {
      const ChannelCheck cc = s.check_channel(1e-9);
      worst_tp = std::max(worst_tp, cc.trace_preservation_error);
      worst_eig = std::min(worst_eig, cc.min_choi_eigenvalue);
      ++checked;
      return cc.ok;
    };
    bool all_ok = true;
    const SpinBosonParams sb{0.25, 100.0, 1.0};
    const AmplitudeDampingModel adi(1.0, 1.0, Variant::intrinsic), add(1.0, 1.0, Variant::dilated);
    const SpinBosonPDModel pdi(sb, 0.5, Variant::intrinsic), pdd(sb, 0.5, Variant::dilated);
    const ShallowPocketModel sp(1.0, 1.0, 1.0, pauli_set());
    const MixtureModel mix(ad_lindbladian(0.5), 0.5, 1, 1.0);
    for (int k : {0, 2, 5, 8}) {
      const int n = 1 << k;
      for (int rep = 0; rep < 5; ++rep) {
        const auto tr1 = sample_trajectory(Scheme::random(child_seed(1, rep, k)), 4, n, 1.0 / n);
        const auto tr2 = sample_trajectory(Scheme::random(child_seed(2, rep, k)), 4, n, 0.5 / n);
        all_ok &= record(adi.prepare(1.0 / n, n).channel(tr1));
        all_ok &= record(add.prepare(1.0 / n, n).channel(tr1));
        all_ok &= record(pd_trajectory_channel(tr2, pauli_set(), pdi));
        all_ok &= record(pd_trajectory_channel(tr2, pauli_set(), pdd));
        all_ok &= record(shallow_pocket_channel(tr1, pauli_set(), sp));
        const AdaptiveMixture am(mix);
        all_ok &= record(am.prepare(1.0 / n, n).channel(tr1));
      }
    }
    all_ok &= record(evolve_intrinsic(pd_lindbladian(sb), sample_trajectory(Scheme::random(3), 4, 8, 0.5 / 8),
                                      pauli_set()));
    o.check(all_ok, "%d channels CPTP at tol 1e-9 (worst trace error %.1e, min Choi eigenvalue %.1e)", checked,
            worst_tp, worst_eig);
    o.check(verify_decoupling_set(pauli_set(), 1e-10), "averaging identity, Pauli set (tol 1e-10)");
    o.check(verify_decoupling_set(heisenberg_weyl_set(3), 1e-10),
            "averaging identity, d = 3 Heisenberg-Weyl set (tol 1e-10)");

    for (ExperimentKind kind : {ExperimentKind::fig1, ExperimentKind::fig2, ExperimentKind::shallow_pocket,
                                ExperimentKind::mixture}) {
      ExperimentConfig c;
      c.experiment = kind;
      if (kind == ExperimentKind::fig2 || kind == ExperimentKind::mixture)
        c.dt_exponents = std::vector<int>{0, 2, 4, 6, 8};
      c.n_trajectories = 20;
      c.threads = 1;
      const std::string a = to_csv(run_experiment(c));
      const std::string a2 = to_csv(run_experiment(c));
      c.threads = 4;
      const std::string b = to_csv(run_experiment(c));
      c.threads = 7;
      const std::string d = to_csv(run_experiment(c));
      o.check(a == a2 && a == b && a == d, "%s: CSV byte-identical for re-run and threads 1/4/7 (%zu bytes)",
              to_string(kind), a.size());
    }
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
