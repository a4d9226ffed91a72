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
#include "ddprobe/qmath.hpp"
#include "ddprobe/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddprobe {

enum class Variant { intrinsic, dilated };

inline const char* to_string(Variant v) { return v == Variant::intrinsic ? "intrinsic" : "dilated"; }

// Single-qubit dephasing channel: diagonal kept, coherences multiplied by lambda.
inline Superoperator dephasing_channel(double lambda) {
  Matrix s = Matrix::Identity(4, 4);
  s(1, 1) = lambda;  // vec index of |1><0|
  s(2, 2) = lambda;  // vec index of |0><1|
  return Superoperator(std::move(s));
}

// Decoupling error of dephasing_channel(lambda), (1 - lambda)^2 / 2.
inline double dephasing_error(double lambda) { return 0.5 * (1.0 - lambda) * (1.0 - lambda); }

// +1 where v sigma_z v^dag = sigma_z, -1 where it equals -sigma_z.
inline std::vector<int> pulse_signs(const PulseSet& v) {
  if (v.dim() != 2) throw DimensionError("pulse_signs: qubit pulse set required");
  const Matrix z = pauli::Z().matrix();
  std::vector<int> out;
  for (const auto& p : v.elements()) {
    const Matrix c = p.matrix() * z * p.matrix().adjoint();
    if ((c - z).norm() < kStructuralTol)
      out.push_back(+1);
    else if ((c + z).norm() < kStructuralTol)
      out.push_back(-1);
    else
      throw std::invalid_argument("pulse neither commutes nor anticommutes with sigma_z");
  }
  return out;
}

inline std::vector<int> sign_trajectory(const PulseTrajectory& traj, const PulseSet& v) {
  const std::vector<int> per_pulse = pulse_signs(v);
  std::vector<int> s;
  s.reserve(traj.pulse_indices.size());
  for (int idx : traj.pulse_indices) s.push_back(per_pulse.at(idx));
  return s;
}

//============================================================================
// Amplitude damping: intrinsic Lindbladian and exact two-qubit dilation
//============================================================================

// L(rho) = -gamma (s+ s- rho + rho s+ s- - 2 s- rho s+)
inline GKSLGenerator ad_lindbladian(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ad_lindbladian: gamma must be positive");
  return GKSLGenerator(Operator::zero(2), {{pauli::minus(), gamma}});
}

// Dilation coupling g(t) = gamma / sqrt(exp(2 gamma t) - 1); diverges at t = 0.
inline double ad_coupling(double t, double gamma) {
  return gamma / std::sqrt(std::expm1(2.0 * gamma * t));
}

// theta(t) = arcsin sqrt(1 - exp(-2 gamma t)) = int_0^t g.
inline double ad_theta(double t, double gamma) {
  return std::atan2(std::sqrt(-std::expm1(-2.0 * gamma * t)), std::exp(-gamma * t));
}

inline double ad_dilation_angle(double t0, double t1, double gamma) {
  if (t0 < 0.0 || t1 < 0.0) throw std::invalid_argument("ad_dilation_angle: negative time");
  if (t1 < t0) throw std::invalid_argument("ad_dilation_angle: t1 < t0");
  if (t0 == t1) return 0.0;
  return ad_theta(t1, gamma) - ad_theta(t0, gamma);
}

// exp(-i dtheta (s+ kron s- + s- kron s+)) on system kron ancilla, basis |sa>.
inline Operator ad_segment_unitary(double dtheta) {
  Matrix u = Matrix::Identity(4, 4);
  const double c = std::cos(dtheta);
  const double s = std::sin(dtheta);
  u(1, 1) = c;
  u(2, 2) = c;
  u(1, 2) = cplx(0.0, -s);
  u(2, 1) = cplx(0.0, -s);
  return Operator(std::move(u));
}

// Kraus pair {diag(1, e^{-gamma t}), sqrt(1 - e^{-2 gamma t}) s-}.
inline Superoperator ad_exact_channel(double t, double gamma) {
  if (t < 0.0) throw std::invalid_argument("ad_exact_channel: negative time");
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::exp(-gamma * t);
  const Operator k1 = cplx(std::sqrt(-std::expm1(-2.0 * gamma * t))) * pauli::minus();
  return superop_from_kraus({Operator(std::move(k0)), k1});
}

// Closed form of the fast-pulse limit for amplitude damping under the Pauli set.
inline double ad_asymptote_closed_form(double gamma_t) {
  const double x = std::exp(-gamma_t);
  return 0.25 * (3.0 - x * (4.0 - std::exp(-3.0 * gamma_t)));
}

struct AdDilation {
  double gamma;
  int system_dim() const { return 2; }
  int ancilla_dim() const { return 2; }
  Operator segment_unitary(double t0, double t1) const {
    return ad_segment_unitary(ad_dilation_angle(t0, t1, gamma));
  }
};

class AmplitudeDampingModel {
 public:
  AmplitudeDampingModel(double gamma, double total_time, Variant variant,
                        PulseSet pulses = pauli_set())
      : gamma_(gamma), t_(total_time), variant_(variant), pulses_(std::move(pulses)) {
    if (!(gamma_ > 0.0)) throw std::invalid_argument("AmplitudeDampingModel: gamma must be > 0");
    if (!(t_ > 0.0)) throw std::invalid_argument("AmplitudeDampingModel: total_time must be > 0");
    if (pulses_.dim() != 2) throw DimensionError("AmplitudeDampingModel: qubit pulses required");
  }

  double gamma() const { return gamma_; }
  double total_time() const { return t_; }
  Variant variant() const { return variant_; }
  const PulseSet& pulses() const { return pulses_; }
  std::string tag() const { return std::string("ad_") + to_string(variant_); }

  // Intrinsic: epsilon(exp(L_bar t)); dilated: 0 (perfect decoupling in the limit).
  std::optional<double> asymptote() const {
    if (variant_ == Variant::dilated) return 0.0;
    return asymptotic_error(average_generator(ad_lindbladian(gamma_), pulses_), t_, 2);
  }

  TrajectoryEvaluator prepare(double dt, int n) const {
    if (variant_ == Variant::intrinsic) {
      auto prop = std::make_shared<IntrinsicPropagator>(ad_lindbladian(gamma_), pulses_, dt, n);
      return {[prop](const PulseTrajectory& tr) { return prop->channel(tr); }, {}};
    }
    const AdDilation dil{gamma_};
    const PulseSet pulses = pulses_;
    return {[dil, pulses](const PulseTrajectory& tr) {
              return evolve_dilated(dil, tr, pulses, pauli::ket0());
            },
            {}};
  }

 private:
  double gamma_;
  double t_;
  Variant variant_;
  PulseSet pulses_;
};

//============================================================================
// Pure dephasing: spin-boson bath with an ohmic, sharply cut off spectrum
//============================================================================

struct SpinBosonParams {
  double kappa = 0.25;
  double omega_c = 100.0;
  double temperature = 1.0;  // hbar = k_B = 1; 0 means vacuum

  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("spin-boson: kappa must be > 0");
    if (!(omega_c > 0.0)) throw std::invalid_argument("spin-boson: omega_c must be > 0");
    if (!(temperature >= 0.0)) throw std::invalid_argument("spin-boson: temperature must be >= 0");
  }
};

// I(omega) = kappa omega / 4 for omega <= omega_c, else 0.
inline double spectral_density(double omega, const SpinBosonParams& p) {
  return (omega >= 0.0 && omega <= p.omega_c) ? 0.25 * p.kappa * omega : 0.0;
}

// I(omega) coth(omega / 2T), finite as omega -> 0 (limit kappa T / 2).
inline double bath_weight(double omega, const SpinBosonParams& p) {
  if (omega < 0.0 || omega > p.omega_c) return 0.0;
  if (p.temperature == 0.0) return 0.25 * p.kappa * omega;
  const double x = omega / (2.0 * p.temperature);
  if (x < 1e-6) return 0.25 * p.kappa * 2.0 * p.temperature * (1.0 + x * x / 3.0);
  return 0.25 * p.kappa * omega / std::tanh(x);
}

// Gamma(t) = int_0^t gamma(s) ds = 4 int_0^wc I coth (1 - cos w t) / w^2 dw.
inline double pd_decoherence_integral(double t, const SpinBosonParams& p,
                                      const QuadratureOptions& opts = {}) {
  if (t < 0.0) throw std::invalid_argument("pd_decoherence_integral: negative time");
  p.validate();
  if (t == 0.0) return 0.0;
  auto f = [&](double w) {
    // (1 - cos wt) / w^2 = (t^2 / 2) sinc^2(wt / 2)
    const double h = 0.5 * w * t;
    const double sinc = h < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
    return 4.0 * bath_weight(w, p) * 0.5 * t * t * sinc * sinc;
  };
  return integrate(f, 0.0, p.omega_c, opts).value;
}

// gamma(t) = 4 int_0^wc I coth sin(w t) / w dw.
inline double pd_damping_rate(double t, const SpinBosonParams& p,
                              const QuadratureOptions& opts = {}) {
  if (t < 0.0) throw std::invalid_argument("pd_damping_rate: negative time");
  p.validate();
  if (t == 0.0) return 0.0;
  auto f = [&](double w) {
    const double x = w * t;
    const double sinc = x < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return 4.0 * bath_weight(w, p) * t * sinc;
  };
  QuadratureOptions o = opts;
  o.abs_tol = std::max(o.abs_tol, 1e-12);
  return integrate(f, 0.0, p.omega_c, o).value;
}

// L_PD(t) = -(gamma(t)/4) [s_z, [s_z, .]]: jump s_z at rate 1/4 scaled by gamma(t).
inline GKSLGenerator pd_lindbladian(const SpinBosonParams& p) {
  p.validate();
  RateProfile profile{
      [p](double t) { return pd_damping_rate(t, p); },
      [p](double t0, double t1) {
        return pd_decoherence_integral(t1, p) - pd_decoherence_integral(t0, p);
      }};
  return GKSLGenerator(Operator::zero(2), {{pauli::Z(), 0.25}}, std::move(profile));
}

// |F(w)|^2 for the piecewise-constant switching function s_k on segments of
// length dt: F(w) = (2 sin(w dt / 2) / w) e^{i w dt/2} sum_k s_k e^{i w (k-1) dt}.
inline double filter_squared(double omega, const std::vector<int>& signs, double dt) {
  const double h = 0.5 * omega * dt;
  const double sinc = h < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  const double seg = dt * sinc;  // 2 sin(w dt/2) / w
  const cplx z = std::polar(1.0, omega * dt);
  cplx acc = 0.0;
  for (auto it = signs.rbegin(); it != signs.rend(); ++it) acc = acc * z + static_cast<double>(*it);
  return seg * seg * std::norm(acc);
}

// Gamma[s] = 2 int_0^wc I(w) coth(w/2T) |F(w)|^2 dw; equals Gamma(t) for s = +1.
inline double filter_decoherence(const std::vector<int>& signs, double dt,
                                 const SpinBosonParams& p, const QuadratureOptions& opts = {}) {
  if (signs.empty()) throw std::invalid_argument("filter_decoherence: empty sign sequence");
  if (!(dt > 0.0)) throw std::invalid_argument("filter_decoherence: dt must be positive");
  p.validate();
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("filter_decoherence: signs must be +-1");
  auto f = [&](double w) { return 2.0 * bath_weight(w, p) * filter_squared(w, signs, dt); };
  return integrate(f, 0.0, p.omega_c, opts).value;
}

class SpinBosonPDModel {
 public:
  SpinBosonPDModel(SpinBosonParams params, double total_time, Variant variant,
                   PulseSet pulses = pauli_set())
      : p_(params), t_(total_time), variant_(variant), pulses_(std::move(pulses)) {
    p_.validate();
    if (!(t_ > 0.0)) throw std::invalid_argument("SpinBosonPDModel: total_time must be > 0");
    signs_ = pulse_signs(pulses_);
    free_gamma_ = pd_decoherence_integral(t_, p_);
  }

  const SpinBosonParams& params() const { return p_; }
  double total_time() const { return t_; }
  Variant variant() const { return variant_; }
  const PulseSet& pulses() const { return pulses_; }
  std::string tag() const { return std::string("pd_") + to_string(variant_); }

  // Gamma(t) of free evolution.
  double free_decoherence() const { return free_gamma_; }
  double intrinsic_error() const { return dephasing_error(std::exp(-free_gamma_)); }

  // Intrinsic line is pulse independent; the dilated model decouples fully.
  std::optional<double> asymptote() const {
    if (variant_ == Variant::dilated) return 0.0;
    return intrinsic_error();
  }

  double decoherence(const PulseTrajectory& traj) const {
    if (variant_ == Variant::intrinsic) return free_gamma_;
    std::vector<int> s;
    s.reserve(traj.pulse_indices.size());
    for (int idx : traj.pulse_indices) s.push_back(signs_.at(idx));
    return filter_decoherence(s, traj.dt, p_);
  }

  TrajectoryEvaluator prepare(double, int) const {
    return {[this](const PulseTrajectory& tr) { return dephasing_channel(std::exp(-decoherence(tr))); },
            [this](const PulseTrajectory& tr) { return dephasing_error(std::exp(-decoherence(tr))); }};
  }

 private:
  SpinBosonParams p_;
  double t_;
  Variant variant_;
  PulseSet pulses_;
  std::vector<int> signs_;
  double free_gamma_ = 0.0;
};

inline Superoperator pd_trajectory_channel(const PulseTrajectory& traj, const PulseSet& v,
                                           const SpinBosonPDModel& model) {
  if (model.variant() == Variant::intrinsic)
    return dephasing_channel(std::exp(-model.free_decoherence()));
  return dephasing_channel(
      std::exp(-filter_decoherence(sign_trajectory(traj, v), traj.dt, model.params())));
}

//============================================================================
// Shallow pocket: qubit coupled to a particle on a line, H = (g/2) s_z x,
// bath in the Cauchy state <x|psi> = sqrt(gamma/pi) / (x + i gamma).
//============================================================================

class ShallowPocketModel {
 public:
  ShallowPocketModel(double g, double gamma_cauchy, double total_time, PulseSet pulses,
                     std::string label = "shallow_pocket")
      : g_(g), gc_(gamma_cauchy), t_(total_time), pulses_(std::move(pulses)), label_(std::move(label)) {
    if (!(g_ > 0.0)) throw std::invalid_argument("ShallowPocketModel: g must be > 0");
    if (!(gc_ > 0.0)) throw std::invalid_argument("ShallowPocketModel: gamma_cauchy must be > 0");
    if (!(t_ > 0.0)) throw std::invalid_argument("ShallowPocketModel: total_time must be > 0");
    signs_ = pulse_signs(pulses_);
  }

  double g() const { return g_; }
  double gamma_cauchy() const { return gc_; }
  double total_time() const { return t_; }
  const PulseSet& pulses() const { return pulses_; }
  std::string tag() const { return label_; }

  // Net signed time T_net = dt sum_k s_k.
  double net_time(const PulseTrajectory& traj) const {
    long long sum = 0;
    for (int idx : traj.pulse_indices) sum += signs_.at(idx);
    return traj.dt * static_cast<double>(sum);
  }

  // E[exp(i g x T)] over the Cauchy density = exp(-g gamma |T|).
  double coherence(const PulseTrajectory& traj) const {
    return std::exp(-g_ * gc_ * std::abs(net_time(traj)));
  }

  std::optional<double> asymptote() const {
    for (int s : signs_)
      if (s < 0) return 0.0;
    return dephasing_error(std::exp(-g_ * gc_ * t_));
  }

  TrajectoryEvaluator prepare(double, int) const {
    return {[this](const PulseTrajectory& tr) { return dephasing_channel(coherence(tr)); },
            [this](const PulseTrajectory& tr) { return dephasing_error(coherence(tr)); }};
  }

 private:
  double g_;
  double gc_;
  double t_;
  PulseSet pulses_;
  std::string label_;
  std::vector<int> signs_;
};

inline Superoperator shallow_pocket_channel(const PulseTrajectory& traj, const PulseSet& v,
                                            const ShallowPocketModel& model) {
  long long sum = 0;
  for (int s : sign_trajectory(traj, v)) sum += s;
  const double t_net = traj.dt * static_cast<double>(sum);
  return dephasing_channel(std::exp(-model.g() * model.gamma_cauchy() * std::abs(t_net)));
}

//============================================================================
// Mixture: intrinsic Lindbladian on the system plus the amplitude-damping
// dilation on system kron ancilla, integrated with midpoint-frozen
// substeps (exact dilation angle per substep).
//============================================================================

class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double estimate)
      : NumericalError(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

class MixtureModel {
 public:
  MixtureModel(GKSLGenerator intrinsic, double extrinsic_gamma, int substeps_per_pulse,
               double total_time, PulseSet pulses = pauli_set(), double tolerance = 1e-6)
      : intrinsic_(std::move(intrinsic)),
        gamma_ext_(extrinsic_gamma),
        substeps_(substeps_per_pulse),
        t_(total_time),
        pulses_(std::move(pulses)),
        tol_(tolerance) {
    if (intrinsic_.dim() != 2) throw DimensionError("MixtureModel: qubit generator required");
    if (intrinsic_.time_dependent())
      throw std::invalid_argument("MixtureModel: time-dependent intrinsic part not supported");
    if (!(gamma_ext_ >= 0.0)) throw std::invalid_argument("MixtureModel: extrinsic gamma < 0");
    if (substeps_ < 1) throw std::invalid_argument("MixtureModel: substeps_per_pulse must be >= 1");
    if (!(t_ > 0.0)) throw std::invalid_argument("MixtureModel: total_time must be > 0");
    if (pulses_.dim() != 2) throw DimensionError("MixtureModel: qubit pulses required");

    const Matrix id2 = Matrix::Identity(2, 2);
    std::vector<JumpTerm> lifted;
    for (const auto& j : intrinsic_.jumps()) lifted.push_back({Operator(kron(j.op.matrix(), id2)), j.rate});
    const GKSLGenerator joint(Operator(kron(intrinsic_.hamiltonian().matrix(), id2)), std::move(lifted));
    lint_ = (joint.hamiltonian_part() + joint.dissipator()).matrix();

    const Matrix coupling = kron(pauli::plus().matrix(), pauli::minus().matrix()) +
                            kron(pauli::minus().matrix(), pauli::plus().matrix());
    k_ = GKSLGenerator::hamiltonian_only(Operator(coupling)).hamiltonian_part().matrix();
    commutator_norm_ = (k_ * lint_ - lint_ * k_).norm();

    for (const auto& p : pulses_.elements())
      ad_.push_back(Superoperator::conjugation(Operator(kron(p.matrix(), id2))).matrix());
  }

  const GKSLGenerator& intrinsic() const { return intrinsic_; }
  double extrinsic_gamma() const { return gamma_ext_; }
  int substeps_per_pulse() const { return substeps_; }
  double total_time() const { return t_; }
  double tolerance() const { return tol_; }
  const PulseSet& pulses() const { return pulses_; }
  std::string tag() const { return "mixture"; }

  MixtureModel with_substeps(int m) const {
    return MixtureModel(intrinsic_, gamma_ext_, m, t_, pulses_, tol_);
  }

  std::optional<double> asymptote() const {
    return asymptotic_error(average_generator(intrinsic_, pulses_), t_, 2);
  }

  // Leading (second-order Magnus) error of midpoint freezing summed over all
  // substeps. On a substep the exponent is exact to first order; the residual
  // is (1/2) [K, L] J with J = delta (theta(a) + theta(b)) - 2 int_a^b theta.
  double error_estimate(double dt, int n) const {
    if (gamma_ext_ == 0.0 || commutator_norm_ == 0.0) return 0.0;
    const double delta = dt / substeps_;
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < substeps_; ++j) {
        const double a = i * dt + j * delta;
        const double b = a + delta;
        total += std::abs(delta * (theta(a) + theta(b)) - 2.0 * theta_integral(a, b));
      }
    return 0.5 * commutator_norm_ * total;
  }

  // Joint 16x16 step superoperators P_i over each pulse interval.
  std::vector<Matrix> step_propagators(double dt, int n) const {
    const double est = error_estimate(dt, n);
    if (est > tol_)
      throw IntegrationError("mixture integration error estimate " + std::to_string(est) +
                                 " exceeds tolerance " + std::to_string(tol_) + " with " +
                                 std::to_string(substeps_) + " substeps per pulse",
                             est);
    const double delta = dt / substeps_;
    std::vector<Matrix> steps;
    steps.reserve(n);
    for (int i = 0; i < n; ++i) {
      Matrix p = Matrix::Identity(16, 16);
      for (int j = 0; j < substeps_; ++j) {
        const double a = i * dt + j * delta;
        const double dtheta = gamma_ext_ > 0.0 ? ad_dilation_angle(a, a + delta, gamma_ext_) : 0.0;
        p = matrix_exp(Matrix(dtheta * k_ + delta * lint_)) * p;
      }
      steps.push_back(std::move(p));
    }
    return steps;
  }

  Superoperator channel(const std::vector<Matrix>& steps, const PulseTrajectory& traj) const {
    detail::check_trajectory(traj, pulses_);
    if (traj.size() != static_cast<int>(steps.size()))
      throw std::invalid_argument("mixture: trajectory length differs from prepared steps");
    // Columns: vec(E_ij kron |0><0|) for the four system matrix units.
    Matrix m(16, 4);
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        m.col(j * 2 + i) = vec(kron(Operator::unit(2, i, j), pauli::ket0()));
    Matrix tmp(16, 4);
    for (int i = 0; i < traj.size(); ++i) {
      const Matrix& ad = ad_[traj.pulse_indices[i]];
      tmp.noalias() = ad.adjoint() * m;
      m.noalias() = steps[i] * tmp;
      tmp.noalias() = ad * m;
      m.swap(tmp);
    }
    Matrix s(4, 4);
    for (int c = 0; c < 4; ++c) s.col(c) = vec(partial_trace_b(unvec(m.col(c), 4), 2, 2));
    return Superoperator(std::move(s));
  }

  TrajectoryEvaluator prepare(double dt, int n) const {
    auto steps = std::make_shared<const std::vector<Matrix>>(step_propagators(dt, n));
    return {[this, steps](const PulseTrajectory& tr) { return channel(*steps, tr); }, {}};
  }

 private:
  double theta(double t) const { return ad_theta(t, gamma_ext_); }

  double theta_integral(double a, double b) const {
    using boost::math::quadrature::gauss;
    if (a == 0.0) {
      // s = u^2 removes the sqrt(s) behaviour of theta at the origin.
      return gauss<double, 15>::integrate(
          [&](double u) { return 2.0 * u * theta(u * u); }, 0.0, std::sqrt(b));
    }
    return gauss<double, 15>::integrate([&](double s) { return theta(s); }, a, b);
  }

  GKSLGenerator intrinsic_;
  double gamma_ext_;
  int substeps_;
  double t_;
  PulseSet pulses_;
  double tol_;
  Matrix lint_;
  Matrix k_;
  double commutator_norm_ = 0.0;
  std::vector<Matrix> ad_;
};

inline Superoperator mixture_channel(const MixtureModel& model, const PulseTrajectory& traj,
                                     const PulseSet& v) {
  const MixtureModel m(model.intrinsic(), model.extrinsic_gamma(), model.substeps_per_pulse(),
                       model.total_time(), v, model.tolerance());
  return m.channel(m.step_propagators(traj.dt, traj.size()), traj);
}

}  // namespace ddprobe
