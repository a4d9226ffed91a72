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

#include "ddprobe/generators.hpp"
#include "ddprobe/qmath.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ddprobe {

//----------------------------------------------------------------------------
// Seeding
//----------------------------------------------------------------------------

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// child = splitmix64(splitmix64(splitmix64(master) ^ trajectory) ^ dt_index).
// Depends only on its arguments, so per-trajectory streams do not depend on
// scheduling.
inline constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t trajectory,
                                          std::uint64_t dt_index) {
  return splitmix64(splitmix64(splitmix64(master) ^ trajectory) ^ dt_index);
}

// Uniform integer in [0, n) by rejection on mt19937_64 output. Unlike
// std::uniform_int_distribution this is bit-identical across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

//----------------------------------------------------------------------------
// Pulse trajectories
//----------------------------------------------------------------------------

enum class SchemeKind { random, cyclic };

struct Scheme {
  SchemeKind kind = SchemeKind::random;
  std::uint64_t seed = 0;

  static Scheme random(std::uint64_t seed) { return {SchemeKind::random, seed}; }
  static Scheme cyclic() { return {SchemeKind::cyclic, 0}; }
};

struct PulseTrajectory {
  std::vector<int> pulse_indices;  // index 0 acts first
  double dt = 0.0;
  Scheme scheme;

  int size() const { return static_cast<int>(pulse_indices.size()); }
  double total_time() const { return dt * size(); }
};

inline PulseTrajectory sample_trajectory(const Scheme& scheme, int set_size, int n, double dt) {
  if (n < 1) throw std::invalid_argument("sample_trajectory: n must be >= 1");
  if (set_size < 1) throw std::invalid_argument("sample_trajectory: empty pulse set");
  if (!(dt > 0.0)) throw std::invalid_argument("sample_trajectory: dt must be positive");
  PulseTrajectory traj{std::vector<int>(n), dt, scheme};
  if (scheme.kind == SchemeKind::cyclic) {
    for (int i = 0; i < n; ++i) traj.pulse_indices[i] = i % set_size;
  } else {
    std::mt19937_64 rng(scheme.seed);
    for (int i = 0; i < n; ++i)
      traj.pulse_indices[i] = static_cast<int>(uniform_below(rng, set_size));
  }
  return traj;
}

inline PulseTrajectory sample_trajectory(const Scheme& scheme, const PulseSet& v, int n,
                                         double dt) {
  return sample_trajectory(scheme, v.size(), n, dt);
}

namespace detail {

inline void check_trajectory(const PulseTrajectory& traj, const PulseSet& v) {
  if (traj.pulse_indices.empty()) throw std::invalid_argument("empty pulse trajectory");
  for (int idx : traj.pulse_indices)
    if (idx < 0 || idx >= v.size())
      throw std::out_of_range("pulse index " + std::to_string(idx) + " outside pulse set of size " +
                              std::to_string(v.size()));
}

}  // namespace detail

// Number of steps N = t / dt; rejects dt that does not divide t.
inline int commensurate_steps(double total_time, double dt) {
  if (!(dt > 0.0) || !(total_time > 0.0))
    throw std::invalid_argument("commensurate_steps: times must be positive");
  const double ratio = total_time / dt;
  if (ratio > 1e9) throw std::invalid_argument("commensurate_steps: too many steps");
  const auto n = static_cast<long long>(std::llround(ratio));
  if (n < 1 || std::abs(static_cast<double>(n) * dt - total_time) > 1e-12 * total_time)
    throw std::invalid_argument("dt = " + std::to_string(dt) +
                                " does not divide the total time " + std::to_string(total_time));
  return static_cast<int>(n);
}

//----------------------------------------------------------------------------
// Evolution
//----------------------------------------------------------------------------

// Step superoperators of the time-ordered product
//   Lambda_t = prod_i Ad(v_i) exp(L_i) Ad(v_i^dag),   i = 1 rightmost,
// where L_i is the generator integrated over [(i-1) dt, i dt]. Built once per
// (generator, dt, N) and shared by all trajectories.
class IntrinsicPropagator {
 public:
  IntrinsicPropagator(const GKSLGenerator& l, const PulseSet& v, double dt, int n_steps)
      : v_(v), dt_(dt), n_(n_steps) {
    if (l.dim() != v.dim())
      throw DimensionError("evolve_intrinsic: generator dim " + std::to_string(l.dim()) +
                           " vs pulse set dim " + std::to_string(v.dim()));
    if (l.time_dependent()) {
      steps_.reserve(n_);
      for (int i = 0; i < n_; ++i)
        steps_.push_back(matrix_exp(l.integrated(i * dt, (i + 1) * dt)).matrix());
    } else {
      const Matrix e = matrix_exp(l.integrated(0.0, dt)).matrix();
      conj_.reserve(v.size());
      for (int k = 0; k < v.size(); ++k) {
        const Matrix& ad = v.conjugation(k).matrix();
        conj_.push_back(ad * e * ad.adjoint());
      }
    }
  }

  int steps() const { return n_; }
  double dt() const { return dt_; }

  Superoperator channel(const PulseTrajectory& traj) const {
    detail::check_trajectory(traj, v_);
    if (traj.size() != n_)
      throw std::invalid_argument("trajectory length differs from the prepared step count");
    const Eigen::Index d2 = static_cast<Eigen::Index>(v_.dim()) * v_.dim();
    Matrix acc = Matrix::Identity(d2, d2);
    Matrix tmp(d2, d2);
    for (int i = 0; i < n_; ++i) {
      const int k = traj.pulse_indices[i];
      if (steps_.empty()) {
        tmp.noalias() = conj_[k] * acc;
      } else {
        const Matrix& ad = v_.conjugation(k).matrix();
        Matrix step = ad * steps_[i] * ad.adjoint();
        tmp.noalias() = step * acc;
      }
      acc.swap(tmp);
    }
    return Superoperator(std::move(acc));
  }

 private:
  PulseSet v_;
  double dt_;
  int n_;
  std::vector<Matrix> conj_;   // time-independent: Ad(v) exp(dt L) Ad(v^dag) per v
  std::vector<Matrix> steps_;  // time-dependent: exp(int L) per step
};

inline Superoperator evolve_intrinsic(const GKSLGenerator& l, const PulseTrajectory& traj,
                                      const PulseSet& v) {
  detail::check_trajectory(traj, v);
  return IntrinsicPropagator(l, v, traj.dt, traj.size()).channel(traj);
}

// A Hamiltonian dilation: exact joint unitaries on S kron A for any segment.
template <typename M>
concept DilatedModel = requires(const M& m, double t0, double t1) {
  { m.system_dim() } -> std::convertible_to<int>;
  { m.ancilla_dim() } -> std::convertible_to<int>;
  { m.segment_unitary(t0, t1) } -> std::convertible_to<Operator>;
};

// Joint unitary prod_i (v_i kron 1) U(t_{i-1}, t_i) (v_i^dag kron 1).
template <DilatedModel M>
Operator dilated_unitary(const M& model, const PulseTrajectory& traj, const PulseSet& v) {
  detail::check_trajectory(traj, v);
  const int ds = model.system_dim();
  const int da = model.ancilla_dim();
  if (v.dim() != ds)
    throw DimensionError("evolve_dilated: pulse dim " + std::to_string(v.dim()) +
                         " vs system dim " + std::to_string(ds));
  std::vector<Matrix> lifted;
  lifted.reserve(v.size());
  for (const auto& p : v.elements()) lifted.push_back(kron(p.matrix(), Matrix::Identity(da, da)));

  const int n = traj.size();
  Matrix u = Matrix::Identity(ds * da, ds * da);
  Matrix tmp(ds * da, ds * da);
  for (int i = 0; i < n; ++i) {
    const Matrix& w = lifted[traj.pulse_indices[i]];
    const Operator seg = model.segment_unitary(i * traj.dt, (i + 1) * traj.dt);
    tmp.noalias() = w * seg.matrix() * w.adjoint() * u;
    u.swap(tmp);
  }
  return Operator(std::move(u));
}

template <DilatedModel M>
Superoperator evolve_dilated(const M& model, const PulseTrajectory& traj, const PulseSet& v,
                             const Operator& ancilla_state) {
  return channel_from_dilation(dilated_unitary(model, traj, v), ancilla_state,
                               model.system_dim());
}

//----------------------------------------------------------------------------
// Errors
//----------------------------------------------------------------------------

// tr{(1 - Lambda)^dag (1 - Lambda)} / d^2
inline double decoupling_error(const Superoperator& lambda) {
  const double d = lambda.dim();
  const Matrix diff = lambda.matrix() - Matrix::Identity(lambda.matrix().rows(), lambda.matrix().cols());
  return diff.squaredNorm() / (d * d);
}

// Fast-pulse limit exp(L_bar t).
inline double asymptotic_error(const Superoperator& l_bar, double t, int d) {
  if (l_bar.dim() != d)
    throw DimensionError("asymptotic_error: generator dim " + std::to_string(l_bar.dim()) +
                         " vs d = " + std::to_string(d));
  return decoupling_error(matrix_exp(cplx(t) * l_bar));
}

//----------------------------------------------------------------------------
// Trajectory-averaged error curves
//----------------------------------------------------------------------------

struct ErrorPoint {
  double dt = 0.0;
  int n_steps = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  int n_trajectories = 0;
};

struct ErrorCurve {
  std::string model_tag;
  std::vector<ErrorPoint> points;  // decreasing dt
  std::optional<double> asymptote;
};

// Per-dt evaluator produced by a model: the channel of one trajectory, plus an
// optional closed-form error that skips building the channel.
struct TrajectoryEvaluator {
  std::function<Superoperator(const PulseTrajectory&)> channel;
  std::function<double(const PulseTrajectory&)> error;
};

template <typename M>
concept TrajectoryModel = requires(const M& m, double dt, int n) {
  { m.total_time() } -> std::convertible_to<double>;
  { m.pulses() } -> std::convertible_to<const PulseSet&>;
  { m.prepare(dt, n) } -> std::convertible_to<TrajectoryEvaluator>;
  { m.asymptote() } -> std::convertible_to<std::optional<double>>;
  { m.tag() } -> std::convertible_to<std::string>;
};

enum class Averaging {
  per_trajectory_error,  // mean of epsilon over trajectories
  channel_mean,          // epsilon of the trajectory-mean channel (jackknife std error)
};

struct CurveOptions {
  SchemeKind scheme = SchemeKind::random;
  Averaging averaging = Averaging::per_trajectory_error;
  int threads = 1;
};

namespace detail {

// Runs body(k) for k in [0, n) on up to `threads` workers.
template <typename Body>
void parallel_for(int n, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int k = next++; k < n && !failed; k = next++) {
        try {
          body(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline ErrorPoint aggregate(const std::vector<double>& errors, double dt, int n_steps) {
  ErrorPoint p;
  p.dt = dt;
  p.n_steps = n_steps;
  p.n_trajectories = static_cast<int>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  p.mean_error = sum / errors.size();
  if (errors.size() > 1) {
    double ss = 0.0;
    for (double e : errors) ss += (e - p.mean_error) * (e - p.mean_error);
    p.std_error = std::sqrt(ss / (errors.size() - 1)) / std::sqrt(static_cast<double>(errors.size()));
  }
  return p;
}

inline ErrorPoint aggregate_channels(const std::vector<Matrix>& channels, double dt, int n_steps) {
  const auto n = static_cast<int>(channels.size());
  Matrix sum = Matrix::Zero(channels.front().rows(), channels.front().cols());
  for (const auto& c : channels) sum += c;
  ErrorPoint p;
  p.dt = dt;
  p.n_steps = n_steps;
  p.n_trajectories = n;
  p.mean_error = decoupling_error(Superoperator(sum / static_cast<double>(n)));
  if (n > 1) {
    std::vector<double> loo(n);
    double loo_mean = 0.0;
    for (int k = 0; k < n; ++k) {
      loo[k] = decoupling_error(Superoperator((sum - channels[k]) / static_cast<double>(n - 1)));
      loo_mean += loo[k];
    }
    loo_mean /= n;
    double ss = 0.0;
    for (double e : loo) ss += (e - loo_mean) * (e - loo_mean);
    p.std_error = std::sqrt(ss * (n - 1) / n);
  }
  return p;
}

}  // namespace detail

// For each dt (strictly decreasing, each dividing the model's total time), runs
// n_traj trajectories seeded by child_seed(master_seed, k, dt_index) and
// aggregates their decoupling errors in trajectory order.
template <TrajectoryModel M>
ErrorCurve mean_error_curve(const M& model, const std::vector<double>& dt_list, int n_traj,
                            std::uint64_t master_seed, const CurveOptions& opts = {}) {
  if (n_traj < 1) throw std::invalid_argument("mean_error_curve: n_traj must be >= 1");
  if (dt_list.empty()) throw std::invalid_argument("mean_error_curve: empty dt list");
  for (std::size_t i = 1; i < dt_list.size(); ++i)
    if (!(dt_list[i] < dt_list[i - 1]))
      throw std::invalid_argument("mean_error_curve: dt list must be strictly decreasing");

  const double t = model.total_time();
  const PulseSet& v = model.pulses();
  ErrorCurve curve{model.tag(), {}, model.asymptote()};
  curve.points.reserve(dt_list.size());

  for (std::size_t di = 0; di < dt_list.size(); ++di) {
    const double dt = dt_list[di];
    const int n = commensurate_steps(t, dt);
    const TrajectoryEvaluator eval = model.prepare(dt, n);
    auto make_traj = [&](int k) {
      const Scheme s = opts.scheme == SchemeKind::cyclic
                           ? Scheme::cyclic()
                           : Scheme::random(child_seed(master_seed, k, di));
      return sample_trajectory(s, v, n, dt);
    };

    if (opts.averaging == Averaging::per_trajectory_error) {
      std::vector<double> errors(n_traj);
      detail::parallel_for(n_traj, opts.threads, [&](int k) {
        const PulseTrajectory traj = make_traj(k);
        errors[k] = eval.error ? eval.error(traj) : decoupling_error(eval.channel(traj));
      });
      curve.points.push_back(detail::aggregate(errors, dt, n));
    } else {
      std::vector<Matrix> channels(n_traj);
      detail::parallel_for(n_traj, opts.threads,
                           [&](int k) { channels[k] = eval.channel(make_traj(k)).matrix(); });
      curve.points.push_back(detail::aggregate_channels(channels, dt, n));
    }
  }
  return curve;
}

}  // namespace ddprobe
