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

#include <gtest/gtest.h>

#include "ddprobe/decoupling.hpp"
#include "ddprobe/models.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

namespace ddprobe {
namespace {

using oracle::Mat;

TEST(Seeding, ChildSeedsDistinct) {
  EXPECT_NE(child_seed(1, 0, 0), child_seed(1, 1, 0));
  EXPECT_NE(child_seed(1, 0, 0), child_seed(1, 0, 1));
  EXPECT_NE(child_seed(1, 0, 0), child_seed(2, 0, 0));
  static_assert(child_seed(7, 3, 2) == child_seed(7, 3, 2));
}

TEST(Sampling, Cyclic) {
  const PulseTrajectory t = sample_trajectory(Scheme::cyclic(), 4, 8, 0.1);
  EXPECT_EQ(t.pulse_indices, (std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3}));
  EXPECT_NEAR(t.total_time(), 0.8, 1e-15);
}

TEST(Sampling, RandomIsDeterministic) {
  const auto a = sample_trajectory(Scheme::random(99), 4, 1000, 1e-3);
  const auto b = sample_trajectory(Scheme::random(99), 4, 1000, 1e-3);
  const auto c = sample_trajectory(Scheme::random(100), 4, 1000, 1e-3);
  EXPECT_EQ(a.pulse_indices, b.pulse_indices);
  EXPECT_NE(a.pulse_indices, c.pulse_indices);
}

TEST(Sampling, RandomFrequencies) {
  const int n = 100000;
  const auto t = sample_trajectory(Scheme::random(12345), 4, n, 1e-5);
  std::vector<int> counts(4, 0);
  for (int i : t.pulse_indices) ++counts.at(i);
  const double sd = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_LT(std::abs(c - n / 4.0), 4.0 * sd);
}

TEST(Sampling, Errors) {
  EXPECT_THROW(sample_trajectory(Scheme::cyclic(), 4, 0, 0.1), std::invalid_argument);
  EXPECT_THROW(sample_trajectory(Scheme::cyclic(), 4, 2, 0.0), std::invalid_argument);
}

TEST(Commensurate, AcceptsAndRejects) {
  EXPECT_EQ(commensurate_steps(1.0, 1.0 / 1024), 1024);
  EXPECT_EQ(commensurate_steps(0.5, 0.5 / 4096), 4096);
  EXPECT_THROW(commensurate_steps(1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(commensurate_steps(1.0, -0.1), std::invalid_argument);
}

TEST(EvolveIntrinsic, SingleIdentityStep) {
  const GKSLGenerator l = ad_lindbladian(0.7);
  const PulseTrajectory t{{0}, 0.4, Scheme::cyclic()};
  const Superoperator s = evolve_intrinsic(l, t, pauli_set());
  const Mat lref = oracle::superop([](const Mat& r) { return oracle::ad_rhs(r, 0.7); }, 2);
  EXPECT_LT((s.matrix() - oracle::expm_taylor(0.4 * lref)).norm(), 1e-13);
}

TEST(EvolveIntrinsic, TimeOrderingFirstIndexActsFirst) {
  const GKSLGenerator l = ad_lindbladian(0.5);
  const DecouplingSet v = pauli_set();
  const PulseTrajectory t{{1, 2}, 0.3, Scheme::cyclic()};
  const Matrix e = matrix_exp(l.integrated(0.0, 0.3)).matrix();
  const Matrix a1 = v.conjugation(1).matrix(), a2 = v.conjugation(2).matrix();
  const Matrix expect = (a2 * e * a2.adjoint()) * (a1 * e * a1.adjoint());
  EXPECT_LT((evolve_intrinsic(l, t, v).matrix() - expect).norm(), 1e-14);
}

TEST(EvolveIntrinsic, DephasingIgnoresPulses) {
  const SpinBosonParams p{0.25, 100.0, 1.0};
  const GKSLGenerator l = pd_lindbladian(p);
  const double t = 0.5;
  const int n = 16;
  const auto traj = sample_trajectory(Scheme::random(5), 4, n, t / n);
  const Superoperator s = evolve_intrinsic(l, traj, pauli_set());
  const double big_gamma = pd_decoherence_integral(t, p);
  EXPECT_LT((s.matrix() - dephasing_channel(std::exp(-big_gamma)).matrix()).norm(), 1e-12);
}

TEST(EvolveIntrinsic, HamiltonianIsDecoupled) {
  // sigma_z alone cancels exactly over each Pauli cycle.
  const GKSLGenerator lz = GKSLGenerator::hamiltonian_only(pauli::Z());
  const auto cyc = sample_trajectory(Scheme::cyclic(), 4, 16, 1.0 / 16);
  EXPECT_LT(frobenius(evolve_intrinsic(lz, cyc, pauli_set()) - Superoperator::identity(2)), 1e-12);

  // A generic Hamiltonian leaves a residual that shrinks with dt.
  const GKSLGenerator l = GKSLGenerator::hamiltonian_only(pauli::X() + pauli::Y() + pauli::Z());
  double prev = 1e300;
  for (int k = 1; k <= 5; ++k) {
    const int n = 1 << (2 * k);
    const auto traj = sample_trajectory(Scheme::cyclic(), 4, n, 1.0 / n);
    const double dist = frobenius(evolve_intrinsic(l, traj, pauli_set()) - Superoperator::identity(2));
    EXPECT_LT(dist, prev) << k;
    prev = dist;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(EvolveIntrinsic, Errors) {
  const PulseTrajectory bad{{0, 4}, 0.1, Scheme::cyclic()};
  EXPECT_THROW(evolve_intrinsic(ad_lindbladian(1.0), bad, pauli_set()), std::out_of_range);
  const PulseTrajectory ok{{0, 1}, 0.1, Scheme::cyclic()};
  EXPECT_THROW(evolve_intrinsic(ad_lindbladian(1.0), ok, heisenberg_weyl_set(3)), DimensionError);
}

TEST(EvolveDilated, NoPulsesGivesExactChannel) {
  const double gamma = 1.3, t = 0.8;
  const PulseTrajectory traj{std::vector<int>(8, 0), t / 8, Scheme::cyclic()};
  const Superoperator s = evolve_dilated(AdDilation{gamma}, traj, pauli_set(), pauli::ket0());
  EXPECT_LT((s.matrix() - ad_exact_channel(t, gamma).matrix()).norm(), 1e-12);
}

TEST(EvolveDilated, SegmentSplitting) {
  const AdDilation m{0.9};
  const Operator whole = m.segment_unitary(0.0, 1.0);
  const Operator split = m.segment_unitary(0.5, 1.0) * m.segment_unitary(0.0, 0.5);
  EXPECT_LT(frobenius(whole - split), 1e-12);
}

TEST(EvolveDilated, PulsesDecoupleAsDtShrinks) {
  const AdDilation m{1.0};
  double e4 = 0.0, e10 = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    e4 += decoupling_error(evolve_dilated(m, sample_trajectory(Scheme::random(rep), 4, 16, 1.0 / 16),
                                          pauli_set(), pauli::ket0()));
    e10 += decoupling_error(evolve_dilated(
        m, sample_trajectory(Scheme::random(rep), 4, 1024, 1.0 / 1024), pauli_set(), pauli::ket0()));
  }
  EXPECT_LT(e10, 0.1 * e4);
}

TEST(EvolveDilated, ShallowPocketZ2CyclicIsIdentity) {
  const ShallowPocketModel m(1.0, 1.0, 1.0, z2_set());
  for (int n : {2, 4, 64}) {
    const auto traj = sample_trajectory(Scheme::cyclic(), 2, n, 1.0 / n);
    EXPECT_LT(frobenius(shallow_pocket_channel(traj, z2_set(), m) - Superoperator::identity(2)), 1e-12);
  }
}

TEST(EvolveAll, OutputsAreChannels) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 32);
    const auto traj = sample_trajectory(Scheme::random(rng()), 4, n, 1.0 / n);
    EXPECT_TRUE(evolve_intrinsic(ad_lindbladian(1.0), traj, pauli_set()).is_cptp(1e-9));
    EXPECT_TRUE(evolve_dilated(AdDilation{1.0}, traj, pauli_set(), pauli::ket0()).is_cptp(1e-9));
  }
}

TEST(DecouplingError, Examples) {
  EXPECT_EQ(decoupling_error(Superoperator::identity(2)), 0.0);
  const Superoperator depol = superop_from_map(
      [](const Operator& x) { return cplx(0.5) * x.trace() * Operator::identity(2); }, 2);
  EXPECT_NEAR(decoupling_error(depol), 0.75, 1e-15);
  for (double lam : {0.0, 0.3, 0.9})
    EXPECT_NEAR(decoupling_error(dephasing_channel(lam)), 0.5 * (1 - lam) * (1 - lam), 1e-15);
}

TEST(AsymptoticError, Examples) {
  EXPECT_EQ(asymptotic_error(Superoperator::zero(2), 1.0, 2), 0.0);
  const Superoperator lbar = average_generator(ad_lindbladian(1.0), pauli_set());
  EXPECT_NEAR(asymptotic_error(lbar, 1.0, 2), oracle::eq5(1.0), 1e-12);
  EXPECT_NEAR(asymptotic_error(lbar, 20.0, 2), 0.75, 1e-6);
  EXPECT_THROW(asymptotic_error(lbar, 1.0, 3), DimensionError);
}

TEST(AsymptoticError, DephasingClosedForm) {
  const GKSLGenerator l(Operator::zero(2), {{pauli::Z(), 0.25}});
  const Superoperator lbar = average_generator(l, pauli_set());
  for (int i = 1; i <= 20; ++i) {
    const double g = 0.25 * i;
    EXPECT_NEAR(decoupling_error(matrix_exp(cplx(g) * lbar)), oracle::eq7(g), 1e-12) << g;
  }
}

TEST(MeanErrorCurve, IntrinsicDephasingIsFlat) {
  const SpinBosonPDModel m({0.25, 100.0, 1.0}, 0.5, Variant::intrinsic);
  const ErrorCurve c = mean_error_curve(m, {0.5, 0.125, 0.5 / 64}, 10, 1);
  const double expect = oracle::eq7(oracle::gamma_qag(0.25, 100.0, 1.0, 0.5));
  for (const auto& p : c.points) {
    EXPECT_NEAR(p.mean_error, expect, 1e-9);
    EXPECT_LT(p.std_error, 1e-15);
  }
}

TEST(MeanErrorCurve, ReproducibleAndThreadIndependent) {
  const AmplitudeDampingModel m(1.0, 1.0, Variant::intrinsic);
  const std::vector<double> dts{0.25, 1.0 / 64};
  const ErrorCurve a = mean_error_curve(m, dts, 1, 42);
  const ErrorCurve b = mean_error_curve(m, dts, 1, 42);
  EXPECT_EQ(a.points[1].mean_error, b.points[1].mean_error);
  CurveOptions four;
  four.threads = 4;
  const ErrorCurve c = mean_error_curve(m, dts, 9, 42);
  const ErrorCurve d = mean_error_curve(m, dts, 9, 42, four);
  for (std::size_t i = 0; i < dts.size(); ++i) {
    EXPECT_EQ(c.points[i].mean_error, d.points[i].mean_error);
    EXPECT_EQ(c.points[i].std_error, d.points[i].std_error);
  }
}

TEST(MeanErrorCurve, InvalidInputs) {
  const AmplitudeDampingModel m(1.0, 1.0, Variant::intrinsic);
  EXPECT_THROW(mean_error_curve(m, {0.3}, 5, 1), std::invalid_argument);
  EXPECT_THROW(mean_error_curve(m, {0.25, 0.5}, 5, 1), std::invalid_argument);
  EXPECT_THROW(mean_error_curve(m, {}, 5, 1), std::invalid_argument);
  EXPECT_THROW(mean_error_curve(m, {0.5}, 0, 1), std::invalid_argument);
}

TEST(MeanErrorCurve, AsymptoteAttached) {
  const AmplitudeDampingModel m(1.0, 1.0, Variant::intrinsic);
  const ErrorCurve c = mean_error_curve(m, {0.5}, 2, 1);
  ASSERT_TRUE(c.asymptote.has_value());
  EXPECT_NEAR(*c.asymptote, oracle::eq5(1.0), 1e-12);
  EXPECT_EQ(c.model_tag, "ad_intrinsic");
}

TEST(MeanChannel, ConvergesToAveragedExponential) {
  // At dt = t/64 the trajectory-mean channel approaches exp(L_bar t) as more
  // trajectories are added.
  const GKSLGenerator l = ad_lindbladian(1.0);
  const Matrix target = matrix_exp(cplx(1.0) * average_generator(l, pauli_set())).matrix();
  const int n = 64;
  IntrinsicPropagator prop(l, pauli_set(), 1.0 / n, n);
  auto dist = [&](int n_traj) {
    Matrix sum = Matrix::Zero(4, 4);
    for (int k = 0; k < n_traj; ++k)
      sum += prop.channel(sample_trajectory(Scheme::random(child_seed(3, k, 0)), 4, n, 1.0 / n)).matrix();
    return (sum / n_traj - target).norm();
  };
  const double d10 = dist(10), d1000 = dist(1000);
  EXPECT_LT(d1000, d10);
}

TEST(MeanChannel, ChannelAveragingOption) {
  const AmplitudeDampingModel m(1.0, 1.0, Variant::intrinsic);
  CurveOptions opts;
  opts.averaging = Averaging::channel_mean;
  const ErrorCurve c = mean_error_curve(m, {1.0 / 256}, 50, 8, opts);
  // The expected channel equals exp(L_bar t) for this model; with 50
  // trajectories the estimate stays within 5 jackknife errors.
  EXPECT_LT(std::abs(c.points[0].mean_error - oracle::eq5(1.0)), 5.0 * c.points[0].std_error + 1e-12);
  EXPECT_GT(c.points[0].std_error, 0.0);
}

TEST(DilatedTrend, DecreasesEveryTwoLevels) {
  const AmplitudeDampingModel m(1.0, 1.0, Variant::dilated);
  std::vector<double> dts;
  for (int k = 2; k <= 10; ++k) dts.push_back(std::ldexp(1.0, -k));
  const ErrorCurve c = mean_error_curve(m, dts, 30, 2024);
  for (std::size_t i = 0; i + 2 < c.points.size(); ++i) {
    const auto& a = c.points[i];
    const auto& b = c.points[i + 2];
    EXPECT_LT(b.mean_error, a.mean_error + 3.0 * std::hypot(a.std_error, b.std_error)) << i;
  }
}

}  // namespace
}  // namespace ddprobe
