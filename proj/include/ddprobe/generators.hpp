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

#include "ddprobe/qmath.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ddprobe {

struct JumpTerm {
  Operator op;
  double rate = 0.0;  // 1/time
};

// Dimensionless scalar f(t) multiplying every jump rate, together with its
// exact integral over [t0, t1]. The integral is what the evolution uses.
struct RateProfile {
  std::function<double(double)> value;
  std::function<double(double, double)> integral;
};

//----------------------------------------------------------------------------
// GKSL generator
//
//   L(rho) = -i[H, rho] + f(t) sum_j rate_j (2 A_j rho A_j^dag - A_j^dag A_j rho - rho A_j^dag A_j)
//
// With a rate profile present the Hamiltonian part is not scaled, and exact
// step propagators assume [L_H, L_D] = 0 (true for every model in this
// library; pure dephasing carries no Hamiltonian).
//----------------------------------------------------------------------------

class GKSLGenerator {
 public:
  GKSLGenerator(Operator hamiltonian, std::vector<JumpTerm> jumps,
                std::optional<RateProfile> profile = std::nullopt)
      : h_(std::move(hamiltonian)), jumps_(std::move(jumps)), profile_(std::move(profile)) {
    if (!h_.is_hermitian()) throw std::invalid_argument("GKSLGenerator: Hamiltonian not Hermitian");
    for (const auto& j : jumps_) {
      if (j.op.dim() != h_.dim()) throw DimensionError("GKSLGenerator: jump operator dimension");
      if (!(j.rate >= 0.0) || !std::isfinite(j.rate))
        throw std::invalid_argument("GKSLGenerator: rates must be finite and nonnegative");
    }
    if (profile_ && (!profile_->value || !profile_->integral))
      throw std::invalid_argument("GKSLGenerator: rate profile needs value and integral");
  }

  static GKSLGenerator hamiltonian_only(Operator h) { return GKSLGenerator(std::move(h), {}); }

  int dim() const { return h_.dim(); }
  const Operator& hamiltonian() const { return h_; }
  const std::vector<JumpTerm>& jumps() const { return jumps_; }
  const std::optional<RateProfile>& profile() const { return profile_; }
  bool time_dependent() const { return profile_.has_value(); }

  // rho -> -i[H, rho]
  Superoperator hamiltonian_part() const {
    const Operator id = Operator::identity(dim());
    const cplx mi(0.0, -1.0);
    return mi * (Superoperator::sandwich(h_, id) - Superoperator::sandwich(id, h_));
  }

  // Dissipator with the profile factor set to 1.
  Superoperator dissipator() const {
    const Operator id = Operator::identity(dim());
    Superoperator d = Superoperator::zero(dim());
    for (const auto& j : jumps_) {
      const Operator ad = j.op.adjoint();
      const Operator ada = ad * j.op;
      d = d + cplx(j.rate) * (cplx(2.0) * Superoperator::sandwich(j.op, ad) -
                              Superoperator::sandwich(ada, id) - Superoperator::sandwich(id, ada));
    }
    return d;
  }

  double profile_value(double t) const { return profile_ ? profile_->value(t) : 1.0; }
  double profile_integral(double t0, double t1) const {
    return profile_ ? profile_->integral(t0, t1) : (t1 - t0);
  }

  // Generator at time t (profile factor f(t) applied to the rates).
  Superoperator superoperator(double t = 0.0) const {
    return hamiltonian_part() + cplx(profile_value(t)) * dissipator();
  }

  // Exact exponent of the step propagator over [t0, t1].
  Superoperator integrated(double t0, double t1) const {
    return cplx(t1 - t0) * hamiltonian_part() + cplx(profile_integral(t0, t1)) * dissipator();
  }

 private:
  Operator h_;
  std::vector<JumpTerm> jumps_;
  std::optional<RateProfile> profile_;
};

inline Operator apply_generator(const GKSLGenerator& l, const Operator& rho, double t = 0.0) {
  if (rho.dim() != l.dim())
    throw DimensionError("apply_generator: state dim " + std::to_string(rho.dim()) +
                         " vs generator dim " + std::to_string(l.dim()));
  const Matrix& r = rho.matrix();
  const Matrix& h = l.hamiltonian().matrix();
  Matrix out = cplx(0.0, -1.0) * (h * r - r * h);
  const double f = l.profile_value(t);
  for (const auto& j : l.jumps()) {
    const Matrix& a = j.op.matrix();
    const Matrix ad = a.adjoint();
    const Matrix ada = ad * a;
    out += (f * j.rate) * (2.0 * a * r * ad - ada * r - r * ada);
  }
  return Operator(std::move(out));
}

//----------------------------------------------------------------------------
// Pulse sets
//----------------------------------------------------------------------------

// A finite list of d x d unitaries with their conjugation superoperators.
class PulseSet {
 public:
  explicit PulseSet(std::vector<Operator> elements, double tol = kStructuralTol)
      : elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("PulseSet: empty");
    const int d = elements_.front().dim();
    ad_.reserve(elements_.size());
    for (const auto& v : elements_) {
      if (v.dim() != d) throw DimensionError("PulseSet: elements differ in dimension");
      if (!v.is_unitary(tol)) throw std::invalid_argument("PulseSet: element is not unitary");
      ad_.push_back(Superoperator::conjugation(v));
    }
  }

  int dim() const { return elements_.front().dim(); }
  int size() const { return static_cast<int>(elements_.size()); }
  const Operator& operator[](int i) const { return elements_.at(i); }
  const std::vector<Operator>& elements() const { return elements_; }

  // Ad(v_i): X -> v_i X v_i^dag
  const Superoperator& conjugation(int i) const { return ad_.at(i); }

  // (1/|V|) sum_v v x v^dag
  Operator twirl(const Operator& x) const {
    Matrix acc = Matrix::Zero(dim(), dim());
    for (const auto& v : elements_) acc += v.matrix() * x.matrix() * v.matrix().adjoint();
    return Operator(acc / static_cast<double>(size()));
  }

 private:
  std::vector<Operator> elements_;
  std::vector<Superoperator> ad_;
};

// True iff (1/|V|) sum_v v E_ij v^dag = tr(E_ij)/d * 1 for every matrix unit.
inline bool verify_decoupling_set(const PulseSet& v, double tol = kStructuralTol) {
  const int d = v.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Operator x = Operator::unit(d, i, j);
      const Matrix target = (i == j ? 1.0 / d : 0.0) * Matrix::Identity(d, d);
      if ((v.twirl(x).matrix() - target).norm() >= tol) return false;
    }
  return true;
}

// A PulseSet whose twirl is the completely depolarizing map.
class DecouplingSet : public PulseSet {
 public:
  explicit DecouplingSet(std::vector<Operator> elements, double tol = kStructuralTol)
      : PulseSet(std::move(elements), tol) {
    if (!verify_decoupling_set(*this, tol))
      throw std::invalid_argument("DecouplingSet: averaging identity fails");
  }
};

inline DecouplingSet pauli_set() {
  return DecouplingSet({pauli::I(), pauli::X(), pauli::Y(), pauli::Z()});
}

// {1, sigma_x}: decouples sigma_z couplings only.
inline PulseSet z2_set() { return PulseSet({pauli::I(), pauli::X()}); }

// Clock-and-shift products X^a Z^b, a, b = 0..d-1.
inline DecouplingSet heisenberg_weyl_set(int d) {
  if (d < 2) throw std::invalid_argument("heisenberg_weyl_set: d must be >= 2");
  Matrix shift = Matrix::Zero(d, d);
  Matrix clock = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    shift((j + 1) % d, j) = 1.0;
    clock(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  }
  std::vector<Operator> els;
  Matrix xa = Matrix::Identity(d, d);
  for (int a = 0; a < d; ++a) {
    Matrix zb = Matrix::Identity(d, d);
    for (int b = 0; b < d; ++b) {
      els.emplace_back(xa * zb);
      zb = zb * clock;
    }
    xa = xa * shift;
  }
  return DecouplingSet(std::move(els));
}

//----------------------------------------------------------------------------
// Averaged generator
//----------------------------------------------------------------------------

// (1/|V|) sum_v Ad(v) S Ad(v^dag)
inline Superoperator average_superoperator(const Superoperator& s, const PulseSet& v) {
  if (s.dim() != v.dim()) throw DimensionError("average_superoperator: dimension mismatch");
  Matrix acc = Matrix::Zero(s.matrix().rows(), s.matrix().cols());
  for (int i = 0; i < v.size(); ++i) {
    const Matrix& ad = v.conjugation(i).matrix();
    acc += ad * s.matrix() * ad.adjoint();
  }
  return Superoperator(acc / static_cast<double>(v.size()));
}

// Averaged generator of l with any rate profile set to 1.
inline Superoperator average_generator(const GKSLGenerator& l, const PulseSet& v) {
  return average_superoperator(l.hamiltonian_part() + l.dissipator(), v);
}

// ||L_bar||_F; zero exactly when the decoupling condition holds.
inline double dissipative_residual(const GKSLGenerator& l, const PulseSet& v) {
  return frobenius(average_generator(l, v));
}

}  // namespace ddprobe
