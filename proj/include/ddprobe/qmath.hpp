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

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddprobe {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Structural checks (hermiticity, unitarity, CPTP) and exact-algebra
// cross-checks use these two scales throughout the library.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kAlgebraTol = 1e-12;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError(std::string(what) + ": expected a nonempty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline int isqrt_exact(Eigen::Index n) {
  auto r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (static_cast<Eigen::Index>(r) * r != n)
    throw DimensionError("superoperator size " + std::to_string(n) + " is not a perfect square");
  return r;
}

}  // namespace detail

//----------------------------------------------------------------------------
// Operator: a dense d x d complex matrix (state, Hamiltonian, pulse, Kraus op)
//----------------------------------------------------------------------------

class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m) : m_(std::move(m)) { detail::require_square(m_, "Operator"); }

  static Operator zero(int d) { return Operator(Matrix::Zero(d, d)); }
  static Operator identity(int d) { return Operator(Matrix::Identity(d, d)); }

  // Matrix unit E_ij = |i><j|.
  static Operator unit(int d, int i, int j) {
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return Operator(std::move(m));
  }

  // Density matrix: Hermitian, unit trace, positive semidefinite within tol.
  static Operator density(Matrix m, double tol = kStructuralTol);

  // Unitary within ||U^dag U - 1||_F < tol.
  static Operator unitary(Matrix m, double tol = kStructuralTol);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  cplx trace() const { return m_.trace(); }

  bool is_hermitian(double tol = kStructuralTol) const {
    return (m_ - m_.adjoint()).norm() < tol;
  }
  bool is_unitary(double tol = kStructuralTol) const {
    return (m_.adjoint() * m_ - Matrix::Identity(dim(), dim())).norm() < tol;
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    check_same(a, b);
    return Operator(a.m_ + b.m_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    check_same(a, b);
    return Operator(a.m_ - b.m_);
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    check_same(a, b);
    return Operator(a.m_ * b.m_);
  }
  friend Operator operator*(cplx s, const Operator& a) { return Operator(s * a.m_); }
  friend Operator operator*(const Operator& a, cplx s) { return Operator(s * a.m_); }

 private:
  static void check_same(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
      throw DimensionError("operator dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                           std::to_string(b.dim()));
  }

  Matrix m_;
};

//----------------------------------------------------------------------------
// Vectorization. Column stacking: vec(X)[j*d + i] = X(i, j), so that
// vec(A X B) = (B^T kron A) vec(X).
//----------------------------------------------------------------------------

inline Vector vec(const Operator& x) {
  return Eigen::Map<const Vector>(x.matrix().data(), x.matrix().size());
}

inline Operator unvec(const Vector& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d)
    throw DimensionError("unvec: vector length " + std::to_string(v.size()) +
                         " does not match d^2 = " + std::to_string(d * d));
  return Operator(Eigen::Map<const Matrix>(v.data(), d, d));
}

//----------------------------------------------------------------------------
// Superoperator: d^2 x d^2 matrix acting on column-stacked operators.
//----------------------------------------------------------------------------

struct ChannelCheck {
  double trace_preservation_error = 0.0;  // ||vec(1)^T S - vec(1)^T||
  double choi_hermiticity_error = 0.0;
  double min_choi_eigenvalue = 0.0;
  bool ok = false;
};

class Superoperator {
 public:
  Superoperator() = default;
  explicit Superoperator(Matrix m) : m_(std::move(m)) {
    detail::require_square(m_, "Superoperator");
    d_ = detail::isqrt_exact(m_.rows());
  }

  static Superoperator identity(int d) { return Superoperator(Matrix::Identity(d * d, d * d)); }
  static Superoperator zero(int d) { return Superoperator(Matrix::Zero(d * d, d * d)); }

  // X -> A X B.
  static Superoperator sandwich(const Operator& a, const Operator& b);
  // X -> U X U^dag.
  static Superoperator conjugation(const Operator& u) { return sandwich(u, u.adjoint()); }

  int dim() const { return d_; }
  const Matrix& matrix() const { return m_; }

  Operator apply(const Operator& x) const {
    if (x.dim() != d_)
      throw DimensionError("Superoperator::apply: operator dim " + std::to_string(x.dim()) +
                           " vs superoperator dim " + std::to_string(d_));
    return unvec(m_ * vec(x), d_);
  }

  Operator choi() const;
  ChannelCheck check_channel(double tol = kStructuralTol) const;
  bool is_cptp(double tol = kStructuralTol) const { return check_channel(tol).ok; }

  // (a * b) applies b first, then a.
  friend Superoperator operator*(const Superoperator& a, const Superoperator& b) {
    check_same(a, b);
    return Superoperator(a.m_ * b.m_);
  }
  friend Superoperator operator+(const Superoperator& a, const Superoperator& b) {
    check_same(a, b);
    return Superoperator(a.m_ + b.m_);
  }
  friend Superoperator operator-(const Superoperator& a, const Superoperator& b) {
    check_same(a, b);
    return Superoperator(a.m_ - b.m_);
  }
  friend Superoperator operator*(cplx s, const Superoperator& a) {
    return Superoperator(s * a.m_);
  }

 private:
  static void check_same(const Superoperator& a, const Superoperator& b) {
    if (a.dim() != b.dim())
      throw DimensionError("superoperator dimension mismatch: " + std::to_string(a.dim()) +
                           " vs " + std::to_string(b.dim()));
  }

  Matrix m_;
  int d_ = 0;
};

//----------------------------------------------------------------------------
// Free functions
//----------------------------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Operator kron(const Operator& a, const Operator& b) {
  return Operator(kron(a.matrix(), b.matrix()));
}

inline Operator partial_trace_b(const Operator& m, int dim_a, int dim_b) {
  if (dim_a <= 0 || dim_b <= 0 || m.dim() != dim_a * dim_b)
    throw DimensionError("partial_trace_b: operator dim " + std::to_string(m.dim()) +
                         " != " + std::to_string(dim_a) + "*" + std::to_string(dim_b));
  Matrix out = Matrix::Zero(dim_a, dim_a);
  const Matrix& x = m.matrix();
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int k = 0; k < dim_b; ++k) out(i, j) += x(i * dim_b + k, j * dim_b + k);
  return Operator(std::move(out));
}

inline double frobenius(const Matrix& m) { return m.norm(); }
inline double frobenius(const Operator& m) { return m.matrix().norm(); }
inline double frobenius(const Superoperator& s) { return s.matrix().norm(); }

//----------------------------------------------------------------------------
// Matrix exponential: scaling and squaring with the [13/13] Pade approximant
// (Higham 2005). Inputs with norm up to ~1e3 are handled to near machine
// precision; non-finite inputs or results raise NumericalError.
//----------------------------------------------------------------------------

namespace detail {

inline Matrix pade_solve(const Matrix& u, const Matrix& v) {
  // (V - U)^{-1} (V + U)
  Matrix p = v + u;
  Matrix q = v - u;
  return q.partialPivLu().solve(p);
}

inline Matrix expm_pade(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

  static constexpr double theta3 = 1.495585217958292e-2;
  static constexpr double theta5 = 2.539398330063230e-1;
  static constexpr double theta7 = 9.504178996162932e-1;
  static constexpr double theta9 = 2.097847961257068e0;
  static constexpr double theta13 = 5.371920351148152e0;

  if (norm1 <= theta9) {
    const Matrix a2 = a * a;
    if (norm1 <= theta3) {
      static constexpr double b[] = {120., 60., 12., 1.};
      return pade_solve(a * (b[3] * a2 + b[1] * id), b[2] * a2 + b[0] * id);
    }
    const Matrix a4 = a2 * a2;
    if (norm1 <= theta5) {
      static constexpr double b[] = {30240., 15120., 3360., 420., 30., 1.};
      return pade_solve(a * (b[5] * a4 + b[3] * a2 + b[1] * id),
                        b[4] * a4 + b[2] * a2 + b[0] * id);
    }
    const Matrix a6 = a4 * a2;
    if (norm1 <= theta7) {
      static constexpr double b[] = {17297280., 8648640., 1995840., 277200.,
                                     25200.,    1512.,    56.,      1.};
      return pade_solve(a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id),
                        b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id);
    }
    const Matrix a8 = a6 * a2;
    static constexpr double b[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                   2162160.,     110880.,     3960.,       90.,        1.};
    return pade_solve(a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id),
                      b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id);
  }

  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  if (s > 1000) throw NumericalError("matrix_exp: norm too large to exponentiate");
  const Matrix as = a * std::ldexp(1.0, -s);

  static constexpr double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                 1187353796428800.,  129060195264000.,   10559470521600.,
                                 670442572800.,      33522128640.,       1323241920.,
                                 40840800.,          960960.,            16380.,
                                 182.,               1.};
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                         b[3] * a2 + b[1] * id);
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = pade_solve(u, v);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace detail

inline Matrix matrix_exp(const Matrix& m) {
  detail::require_square(m, "matrix_exp");
  if (!m.allFinite()) throw NumericalError("matrix_exp: non-finite input entries");
  Matrix r = detail::expm_pade(m);
  if (!r.allFinite()) throw NumericalError("matrix_exp: result overflowed");
  return r;
}

inline Operator matrix_exp(const Operator& m) { return Operator(matrix_exp(m.matrix())); }
inline Superoperator matrix_exp(const Superoperator& s) {
  return Superoperator(matrix_exp(s.matrix()));
}

// Process-tomography style reconstruction: column j*d+i is vec(apply(E_ij)).
template <typename Map>
Superoperator superop_from_map(Map&& apply, int d) {
  const int d2 = d * d;
  Matrix s(d2, d2);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) s.col(j * d + i) = vec(apply(Operator::unit(d, i, j)));
  return Superoperator(std::move(s));
}

// rho -> sum_k K_k rho K_k^dag
inline Superoperator superop_from_kraus(const std::vector<Operator>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("superop_from_kraus: no Kraus operators");
  const int d = kraus.front().dim();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    if (k.dim() != d) throw DimensionError("superop_from_kraus: Kraus dimension mismatch");
    s += kron(Matrix(k.matrix().conjugate()), k.matrix());
  }
  return Superoperator(std::move(s));
}

// rho -> tr_A( u (rho kron ancilla) u^dag )
inline Superoperator channel_from_dilation(const Operator& u, const Operator& ancilla_state,
                                           int dim_s) {
  if (dim_s <= 0 || u.dim() % dim_s != 0)
    throw DimensionError("channel_from_dilation: unitary dim " + std::to_string(u.dim()) +
                         " not divisible by system dim " + std::to_string(dim_s));
  const int dim_a = u.dim() / dim_s;
  if (ancilla_state.dim() != dim_a)
    throw DimensionError("channel_from_dilation: ancilla dim " +
                         std::to_string(ancilla_state.dim()) + " != " + std::to_string(dim_a));
  if (!u.is_unitary()) throw std::invalid_argument("channel_from_dilation: u is not unitary");
  Operator::density(ancilla_state.matrix());  // validates

  const Matrix& um = u.matrix();
  const Matrix ud = um.adjoint();
  return superop_from_map(
      [&](const Operator& rho) {
        return partial_trace_b(Operator(um * kron(rho.matrix(), ancilla_state.matrix()) * ud),
                               dim_s, dim_a);
      },
      dim_s);
}

//----------------------------------------------------------------------------
// Out-of-line members
//----------------------------------------------------------------------------

inline Superoperator Superoperator::sandwich(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw DimensionError("sandwich: operand dimension mismatch");
  return Superoperator(kron(Matrix(b.matrix().transpose()), a.matrix()));
}

inline Operator Operator::density(Matrix m, double tol) {
  Operator op(std::move(m));
  if (!op.is_hermitian(tol)) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(op.trace() - 1.0) >= tol)
    throw std::invalid_argument("density matrix trace differs from 1");
  const Matrix h = 0.5 * (op.m_ + op.m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= -tol)
    throw std::invalid_argument("density matrix is not positive semidefinite");
  return op;
}

inline Operator Operator::unitary(Matrix m, double tol) {
  Operator op(std::move(m));
  if (!op.is_unitary(tol)) throw std::invalid_argument("matrix is not unitary");
  return op;
}

// Choi matrix sum_ij E_ij kron S(E_ij).
inline Operator Superoperator::choi() const {
  const int d = d_;
  Matrix c = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      c.block(i * d, j * d, d, d) = unvec(m_.col(j * d + i), d).matrix();
  return Operator(std::move(c));
}

inline ChannelCheck Superoperator::check_channel(double tol) const {
  ChannelCheck out;
  const Vector id = vec(Operator::identity(d_));
  out.trace_preservation_error = (id.transpose() * m_ - id.transpose()).norm();
  const Matrix c = choi().matrix();
  out.choi_hermiticity_error = (c - c.adjoint()).norm();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  out.min_choi_eigenvalue = es.eigenvalues().minCoeff();
  out.ok = out.trace_preservation_error < tol && out.choi_hermiticity_error < tol &&
           out.min_choi_eigenvalue > -tol;
  return out;
}

//----------------------------------------------------------------------------
// Single-qubit constants. Basis |0>, |1> with sigma_z = diag(1, -1) and
// sigma_minus = |0><1|.
//----------------------------------------------------------------------------

namespace pauli {

inline Operator I() { return Operator::identity(2); }
inline Operator X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Operator(std::move(m));
}
inline Operator Y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return Operator(std::move(m));
}
inline Operator Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return Operator(std::move(m));
}
inline Operator minus() { return Operator::unit(2, 0, 1); }
inline Operator plus() { return Operator::unit(2, 1, 0); }

inline Operator ket0() { return Operator::unit(2, 0, 0); }
inline Operator ket1() { return Operator::unit(2, 1, 1); }

}  // namespace pauli

}  // namespace ddprobe
