#pragma once

// Small dense complex linear algebra for one and two spin-1/2 systems.
// Matrices carry inline storage of at most 4x4, so nothing here touches the
// heap in the integrator's inner loop. hbar = 1 throughout: Hamiltonian
// entries are angular frequencies.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tqd {

using cplx = std::complex<double>;
using Operator = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
using Amplitudes = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using Vec3 = Eigen::Vector3d;

inline constexpr cplx I_unit{0.0, 1.0};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Normalized state of one (dim 2) or two (dim 4) qubits.
class SpinState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  // Throws DimensionError for a dimension other than 2 or 4, and
  // std::invalid_argument when |amps| deviates from 1 by more than 1e-12.
  explicit SpinState(Amplitudes amps);

  // Normalizes first; rejects the zero vector.
  static SpinState normalized(Amplitudes amps);

  // |index> in the computational basis of the given dimension.
  static SpinState basis(int dim, int index);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Amplitudes& amplitudes() const { return amps_; }
  cplx operator[](int k) const { return amps_(k); }

  cplx inner(const SpinState& other) const { return amps_.dot(other.amps_); }

 private:
  Amplitudes amps_;
};

class HermitianOperator {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit HermitianOperator(Operator m);
  static HermitianOperator zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Operator& matrix() const { return m_; }

  // <s|H|s>, real by construction.
  double expectation(const SpinState& s) const;

 private:
  Operator m_;
};

class UnitaryMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  // Checks U^dagger U = 1 entrywise within tol.
  explicit UnitaryMatrix(Operator m, double tol = kDefaultTolerance);
  static UnitaryMatrix identity(int dim);

  // Skips the unitarity check. Used by the integrator, whose products are
  // unitary by construction; callers audit with unitarity_defect().
  static UnitaryMatrix trusted(Operator m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Operator& matrix() const { return m_; }

  UnitaryMatrix adjoint() const { return trusted(m_.adjoint()); }
  SpinState apply(const SpinState& s) const;

  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

 private:
  struct Unchecked {};
  UnitaryMatrix(Operator m, Unchecked) : m_(std::move(m)) {}
  Operator m_;
};

// 2x2 pure-state density matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator m);
  static DensityMatrix from_state(const SpinState& s);
  // (1 + r.sigma)/2 for a unit Bloch vector r.
  static DensityMatrix from_bloch(const Vec3& r);

  const Operator& matrix() const { return m_; }

 private:
  Operator m_;
};

namespace pauli {
Operator identity(int dim);
Operator x();
Operator y();
Operator z();
// v.sigma for a real 3-vector.
Operator dot(const Vec3& v);
}  // namespace pauli

// Kronecker product of two 2x2 operators or two 2-vectors.
Operator tensor_product(const Operator& a, const Operator& b);
SpinState tensor_product(const SpinState& a, const SpinState& b);

// exp(-i H t) from the spectral decomposition of H.
UnitaryMatrix expm_hermitian(const HermitianOperator& h, double t);

// 1 - |Tr(U^dagger V)| / d. Zero iff U and V agree up to a global phase.
double gate_distance_up_to_global_phase(const UnitaryMatrix& u, const UnitaryMatrix& v);

// Frobenius norm of U - V. Phase-sensitive; used for step-size control.
double propagator_difference(const UnitaryMatrix& u, const UnitaryMatrix& v);

// max_ij |(U^dagger U - 1)_ij|
double unitarity_defect(const Operator& u);

Vec3 bloch_vector(const SpinState& s);
Vec3 bloch_vector(const DensityMatrix& rho);

}  // namespace tqd
