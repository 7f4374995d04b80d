#include "tqd/quantum_core.hpp"

#include <cmath>

namespace tqd {

namespace {

void require_qubit_dim(long dim, const char* what) {
  if (dim != 2 && dim != 4) {
    throw DimensionError(std::string(what) + ": dimension must be 2 or 4, got " +
                         std::to_string(dim));
  }
}

// exp(-i H t) for 2x2 Hermitian H = a0 + a.sigma:
// e^{-i a0 t} [cos(|a| t) - i sin(|a| t) (a/|a|).sigma]
// which is the two-projector spectral form with eigenvalues a0 +- |a|.
template <typename Block>
void expm_2x2(const Block& h, double t, Operator& out, int r0, int r1) {
  const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double ax = 0.5 * (h(1, 0).real() + h(0, 1).real());
  const double ay = 0.5 * (h(1, 0).imag() - h(0, 1).imag());
  const double r = std::sqrt(ax * ax + ay * ay + az * az);
  const double c = std::cos(r * t);
  // sin(r t)/r, continuous at r = 0
  const double s = r > 0.0 ? std::sin(r * t) / r : t;
  const cplx phase = std::polar(1.0, -a0 * t);
  out(r0, r0) = phase * cplx(c, -s * az);
  out(r1, r1) = phase * cplx(c, s * az);
  out(r0, r1) = phase * (-I_unit * s * cplx(ax, -ay));
  out(r1, r0) = phase * (-I_unit * s * cplx(ax, ay));
}

// Two-qubit operators that do not couple the states of the second qubit
// split into two 2x2 blocks on indices {q, 2+q}.
bool is_block_diagonal_in_second_qubit(const Operator& h) {
  return h(0, 1) == 0.0 && h(0, 3) == 0.0 && h(1, 0) == 0.0 && h(1, 2) == 0.0 &&
         h(2, 1) == 0.0 && h(2, 3) == 0.0 && h(3, 0) == 0.0 && h(3, 2) == 0.0;
}

}  // namespace

SpinState::SpinState(Amplitudes amps) : amps_(std::move(amps)) {
  require_qubit_dim(amps_.size(), "SpinState");
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("SpinState: amplitudes not normalized (norm " +
                                std::to_string(norm) + ")");
  }
}

SpinState SpinState::normalized(Amplitudes amps) {
  const double norm = amps.norm();
  if (norm == 0.0) throw std::invalid_argument("SpinState: zero vector");
  amps /= norm;
  return SpinState(std::move(amps));
}

SpinState SpinState::basis(int dim, int index) {
  require_qubit_dim(dim, "SpinState::basis");
  if (index < 0 || index >= dim) throw std::out_of_range("SpinState::basis: index");
  Amplitudes a = Amplitudes::Zero(dim);
  a(index) = 1.0;
  return SpinState(a);
}

HermitianOperator::HermitianOperator(Operator m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("HermitianOperator: not square");
  require_qubit_dim(m_.rows(), "HermitianOperator");
  const double defect = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (defect > kTolerance) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  }
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Operator::Zero(dim, dim));
}

double HermitianOperator::expectation(const SpinState& s) const {
  if (s.dim() != dim()) throw DimensionError("expectation: dimension mismatch");
  return s.amplitudes().dot(m_ * s.amplitudes()).real();
}

UnitaryMatrix::UnitaryMatrix(Operator m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("UnitaryMatrix: not square");
  require_qubit_dim(m_.rows(), "UnitaryMatrix");
  const double defect = unitarity_defect(m_);
  if (defect > tol) {
    throw std::invalid_argument("UnitaryMatrix: U^dagger U deviates from identity by " +
                                std::to_string(defect));
  }
}

UnitaryMatrix UnitaryMatrix::identity(int dim) { return UnitaryMatrix(pauli::identity(dim)); }

UnitaryMatrix UnitaryMatrix::trusted(Operator m) { return UnitaryMatrix(std::move(m), Unchecked{}); }

SpinState UnitaryMatrix::apply(const SpinState& s) const {
  if (s.dim() != dim()) throw DimensionError("UnitaryMatrix::apply: dimension mismatch");
  // Renormalize away the rounding drift of long products.
  return SpinState::normalized(m_ * s.amplitudes());
}

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("UnitaryMatrix product: dimension mismatch");
  return UnitaryMatrix::trusted(a.m_ * b.m_);
}

DensityMatrix::DensityMatrix(Operator m) : m_(std::move(m)) {
  if (m_.rows() != 2 || m_.cols() != 2) throw DimensionError("DensityMatrix: must be 2x2");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::abs(m_.trace() - 1.0) > 1e-10) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  }
  if ((m_ * m_ - m_).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("DensityMatrix: not a pure state (rho^2 != rho)");
  }
}

DensityMatrix DensityMatrix::from_state(const SpinState& s) {
  if (s.dim() != 2) throw DimensionError("DensityMatrix::from_state: needs dim 2");
  return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::from_bloch(const Vec3& r) {
  return DensityMatrix(0.5 * (pauli::identity(2) + pauli::dot(r)));
}

namespace pauli {

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Operator x() {
  Operator m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Operator y() {
  Operator m(2, 2);
  m << 0.0, -I_unit, I_unit, 0.0;
  return m;
}

Operator z() {
  Operator m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Operator dot(const Vec3& v) {
  Operator m(2, 2);
  m << v.z(), cplx(v.x(), -v.y()), cplx(v.x(), v.y()), -v.z();
  return m;
}

}  // namespace pauli

Operator tensor_product(const Operator& a, const Operator& b) {
  if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 2) {
    throw DimensionError("tensor_product: both factors must be 2x2");
  }
  Operator out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return out;
}

SpinState tensor_product(const SpinState& a, const SpinState& b) {
  if (a.dim() != 2 || b.dim() != 2) throw DimensionError("tensor_product: both states must be dim 2");
  Amplitudes out(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(2 * i + j) = a[i] * b[j];
  return SpinState::normalized(out);
}

UnitaryMatrix expm_hermitian(const HermitianOperator& h, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("expm_hermitian: non-finite duration");
  const Operator& m = h.matrix();
  const int d = h.dim();
  Operator out = Operator::Zero(d, d);
  if (d == 2) {
    expm_2x2(m, t, out, 0, 1);
    return UnitaryMatrix::trusted(std::move(out));
  }
  if (is_block_diagonal_in_second_qubit(m)) {
    for (int q = 0; q < 2; ++q) {
      Eigen::Matrix2cd block;
      block << m(q, q), m(q, 2 + q), m(2 + q, q), m(2 + q, 2 + q);
      expm_2x2(block, t, out, q, 2 + q);
    }
    return UnitaryMatrix::trusted(std::move(out));
  }
  const Eigen::Matrix4cd dense = m;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(dense);
  const Eigen::Vector4d& evals = solver.eigenvalues();
  const Eigen::Matrix4cd& evecs = solver.eigenvectors();
  Eigen::Vector4cd phases;
  for (int k = 0; k < 4; ++k) phases(k) = std::polar(1.0, -evals(k) * t);
  out = evecs * phases.asDiagonal() * evecs.adjoint();
  return UnitaryMatrix::trusted(std::move(out));
}

double gate_distance_up_to_global_phase(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  if (u.dim() != v.dim()) throw DimensionError("gate distance: dimension mismatch");
  const double overlap = std::abs((u.matrix().adjoint() * v.matrix()).trace()) / u.dim();
  return std::max(0.0, 1.0 - overlap);
}

double propagator_difference(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  if (u.dim() != v.dim()) throw DimensionError("propagator difference: dimension mismatch");
  return (u.matrix() - v.matrix()).norm();
}

double unitarity_defect(const Operator& u) {
  return (u.adjoint() * u - Operator::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

Vec3 bloch_vector(const SpinState& s) {
  if (s.dim() != 2) throw DimensionError("bloch_vector: needs a single-qubit state");
  const cplx a = s[0];
  const cplx b = s[1];
  const cplx coh = std::conj(a) * b;
  return Vec3(2.0 * coh.real(), 2.0 * coh.imag(), std::norm(a) - std::norm(b));
}

Vec3 bloch_vector(const DensityMatrix& rho) {
  const Operator& m = rho.matrix();
  return Vec3(2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real());
}

}  // namespace tqd
