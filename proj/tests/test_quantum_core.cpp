#include <doctest.h>

#include <cmath>
#include <random>

#include "tqd/quantum_core.hpp"

using namespace tqd;

namespace {

// Independent oracle: exp(-iHt) by scaling and squaring of a Taylor series.
Operator taylor_expm(const Operator& h, double t) {
  const int d = static_cast<int>(h.rows());
  const Operator a = -I_unit * t * h;
  int squarings = 0;
  double norm = a.cwiseAbs().sum();
  while (norm > 0.5) {
    norm /= 2;
    ++squarings;
  }
  const Operator scaled = a / std::pow(2.0, squarings);
  Operator term = Operator::Identity(d, d);
  Operator sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

Operator random_hermitian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Operator m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
  return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("spin state validation") {
  Amplitudes a(2);
  a << 1.0, 0.0;
  CHECK(SpinState(a).dim() == 2);
  a << 1.0 + 1e-10, 0.0;
  CHECK_THROWS_AS(SpinState{a}, std::invalid_argument);
  CHECK(std::abs(SpinState::normalized(a).amplitudes().norm() - 1.0) < 1e-15);
  Amplitudes three = Amplitudes::Zero(3);
  three(0) = 1.0;
  CHECK_THROWS_AS(SpinState{three}, DimensionError);
  CHECK_THROWS_AS(SpinState::normalized(Amplitudes::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(SpinState::basis(4, 4), std::out_of_range);
}

TEST_CASE("inner product conjugates the left state") {
  Amplitudes a(2), b(2);
  a << I_unit, 0.0;
  b << 1.0, 0.0;
  const SpinState sa(a), sb(b);
  CHECK(std::abs(sa.inner(sb) - (-I_unit)) < 1e-15);
}

TEST_CASE("hermitian and unitary checks") {
  Operator m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(HermitianOperator{m}, std::invalid_argument);
  CHECK_THROWS_AS(UnitaryMatrix{m}, std::invalid_argument);
  CHECK_NOTHROW(UnitaryMatrix{pauli::y()});
  CHECK(unitarity_defect(pauli::x()) == 0.0);
}

TEST_CASE("pauli algebra") {
  CHECK((pauli::x() * pauli::y() - I_unit * pauli::z()).norm() < 1e-15);
  CHECK((pauli::y() * pauli::z() - I_unit * pauli::x()).norm() < 1e-15);
  CHECK((pauli::dot(Vec3(1, 2, 3)) - (pauli::x() + 2.0 * pauli::y() + 3.0 * pauli::z())).norm() < 1e-15);
}

TEST_CASE("tensor product matches index formula") {
  std::mt19937_64 rng(1);
  const Operator a = random_hermitian(rng, 2);
  const Operator b = random_hermitian(rng, 2);
  const Operator ab = tensor_product(a, b);
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          CHECK(std::abs(ab(2 * i1 + i2, 2 * j1 + j2) - a(i1, j1) * b(i2, j2)) < 1e-15);
  const SpinState s = tensor_product(SpinState::basis(2, 1), SpinState::basis(2, 0));
  CHECK(std::abs(s[2] - 1.0) < 1e-15);
  CHECK_THROWS_AS(tensor_product(ab, a), DimensionError);
}

TEST_CASE("expm matches Taylor oracle") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Operator h2 = random_hermitian(rng, 2);
    CHECK((expm_hermitian(HermitianOperator(h2), 0.7).matrix() - taylor_expm(h2, 0.7)).norm() < 1e-12);
    const Operator h4 = random_hermitian(rng, 4);
    CHECK((expm_hermitian(HermitianOperator(h4), 0.7).matrix() - taylor_expm(h4, 0.7)).norm() < 1e-12);
  }
}

TEST_CASE("expm block path for operators diagonal in the second qubit") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const Operator a = random_hermitian(rng, 2);
    const Operator b = random_hermitian(rng, 2);
    Operator p0 = Operator::Zero(2, 2), p1 = Operator::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    const Operator h = tensor_product(a, p0) + tensor_product(b, p1);
    CHECK((expm_hermitian(HermitianOperator(h), 1.3).matrix() - taylor_expm(h, 1.3)).norm() < 1e-12);
  }
}

TEST_CASE("expm of a zero operator and pi half-turn") {
  CHECK((expm_hermitian(HermitianOperator::zero(2), 5.0).matrix() - pauli::identity(2)).norm() == 0.0);
  // (1/2) w sigma_y for time pi / w gives -i sigma_y.
  const double w = 25.0;
  const UnitaryMatrix u = expm_hermitian(HermitianOperator(0.5 * w * pauli::y()), M_PI / w);
  CHECK((u.matrix() - (-I_unit) * pauli::y()).norm() < 1e-14);
}

TEST_CASE("gate distance ignores global phase") {
  const UnitaryMatrix u(pauli::x());
  const UnitaryMatrix v(Operator(std::polar(1.0, 0.4) * pauli::x()));
  CHECK(gate_distance_up_to_global_phase(u, v) < 1e-15);
  CHECK(std::abs(gate_distance_up_to_global_phase(UnitaryMatrix::identity(2), UnitaryMatrix(pauli::z())) - 1.0) < 1e-15);
  CHECK(propagator_difference(u, v) > 0.1);
  CHECK_THROWS_AS(gate_distance_up_to_global_phase(u, UnitaryMatrix::identity(4)), DimensionError);
}

TEST_CASE("density matrix and bloch vector") {
  const Vec3 r = Vec3(1.0, -2.0, 0.5).normalized();
  const DensityMatrix rho = DensityMatrix::from_bloch(r);
  CHECK((bloch_vector(rho) - r).norm() < 1e-14);
  CHECK_THROWS_AS(DensityMatrix::from_bloch(0.5 * r), std::invalid_argument);
  Amplitudes a(2);
  a << std::cos(0.3), std::polar(std::sin(0.3), 0.8);
  const SpinState s(a);
  const Vec3 b(std::sin(0.6) * std::cos(0.8), std::sin(0.6) * std::sin(0.8), std::cos(0.6));
  CHECK((bloch_vector(s) - b).norm() < 1e-14);
  CHECK((bloch_vector(DensityMatrix::from_state(s)) - b).norm() < 1e-14);
}

TEST_CASE("apply renormalizes and checks dimension") {
  const UnitaryMatrix u(pauli::x());
  const SpinState out = u.apply(SpinState::basis(2, 0));
  CHECK(std::abs(out[1] - 1.0) < 1e-15);
  CHECK_THROWS_AS(u.apply(SpinState::basis(4, 0)), DimensionError);
  const HermitianOperator z(pauli::z());
  CHECK(z.expectation(SpinState::basis(2, 1)) == -1.0);
}
