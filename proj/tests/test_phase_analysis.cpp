#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tqd/phase_analysis.hpp"

using namespace tqd;
using std::numbers::pi;

TEST_CASE("labels") {
  CHECK(EigenLabel::single(1).index() == 1);
  CHECK(EigenLabel::pair(1, 0).index() == 2);
  CHECK(EigenLabel::pair(0, 1).name() == "01");
  CHECK_THROWS_AS(EigenLabel::single(2), std::invalid_argument);
  CHECK_THROWS_AS(EigenLabel::pair(0, -1), std::invalid_argument);
}

TEST_CASE("phase wrapping") {
  CHECK(wrap_phase(pi) == doctest::Approx(pi));
  CHECK(wrap_phase(-pi) == doctest::Approx(pi));
  CHECK(wrap_phase(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(phase_distance(0.1, 0.1 + 4 * pi) < 1e-14);
}

TEST_CASE("instantaneous eigenvectors") {
  const LoopParams p{1.2, 0.7, 1.5};
  for (double t : {0.0, 1.0, 5.0}) {
    const auto [phi0, phi1] = instantaneous_eigenvectors(p.theta, p.omega, t);
    const Operator h = 0.5 * pauli::dot(root_field(p, t));
    CHECK((h * phi0.amplitudes() - 0.5 * p.omega0 * phi0.amplitudes()).norm() < 1e-14);
    CHECK((h * phi1.amplitudes() + 0.5 * p.omega0 * phi1.amplitudes()).norm() < 1e-14);
    CHECK(std::abs(phi0.inner(phi1)) < 1e-15);
  }
}

TEST_CASE("two-qubit eigenvectors diagonalize the block root") {
  for (const TwoQubitParams& p : {TwoQubitParams{1.0, 1.0, 0.5, 25.0}, TwoQubitParams{0.7, -1.3, -0.4, 20.0}}) {
    const double e = 0.5 * std::hypot(p.omegaI, p.J);
    for (double t : {0.0, 2.0}) {
      const Operator h = build_reduced_two_qubit_root(p, t).matrix();
      const auto vecs = two_qubit_eigenvectors(p, t);
      for (int k = 0; k < 4; ++k) {
        const double lambda = (k / 2 == 0 ? 1.0 : -1.0) * e;  // p = 0 is the upper level
        CHECK((h * vecs[k].amplitudes() - lambda * vecs[k].amplitudes()).norm() < 1e-14);
      }
    }
    const UnitaryMatrix w = two_qubit_eigenbasis(p);
    CHECK(unitarity_defect(w.matrix()) < 1e-15);
  }
}

TEST_CASE("solid angles") {
  CHECK(solid_angle(pi / 3) == doctest::Approx(pi));
  CHECK(solid_angle(pi / 2) == doctest::Approx(2 * pi));
  const TwoQubitParams p{1.0, 1.0, 0.5, 25.0};
  CHECK(std::abs(delta_omega(p) - 2 * pi / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(solid_angle_q(p, 0) + solid_angle_q(p, 1) - 4 * pi) < 1e-14);
}

TEST_CASE("correction carries no energy in either eigenstate") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int k = 0; k < 50; ++k) {
    const LoopParams p{u(rng), u(rng), u(rng)};
    CHECK(std::abs(correction_energy_check(p, 1, u(rng))) < 1e-14);
    CHECK(std::abs(correction_energy_check(p, -1, u(rng))) < 1e-14);
  }
  CHECK_THROWS_AS(correction_energy_check({1.0, 1.0, 1.0}, 0, 0.0), std::invalid_argument);
}

TEST_CASE("closed-form loop phases") {
  const LoopParams p{pi / 3, 0.5, 1.0};
  CHECK(loop_dynamical_phase(p, 0) == doctest::Approx(-2 * pi));
  CHECK(loop_dynamical_phase(p, 1) == doctest::Approx(2 * pi));
  CHECK(loop_geometric_phase(p, 0) == doctest::Approx(-pi / 2));
  CHECK(loop_geometric_phase(p.reversed(), 0) == doctest::Approx(pi / 2));
  CHECK(loop_dynamical_phase(p.reversed(), 0) == doctest::Approx(-2 * pi));
}

TEST_CASE("single loop: total phase matches the rotating-frame value") {
  // Exact total phase of phi_0: -pi omega0/omega - pi (1 - cos theta).
  const LoopParams p{pi / 3, 1.0, 1.0};
  const LoopPhaseRun run = loop_phase_run(p, 0, StepPolicy::target());
  CHECK(run.min_fidelity > 1.0 - 1e-12);
  CHECK(std::abs(run.phases.total - (-1.5 * pi)) < 1e-7);
  CHECK(std::abs(run.phases.dynamical - (-pi)) < 1e-9);
  CHECK(std::abs(run.phases.geometric - (-pi / 2)) < 1e-7);
  CHECK(run.phases.geometric_deviation() < 1e-7);
}

TEST_CASE("geometric phase over the angle and speed grid") {
  for (double theta : {pi / 6, pi / 3, pi / 2, 2 * pi / 3}) {
    for (double ratio : {0.1, 1.0, 10.0, -2.0}) {
      for (int label : {0, 1}) {
        const LoopParams p{theta, ratio, 1.0};
        const LoopPhaseRun run = loop_phase_run(p, label, StepPolicy::target());
        CHECK(run.min_fidelity >= 1.0 - 1e-7);
        CHECK(run.phases.geometric_deviation() < 1e-6);
        CHECK(run.phases.dynamical_deviation() < 1e-6);
      }
    }
  }
}

TEST_CASE("label 1 unwraps to the closed form minus 2 pi") {
  // The continuous phase is -pi (1 + cos theta); the closed form is +pi (1 - cos theta).
  const LoopParams p{pi / 3, 1.0, 1.0};
  const LoopPhaseRun run = loop_phase_run(p, 1, StepPolicy::target());
  CHECK(std::abs(run.phases.geometric - (-1.5 * pi)) < 1e-7);
  CHECK(run.phases.geometric_deviation() < 1e-7);
}

TEST_CASE("uncorrected driving loses the eigenstate") {
  // Root field only, theta = pi/3, omega = omega0: in the rotating frame the
  // state precesses about an axis 60 degrees from it, with period T. At T/2 it
  // is 120 degrees from phi_0, so the minimum fidelity is cos^2(60 deg) = 1/4.
  const LoopPhaseRun run = loop_phase_run({pi / 3, 1.0, 1.0}, 0, StepPolicy::target(), false);
  CHECK(std::abs(run.min_fidelity - 0.25) < 1e-7);
}

TEST_CASE("tracking errors") {
  const LoopParams p{pi / 3, 1.0, 1.0};
  SegmentSchedule s;
  s.segments.push_back(loop_segment(p, false));
  const Trajectory traj = propagate_schedule(s, SpinState::basis(2, 1), StepPolicy::fixed(256));
  CHECK_THROWS_AS(tracking_fidelity(traj, loop_eigenvector(p, 0)), TrackingError);

  const Trajectory root = propagate_schedule(s, loop_eigenvector(p, 0)(0.0), StepPolicy::fixed(4096));
  CHECK_THROWS_AS(total_phase(root, loop_eigenvector(p, 0)), TrackingError);

  SegmentSchedule tqd;
  tqd.segments.push_back(loop_segment({pi / 3, 1.0, 20.0}));
  const Trajectory sparse = propagate_schedule(tqd, loop_eigenvector({pi / 3, 1.0, 20.0}, 0)(0.0),
                                               StepPolicy::target(), 8);
  CHECK_THROWS_AS(total_phase(sparse, loop_eigenvector({pi / 3, 1.0, 20.0}, 0)), TrackingError);
}

TEST_CASE("dynamical phase ignores segments without a root") {
  const LoopParams p{pi / 4, 1.0, 1.0};
  const SegmentSchedule s = build_echo_sequence(p, 50.0, {0.5, 0.5, 0.5});
  const Trajectory traj = propagate_schedule(s, loop_eigenvector(p, 0)(0.0), StepPolicy::target());
  // C contributes -pi, C-bar (tracking phi_1 after the pulse) +pi.
  CHECK(std::abs(dynamical_phase(traj, s)) < 1e-9);
  SegmentSchedule first;
  first.segments.push_back(s.segments[0]);
  const Trajectory one = propagate_schedule(first, loop_eigenvector(p, 0)(0.0), StepPolicy::target());
  CHECK(std::abs(dynamical_phase(one, first) + pi) < 1e-9);
}

TEST_CASE("unwrap sampling density") {
  CHECK(unwrap_samples({pi / 3, 1.0, 1.0}) == 256);
  CHECK(unwrap_samples({pi / 3, 0.01, 1.0}) > 1000);
}
