#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tqd/propagator.hpp"

using namespace tqd;
using std::numbers::pi;

namespace {

// Exact solution of any field rotating uniformly about z: in the frame
// co-rotating at omega the Hamiltonian is static, so
// U(t) = exp(-i omega t sigma_z / 2) exp(-i (H(0) - omega sigma_z / 2) t).
Operator rotating_frame_exact(const Vec3& field_at_zero, double omega, double t) {
  const Operator h0 = 0.5 * pauli::dot(field_at_zero) - 0.5 * omega * pauli::z();
  const Operator frame = 0.5 * omega * pauli::z();
  return expm_hermitian(HermitianOperator(frame), t).matrix() *
         expm_hermitian(HermitianOperator(h0), t).matrix();
}

SegmentSchedule single_loop(const LoopParams& p, bool tqd = true) {
  SegmentSchedule s;
  s.segments.push_back(loop_segment(p, tqd));
  return s;
}

}  // namespace

TEST_CASE("step policy validation") {
  CHECK_THROWS_AS(StepPolicy::fixed(0), std::invalid_argument);
  CHECK_THROWS_AS(StepPolicy::fixed(kMaxSubsteps + 1), std::invalid_argument);
  CHECK_THROWS_AS(StepPolicy::target(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepPolicy::target(1e-2), std::invalid_argument);
  CHECK(StepPolicy::target().target_error() == 1e-8);
  CHECK(StepPolicy::fixed(10).is_fixed());
}

TEST_CASE("loop propagator matches the rotating-frame solution") {
  for (const LoopParams& p : {LoopParams{pi / 3, 1.0, 1.0}, LoopParams{pi / 6, -0.1, 1.0},
                              LoopParams{2 * pi / 3, 10.0, 1.0}}) {
    for (bool tqd : {true, false}) {
      const Segment seg = loop_segment(p, tqd);
      const SegmentPropagation r = propagate_segment_detailed(seg, StepPolicy::target());
      const Operator exact = rotating_frame_exact(seg.field(0.0), p.omega, seg.duration);
      CHECK((r.propagator.matrix() - exact).norm() < 1e-7);
      CHECK(r.error_estimate <= 1e-8);
      CHECK(r.substeps >= 128);
    }
  }
}

TEST_CASE("TQD loop over one period returns an eigenstate phase") {
  // theta = pi/3, omega = omega0 = 1: f0(T) = -pi omega0/omega - pi (1 - cos theta) = -3 pi / 2.
  const LoopParams p{pi / 3, 1.0, 1.0};
  const Operator exact = rotating_frame_exact(tqd_field(p, 0.0), p.omega, p.period());
  Amplitudes phi(2);
  phi << std::cos(p.theta / 2), std::sin(p.theta / 2);
  const cplx overlap = phi.dot(exact * phi);
  CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-12);
  CHECK(std::abs(std::arg(overlap) - pi / 2) < 1e-12);  // -3 pi / 2 wrapped
}

TEST_CASE("constant segments are exact") {
  const Segment pulse = pi_pulse_segment(20.0, 2, PulseTarget::Single);
  const SegmentPropagation r = propagate_segment_detailed(pulse, StepPolicy::target());
  CHECK(r.substeps == 1);
  CHECK(r.error_estimate == 0.0);
  CHECK((r.propagator.matrix() - (-I_unit) * pauli::y()).norm() < 1e-14);
  SegmentSchedule s;
  s.segments.push_back(pulse);
  const ConvergenceReport c = convergence_report(s, 16);
  CHECK(c.exact);
  CHECK_FALSE(c.order.has_value());
}

TEST_CASE("convergence order is two on smooth loops") {
  for (double ratio : {0.5, 1.0, 4.0}) {
    const ConvergenceReport c = convergence_report(single_loop({1.0, ratio, 1.0}), 256);
    REQUIRE(c.order.has_value());
    CHECK(*c.order > 1.9);
    CHECK(*c.order < 2.1);
  }
}

TEST_CASE("step halving gives up at the cap") {
  const Segment seg = loop_segment({pi / 3, 1.0, 1.0});
  CHECK_THROWS_AS(propagate_segment(seg, StepPolicy::target(1e-8, kMaxSubsteps)), ConvergenceError);
  try {
    SegmentSchedule s = build_echo_sequence({pi / 3, 1.0, 1.0}, 50.0);
    schedule_propagator(s, StepPolicy::target(1e-8, kMaxSubsteps));
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("segment 0 (loop-C)") != std::string::npos);
  }
}

TEST_CASE("schedule propagator is the ordered product") {
  const SegmentSchedule s = build_echo_sequence({pi / 4, 1.0, 1.0}, 50.0, {0.2, 0.0, 0.1});
  const StepPolicy policy = StepPolicy::fixed(512);
  Operator product = Operator::Identity(2, 2);
  for (const auto& seg : s.segments) product = propagate_segment(seg, policy).matrix() * product;
  CHECK((schedule_propagator(s, policy).matrix() - product).norm() < 1e-14);
}

TEST_CASE("sampled trajectory structure") {
  const SegmentSchedule s = build_echo_sequence({pi / 3, 1.0, 1.0}, 50.0);
  const SpinState psi0 = SpinState::basis(2, 0);
  const Trajectory traj = propagate_schedule(s, psi0, StepPolicy::fixed(1024), 16);
  // Loops and pulses give 17 samples, zero-length idles one.
  CHECK(traj.size() == 4 * 17 + 3);
  CHECK(traj.substeps.size() == 7);
  CHECK(traj.times.front() == 0.0);
  CHECK(std::abs(traj.times.back() - s.total_duration()) < 1e-12);
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.times[k] >= traj.times[k - 1]);
  CHECK(traj.times[16] == traj.times[17]);  // boundary sample repeated
  CHECK((traj.final_propagator().matrix() - schedule_propagator(s, StepPolicy::fixed(1024)).matrix()).norm() < 1e-13);
  for (const auto& u : traj.propagators) CHECK(unitarity_defect(u.matrix()) < 1e-12);
}

TEST_CASE("trajectory edge cases") {
  SegmentSchedule empty;
  const Trajectory t0 = propagate_schedule(empty, SpinState::basis(2, 1), StepPolicy::target());
  CHECK(t0.size() == 1);
  CHECK(std::abs(t0.final_state()[1] - 1.0) < 1e-15);
  CHECK_THROWS_AS(propagate_schedule(empty, SpinState::basis(4, 0), StepPolicy::target()), DimensionError);
  SegmentSchedule s;
  s.segments.push_back(idle_segment(0.0, 2));
  CHECK(propagate_schedule(s, SpinState::basis(2, 0), StepPolicy::target()).size() == 1);
  CHECK_THROWS_AS(propagate_schedule(s, SpinState::basis(2, 0), StepPolicy::target(), 0), std::invalid_argument);
}

TEST_CASE("re-applying propagators matches a direct run") {
  const SegmentSchedule s = single_loop({0.8, 2.0, 1.0});
  Amplitudes a(2);
  a << 0.6, cplx(0.0, 0.8);
  const SpinState other(a);
  const Trajectory base = propagate_schedule(s, SpinState::basis(2, 0), StepPolicy::fixed(2048), 32);
  const Trajectory direct = propagate_schedule(s, other, StepPolicy::fixed(2048), 32);
  const Trajectory reused = with_initial_state(base, other);
  for (std::size_t k = 0; k < direct.size(); ++k) {
    CHECK((direct.states[k].amplitudes() - reused.states[k].amplitudes()).norm() < 1e-13);
  }
}

TEST_CASE("repeated runs are bit-identical") {
  const SegmentSchedule s = build_echo_sequence({pi / 3, 1.0, 1.0}, 50.0);
  const Trajectory a = propagate_schedule(s, SpinState::basis(2, 0), StepPolicy::target());
  const Trajectory b = propagate_schedule(s, SpinState::basis(2, 0), StepPolicy::target());
  CHECK(a.times == b.times);
  CHECK(a.substeps == b.substeps);
  CHECK(a.final_propagator().matrix() == b.final_propagator().matrix());
}

TEST_CASE("four-level schedules propagate") {
  const SegmentSchedule s = build_two_qubit_sequence({1.0, 1.0, 0.5, 25.0});
  const UnitaryMatrix u = schedule_propagator(s, StepPolicy::fixed(2048));
  CHECK(u.dim() == 4);
  CHECK(unitarity_defect(u.matrix()) < 1e-12);
}
