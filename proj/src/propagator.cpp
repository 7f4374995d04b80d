#include "tqd/propagator.hpp"

#include <cmath>
#include <cstdio>

namespace tqd {

namespace {

std::string format_error(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", e);
  return buf;
}

struct SampledRun {
  Operator total;
  std::vector<double> local_times;
  std::vector<Operator> partial;  // propagator from segment start to local_times[j]
};

std::vector<long> sample_steps(long steps, int samples) {
  const long n = std::min<long>(steps, samples);
  std::vector<long> out;
  out.reserve(n + 1);
  for (long j = 0; j <= n; ++j) out.push_back(j * steps / n);
  return out;
}

SampledRun integrate(const Segment& seg, long steps, int samples) {
  const int d = seg.dim;
  SampledRun run;
  if (seg.duration == 0.0) {
    run.total = Operator::Identity(d, d);
    run.local_times = {0.0};
    run.partial = {run.total};
    return run;
  }
  if (seg.constant) {
    const HermitianOperator h = seg.hamiltonian(0.0);
    const long n = std::max(samples, 1);
    for (long j = 0; j <= n; ++j) {
      const double t = seg.duration * static_cast<double>(j) / n;
      run.local_times.push_back(t);
      run.partial.push_back(j == 0 ? Operator(Operator::Identity(d, d))
                                   : expm_hermitian(h, t).matrix());
    }
    run.total = run.partial.back();
    return run;
  }
  const double dt = seg.duration / static_cast<double>(steps);
  const std::vector<long> marks = sample_steps(steps, samples);
  std::size_t next_mark = 0;
  Operator u = Operator::Identity(d, d);
  for (long k = 0; k <= steps; ++k) {
    if (next_mark < marks.size() && marks[next_mark] == k) {
      run.local_times.push_back(k == steps ? seg.duration : dt * static_cast<double>(k));
      run.partial.push_back(u);
      ++next_mark;
    }
    if (k == steps) break;
    const double mid = (static_cast<double>(k) + 0.5) * dt;
    // Hermitian by construction of every generator in fields.cpp.
    const Operator step = expm_hermitian(HermitianOperator(seg.generator(mid)), dt).matrix();
    u = step * u;
  }
  run.total = u;
  return run;
}

struct Converged {
  SampledRun run;
  long steps;
  double error;
};

Converged converge(const Segment& seg, const StepPolicy& policy, std::size_t index, int samples) {
  if (seg.constant || seg.duration == 0.0) return {integrate(seg, 1, samples), 1, 0.0};
  if (policy.is_fixed()) return {integrate(seg, policy.substeps(), samples), policy.substeps(), 0.0};

  long n = policy.initial_substeps();
  SampledRun coarse = integrate(seg, n, samples);
  while (true) {
    if (2 * n > kMaxSubsteps) {
      throw ConvergenceError("segment " + std::to_string(index) + " (" + to_string(seg.label) +
                             "): target error " + format_error(policy.target_error()) +
                             " not reached within " + std::to_string(kMaxSubsteps) + " substeps");
    }
    SampledRun fine = integrate(seg, 2 * n, samples);
    const double estimate = (fine.total - coarse.total).norm() / 3.0;
    if (estimate <= policy.target_error()) return {std::move(fine), 2 * n, estimate};
    coarse = std::move(fine);
    n *= 2;
  }
}

}  // namespace

StepPolicy StepPolicy::fixed(long substeps_per_segment) {
  if (substeps_per_segment < 1 || substeps_per_segment > kMaxSubsteps) {
    throw std::invalid_argument("substeps must lie in [1, 2^20]");
  }
  StepPolicy p;
  p.substeps_ = substeps_per_segment;
  return p;
}

StepPolicy StepPolicy::target(double target_error, long initial_substeps) {
  if (!(target_error > 0.0) || target_error > 1e-3) {
    throw std::invalid_argument("target_error must lie in (0, 1e-3]");
  }
  if (initial_substeps < 1 || initial_substeps > kMaxSubsteps) {
    throw std::invalid_argument("initial substeps must lie in [1, 2^20]");
  }
  StepPolicy p;
  p.target_error_ = target_error;
  p.initial_ = initial_substeps;
  return p;
}

SegmentPropagation propagate_segment_detailed(const Segment& seg, const StepPolicy& policy,
                                              std::size_t index) {
  Converged c = converge(seg, policy, index, 1);
  return {UnitaryMatrix::trusted(std::move(c.run.total)), c.steps, c.error};
}

UnitaryMatrix propagate_segment(const Segment& seg, const StepPolicy& policy) {
  return propagate_segment_detailed(seg, policy).propagator;
}

UnitaryMatrix schedule_propagator(const SegmentSchedule& s, const StepPolicy& policy) {
  Operator u = Operator::Identity(s.dim, s.dim);
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    u = converge(s.segments[k], policy, k, 1).run.total * u;
  }
  return UnitaryMatrix::trusted(std::move(u));
}

Trajectory propagate_schedule(const SegmentSchedule& s, const SpinState& initial,
                              const StepPolicy& policy, int samples_per_segment) {
  if (initial.dim() != s.dim) throw DimensionError("propagate_schedule: state/schedule dimension mismatch");
  if (samples_per_segment < 1) throw std::invalid_argument("samples per segment must be >= 1");
  Trajectory traj;
  traj.dim = s.dim;
  Operator before = Operator::Identity(s.dim, s.dim);
  double start = 0.0;
  auto record = [&](double t, std::size_t k, const Operator& u) {
    traj.times.push_back(t);
    traj.propagators.push_back(UnitaryMatrix::trusted(u));
    traj.states.push_back(SpinState::normalized(u * initial.amplitudes()));
    traj.segment_index.push_back(k);
  };
  if (s.segments.empty()) {
    record(0.0, 0, before);
    return traj;
  }
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    const Segment& seg = s.segments[k];
    if (seg.dim != s.dim) throw DimensionError("propagate_schedule: segment dimension mismatch");
    Converged c = converge(seg, policy, k, samples_per_segment);
    for (std::size_t j = 0; j < c.run.local_times.size(); ++j) {
      record(start + c.run.local_times[j], k, c.run.partial[j] * before);
    }
    traj.substeps.push_back(c.steps);
    before = c.run.total * before;
    start += seg.duration;
  }
  return traj;
}

Trajectory with_initial_state(const Trajectory& traj, const SpinState& initial) {
  if (initial.dim() != traj.dim) throw DimensionError("with_initial_state: dimension mismatch");
  Trajectory out = traj;
  for (std::size_t k = 0; k < out.size(); ++k) out.states[k] = out.propagators[k].apply(initial);
  return out;
}

ConvergenceReport convergence_report(const SegmentSchedule& s, long base_substeps) {
  ConvergenceReport r;
  r.base_substeps = base_substeps;
  const UnitaryMatrix u1 = schedule_propagator(s, StepPolicy::fixed(base_substeps));
  const UnitaryMatrix u2 = schedule_propagator(s, StepPolicy::fixed(2 * base_substeps));
  const UnitaryMatrix u4 = schedule_propagator(s, StepPolicy::fixed(4 * base_substeps));
  r.distance_coarse = propagator_difference(u1, u2);
  r.distance_fine = propagator_difference(u2, u4);
  r.exact = r.distance_coarse <= kExactThreshold && r.distance_fine <= kExactThreshold;
  if (!r.exact && r.distance_fine > 0.0) r.order = std::log2(r.distance_coarse / r.distance_fine);
  return r;
}

}  // namespace tqd
