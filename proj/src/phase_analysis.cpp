#include "tqd/phase_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tqd {

using std::numbers::pi;

EigenLabel EigenLabel::single(int p) {
  if (p != 0 && p != 1) throw std::invalid_argument("eigenlabel p must be 0 or 1");
  return {p, -1};
}

EigenLabel EigenLabel::pair(int p, int q) {
  if ((p != 0 && p != 1) || (q != 0 && q != 1)) {
    throw std::invalid_argument("eigenlabel (p, q) entries must be 0 or 1");
  }
  return {p, q};
}

std::string EigenLabel::name() const {
  return is_pair() ? std::to_string(p) + std::to_string(q) : std::to_string(p);
}

double wrap_phase(double phase) {
  double w = std::remainder(phase, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

double PhaseDecomposition::geometric_deviation() const {
  return phase_distance(geometric, closed_form_geometric);
}

double PhaseDecomposition::dynamical_deviation() const {
  return phase_distance(dynamical, closed_form_dynamical);
}

nlohmann::json to_json(const PhaseDecomposition& d) {
  return {{"label", d.label.name()},
          {"total", d.total},
          {"dynamical", d.dynamical},
          {"geometric", d.geometric},
          {"pulse", d.pulse},
          {"closed_form_geometric", d.closed_form_geometric},
          {"closed_form_dynamical", d.closed_form_dynamical},
          {"geometric_deviation", d.geometric_deviation()},
          {"dynamical_deviation", d.dynamical_deviation()}};
}

std::pair<SpinState, SpinState> instantaneous_eigenvectors(double theta, double omega, double t) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx rot = std::polar(1.0, omega * t);
  Amplitudes a0(2), a1(2);
  a0 << c, rot * s;
  a1 << -s, rot * c;
  return {SpinState::normalized(a0), SpinState::normalized(a1)};
}

std::array<SpinState, 4> two_qubit_eigenvectors(const TwoQubitParams& p, double t) {
  const double theta = p.theta_tilde();
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx rot = std::polar(1.0, p.omega * t);
  // Index 2a + b: a is qubit I, b is qubit II.
  Amplitudes v00 = Amplitudes::Zero(4), v01 = Amplitudes::Zero(4);
  Amplitudes v10 = Amplitudes::Zero(4), v11 = Amplitudes::Zero(4);
  v00(0) = c;
  v00(2) = rot * s;
  v10(0) = -s;
  v10(2) = rot * c;
  v01(1) = s;
  v01(3) = rot * c;
  v11(1) = -c;
  v11(3) = rot * s;
  return {SpinState::normalized(v00), SpinState::normalized(v01), SpinState::normalized(v10),
          SpinState::normalized(v11)};
}

UnitaryMatrix two_qubit_eigenbasis(const TwoQubitParams& p) {
  const auto vecs = two_qubit_eigenvectors(p, 0.0);
  Operator w(4, 4);
  for (int k = 0; k < 4; ++k) w.col(k) = vecs[k].amplitudes();
  return UnitaryMatrix(w);
}

EigenvectorFn loop_eigenvector(const LoopParams& params, int p) {
  EigenLabel::single(p);
  return [params, p](double t) {
    auto pair = instantaneous_eigenvectors(params.theta, params.omega, t);
    return p == 0 ? pair.first : pair.second;
  };
}

EigenvectorFn two_qubit_eigenvector(const TwoQubitParams& params, EigenLabel label) {
  if (!label.is_pair()) throw std::invalid_argument("two-qubit eigenvector needs a (p, q) label");
  return [params, label](double t) { return two_qubit_eigenvectors(params, t)[label.index()]; };
}

namespace {

void require_initial_match(const Trajectory& traj, const EigenvectorFn& phi) {
  if (traj.size() == 0) throw TrackingError("empty trajectory");
  const double overlap = std::abs(phi(traj.times.front()).inner(traj.states.front()));
  if (1.0 - overlap > 1e-9) {
    throw TrackingError("trajectory does not start in the tracked eigenstate (overlap " +
                        std::to_string(overlap) + ")");
  }
}

}  // namespace

std::vector<double> tracking_fidelity(const Trajectory& traj, const EigenvectorFn& phi) {
  require_initial_match(traj, phi);
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out.push_back(std::norm(phi(traj.times[k]).inner(traj.states[k])));
  }
  return out;
}

double dynamical_phase(const Trajectory& traj, const OperatorFn& root) {
  double phase = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj.times[k] - traj.times[k - 1];
    if (dt == 0.0) continue;
    const double e0 = HermitianOperator(root(traj.times[k - 1])).expectation(traj.states[k - 1]);
    const double e1 = HermitianOperator(root(traj.times[k])).expectation(traj.states[k]);
    phase -= 0.5 * (e0 + e1) * dt;
  }
  return phase;
}

double dynamical_phase(const Trajectory& traj, const SegmentSchedule& s) {
  double phase = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const std::size_t seg = traj.segment_index[k];
    if (traj.segment_index[k - 1] != seg) continue;
    const double dt = traj.times[k] - traj.times[k - 1];
    if (dt == 0.0) continue;
    const double start = s.start_time(seg);
    const OperatorFn& root = s.segments.at(seg).root;
    const double e0 = HermitianOperator(root(traj.times[k - 1] - start)).expectation(traj.states[k - 1]);
    const double e1 = HermitianOperator(root(traj.times[k] - start)).expectation(traj.states[k]);
    phase -= 0.5 * (e0 + e1) * dt;
  }
  return phase;
}

double total_phase(const Trajectory& traj, const EigenvectorFn& phi, double min_fidelity) {
  require_initial_match(traj, phi);
  double unwrapped = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const cplx overlap = phi(traj.times[k]).inner(traj.states[k]);
    if (std::norm(overlap) < min_fidelity) {
      throw TrackingError("tracking fidelity " + std::to_string(std::norm(overlap)) +
                          " below " + std::to_string(min_fidelity) + " at t = " +
                          std::to_string(traj.times[k]));
    }
    const double arg = std::arg(overlap);
    if (k == 0) {
      unwrapped = arg;
    } else {
      const double step = wrap_phase(arg - previous);
      if (std::abs(step) >= pi / 4.0) {
        throw TrackingError("phase step of " + std::to_string(step) +
                            " rad between samples; increase the sampling density");
      }
      unwrapped += step;
    }
    previous = arg;
  }
  return unwrapped;
}

double solid_angle(double theta) { return 2.0 * pi * (1.0 - std::cos(theta)); }

double solid_angle_q(const TwoQubitParams& p, int q) {
  if (q != 0 && q != 1) throw std::invalid_argument("q must be 0 or 1");
  return 2.0 * pi * (1.0 - (q == 0 ? 1.0 : -1.0) * p.cos_tilde());
}

double delta_omega(const TwoQubitParams& p) {
  return 0.5 * (solid_angle_q(p, 1) - solid_angle_q(p, 0));
}

double correction_energy_check(const LoopParams& p, int sign, double t) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const Vec3 b = root_direction(p, t);
  const DensityMatrix rho = DensityMatrix::from_bloch(sign * b);
  return (pauli::dot(tqd_correction(p, t)) * rho.matrix()).trace().real();
}

double loop_dynamical_phase(const LoopParams& p, int label) {
  EigenLabel::single(label);
  return (2 * label - 1) * pi * p.omega0 / std::abs(p.omega);
}

double loop_geometric_phase(const LoopParams& p, int label) {
  EigenLabel::single(label);
  const double direction = p.omega > 0.0 ? 1.0 : -1.0;
  return direction * (2 * label - 1) * 0.5 * solid_angle(p.theta);
}

int unwrap_samples(const LoopParams& p, int minimum) {
  const double max_phase = (0.5 * p.omega0 + std::abs(p.omega)) * p.period();
  const int needed = static_cast<int>(std::ceil(16.0 * max_phase / pi));
  return std::max(minimum, needed);
}

LoopPhaseRun loop_phase_run(const LoopParams& p, int label, const StepPolicy& policy,
                            bool tqd_corrected) {
  p.validate();
  SegmentSchedule s;
  s.dim = 2;
  s.segments.push_back(loop_segment(p, tqd_corrected));
  const EigenvectorFn phi = loop_eigenvector(p, label);
  LoopPhaseRun run{propagate_schedule(s, phi(0.0), policy, unwrap_samples(p)), {}, 0.0};
  const auto fidelity = tracking_fidelity(run.trajectory, phi);
  run.min_fidelity = *std::min_element(fidelity.begin(), fidelity.end());

  PhaseDecomposition& d = run.phases;
  d.label = EigenLabel::single(label);
  d.dynamical = dynamical_phase(run.trajectory, s);
  d.closed_form_dynamical = loop_dynamical_phase(p, label);
  d.closed_form_geometric = loop_geometric_phase(p, label);
  if (run.min_fidelity >= 1.0 - 1e-6) {
    d.total = total_phase(run.trajectory, phi);
  } else {
    // Not tracking: only the endpoint overlap phase is meaningful.
    d.total = std::arg(phi(p.period()).inner(run.trajectory.final_state()));
  }
  d.geometric = d.total - d.dynamical;
  return run;
}

}  // namespace tqd
