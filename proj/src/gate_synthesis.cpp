#include "tqd/gate_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tqd {

using std::numbers::pi;

namespace {

// chi_0(v) = (cos v/2, sin v/2), chi_1(v) = (-sin v/2, cos v/2)
Amplitudes axis_eigenvector(double vartheta, int p) {
  Amplitudes a(2);
  const double c = std::cos(0.5 * vartheta);
  const double s = std::sin(0.5 * vartheta);
  if (p == 0) {
    a << c, s;
  } else {
    a << -s, c;
  }
  return a;
}

double max_off_diagonal(const Operator& m) {
  double out = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j) out = std::max(out, std::abs(m(i, j)));
  return out;
}

void summarize_phases(GateReport& r) {
  r.max_phase_deviation = 0.0;
  r.max_dynamical_residual = 0.0;
  for (const auto& d : r.phase_report) {
    r.max_phase_deviation = std::max(r.max_phase_deviation, d.geometric_deviation());
    r.max_dynamical_residual = std::max(r.max_dynamical_residual, std::abs(d.dynamical));
  }
}

}  // namespace

UnitaryMatrix closed_form_single(const SingleGateSpec& spec) {
  const double c2 = std::pow(std::cos(0.5 * spec.vartheta), 2);
  const double s2 = std::pow(std::sin(0.5 * spec.vartheta), 2);
  const cplx em = std::polar(1.0, -spec.Omega);
  const cplx ep = std::polar(1.0, spec.Omega);
  const cplx off = -I_unit * std::sin(spec.Omega) * std::sin(spec.vartheta);
  Operator u(2, 2);
  u << c2 * em + s2 * ep, off, off, s2 * em + c2 * ep;
  return UnitaryMatrix(u);
}

UniversalityResult universality_check(const SingleGateSpec& g1, const SingleGateSpec& g2) {
  UniversalityResult r;
  r.witness = std::sin(g1.Omega) * std::sin(g2.Omega) * std::sin(g1.vartheta - g2.vartheta);
  r.universal = std::abs(r.witness) > kUniversalityThreshold;
  const Operator u1 = closed_form_single(g1).matrix();
  const Operator u2 = closed_form_single(g2).matrix();
  r.commutator_norm = (u1 * u2 - u2 * u1).norm();
  r.commuting = r.commutator_norm <= kUniversalityThreshold;
  return r;
}

double cone_angle_for(double Omega) {
  const double a = std::abs(Omega);
  if (!std::isfinite(Omega) || !(a > 0.0) || !(a < 4.0 * pi)) {
    throw std::invalid_argument("Omega must satisfy 0 < |Omega| < 4 pi (got " +
                                std::to_string(Omega) + ")");
  }
  return std::acos(1.0 - a / (2.0 * pi));
}

nlohmann::json matrix_to_json(const Operator& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ii = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  return {{"base_substeps", r.base_substeps},
          {"distance_coarse", r.distance_coarse},
          {"distance_fine", r.distance_fine},
          {"exact", r.exact},
          {"order", r.order ? nlohmann::json(*r.order) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const GateReport& r) {
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& d : r.phase_report) phases.push_back(to_json(d));
  nlohmann::json out = {{"kind", r.kind},
                        {"spec", r.spec},
                        {"derived", r.derived},
                        {"simulated", matrix_to_json(r.simulated.matrix())},
                        {"target", matrix_to_json(r.target.matrix())},
                        {"distance", r.distance},
                        {"phases", phases},
                        {"max_phase_deviation", r.max_phase_deviation},
                        {"max_dynamical_residual", r.max_dynamical_residual},
                        {"convergence", to_json(r.convergence)}};
  if (r.simulated.dim() == 4) out["leakage"] = r.leakage;
  return out;
}

SegmentSchedule single_gate_schedule(const SingleGateSpec& spec, const SingleGateOptions& opt) {
  if (!std::isfinite(opt.omega) || opt.omega == 0.0) throw std::invalid_argument("omega must be nonzero");
  if (!std::isfinite(spec.vartheta)) throw std::invalid_argument("vartheta must be finite");
  const double theta = cone_angle_for(spec.Omega);
  const LoopParams loop{theta, std::copysign(std::abs(opt.omega), spec.Omega), opt.omega0};
  const double omega_pi = opt.omega_pi > 0.0 ? opt.omega_pi : 50.0 * std::abs(opt.omega);
  return rotate_schedule(build_echo_sequence(loop, omega_pi, opt.idle_gaps), spec.vartheta - theta);
}

GateReport synthesize_single_gate(const SingleGateSpec& spec, const SingleGateOptions& opt,
                                  const StepPolicy& policy) {
  const SegmentSchedule s = single_gate_schedule(spec, opt);
  const double theta = cone_angle_for(spec.Omega);
  const SpinState chi0 = SpinState::normalized(axis_eigenvector(spec.vartheta, 0));
  const SpinState chi1 = SpinState::normalized(axis_eigenvector(spec.vartheta, 1));
  const Trajectory traj = propagate_schedule(s, chi0, policy);

  GateReport r;
  r.kind = "single";
  r.simulated = traj.final_propagator();
  r.target = closed_form_single(spec);
  r.distance = gate_distance_up_to_global_phase(r.simulated, r.target);
  for (int p = 0; p < 2; ++p) {
    const SpinState& chi = p == 0 ? chi0 : chi1;
    const Trajectory tp = p == 0 ? traj : with_initial_state(traj, chi);
    PhaseDecomposition d;
    d.label = EigenLabel::single(p);
    d.total = std::arg(chi.inner(tp.final_state()));
    d.dynamical = dynamical_phase(tp, s);
    // Two -i sigma_y half-turns send phi_0 -> phi_1 -> -phi_0.
    d.pulse = pi;
    d.geometric = wrap_phase(d.total - d.dynamical - d.pulse);
    d.closed_form_geometric = (2 * p - 1) * spec.Omega;
    d.closed_form_dynamical = 0.0;
    r.phase_report.push_back(d);
  }
  summarize_phases(r);
  r.trajectory = traj;
  r.convergence = convergence_report(s, opt.convergence_base);
  r.spec = {{"vartheta", spec.vartheta}, {"Omega", spec.Omega}};
  r.derived = {{"theta", theta},
               {"loop_omega", std::copysign(std::abs(opt.omega), spec.Omega)},
               {"omega0", opt.omega0},
               {"omega_pi", opt.omega_pi > 0.0 ? opt.omega_pi : 50.0 * std::abs(opt.omega)},
               {"rotation_y", spec.vartheta - theta},
               {"total_duration", s.total_duration()}};
  return r;
}

UnitaryMatrix closed_form_two_qubit(const TwoQubitGateSpec& spec, bool basis_substitution) {
  if (!basis_substitution && (spec.vartheta0 != 0.0 || spec.vartheta1 != 0.0)) {
    throw std::invalid_argument("general-vartheta realization unspecified by paper; "
                                "enable basis substitution to build it");
  }
  Operator u = Operator::Zero(4, 4);
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const double sign = (p + q) % 2 == 0 ? 1.0 : -1.0;
      const Amplitudes chi = axis_eigenvector(q == 0 ? spec.vartheta0 : spec.vartheta1, p);
      Amplitudes v = Amplitudes::Zero(4);
      v(q) = chi(0);
      v(2 + q) = chi(1);
      u += std::polar(1.0, 2.0 * sign * spec.DeltaOmega) * v * v.adjoint();
    }
  }
  return UnitaryMatrix(u);
}

TwoQubitGateSpec two_qubit_gate_spec(const TwoQubitParams& p) {
  const double theta = p.theta_tilde();
  const double sign = p.omega > 0.0 ? 1.0 : -1.0;
  return {theta, pi - theta, sign * delta_omega(p)};
}

GateReport synthesize_two_qubit_gate(const TwoQubitParams& p, const StepPolicy& policy,
                                     PiIIMode mode) {
  p.validate();
  const SegmentSchedule s = build_two_qubit_sequence(p, {}, mode);
  const UnitaryMatrix w = two_qubit_eigenbasis(p);
  const auto phi = two_qubit_eigenvectors(p, 0.0);
  const Trajectory traj = propagate_schedule(s, phi[0], policy, 64);
  const TwoQubitGateSpec spec = two_qubit_gate_spec(p);

  GateReport r;
  r.kind = "twoqubit";
  r.simulated = traj.final_propagator();
  r.target = closed_form_two_qubit(spec, true);
  r.distance = gate_distance_up_to_global_phase(r.simulated, r.target);
  const Operator m = w.matrix().adjoint() * r.simulated.matrix() * w.matrix();
  r.leakage = max_off_diagonal(m);
  for (int k = 0; k < 4; ++k) {
    const EigenLabel label = EigenLabel::pair(k / 2, k % 2);
    const Trajectory tk = k == 0 ? traj : with_initial_state(traj, phi[k]);
    PhaseDecomposition d;
    d.label = label;
    d.total = std::arg(m(k, k));
    d.dynamical = dynamical_phase(tk, s);
    d.pulse = 0.0;
    d.geometric = wrap_phase(d.total - d.dynamical);
    d.closed_form_geometric = ((label.p + label.q) % 2 == 0 ? 2.0 : -2.0) * spec.DeltaOmega;
    d.closed_form_dynamical = 0.0;
    r.phase_report.push_back(d);
  }
  summarize_phases(r);
  r.trajectory = traj;
  r.convergence = convergence_report(s, 256);
  r.spec = {{"vartheta0", spec.vartheta0},
            {"vartheta1", spec.vartheta1},
            {"DeltaOmega", spec.DeltaOmega}};
  r.derived = {{"omegaI", p.omegaI},
               {"J", p.J},
               {"omega", p.omega},
               {"omega_pi", p.omega_pi},
               {"theta_tilde", p.theta_tilde()},
               {"Omega_0", solid_angle_q(p, 0)},
               {"Omega_1", solid_angle_q(p, 1)},
               {"pi_II", mode == PiIIMode::ConeSwap ? "cone-swap" : "second-qubit-only"},
               {"total_duration", s.total_duration()}};
  return r;
}

ExpParams experimental_parameter_map(const TwoQubitParams& p) {
  p.validate();
  const double c2 = p.cos_tilde() * p.cos_tilde();
  ExpParams e;
  e.Jxz = -p.omega * p.omegaI * p.J / (p.omegaI * p.omegaI + p.J * p.J);
  e.Jzz = p.J;
  e.omegaIPrime = std::hypot(p.omegaI, p.omega * c2);
  // sin > 0 and cos = -omega cos^2 / omega_I' fix the quadrant.
  e.thetaPrime = std::atan2(p.omegaI, -p.omega * c2);
  return e;
}

double exp_field_deviation(const TwoQubitParams& p, const ExpParams& e, int samples) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const double period = p.period();
  double out = 0.0;
  for (int q = 0; q < 2; ++q) {
    for (int j = 0; j <= samples; ++j) {
      const double t = period * j / samples;
      const Vec3 d = exp_rotating_field(e, p.omega, q, t) - two_qubit_conditional_field(p, q, t);
      out = std::max(out, d.cwiseAbs().maxCoeff());
    }
  }
  return out;
}

ExpEquivalence verify_exp_equivalence(const TwoQubitParams& p, int samples,
                                      const StepPolicy& policy) {
  const ExpParams forward = experimental_parameter_map(p);
  const ExpParams reverse = experimental_parameter_map(p.reversed());
  ExpEquivalence out;
  out.field_deviation = std::max(exp_field_deviation(p, forward, samples),
                                 exp_field_deviation(p.reversed(), reverse, samples));
  const UnitaryMatrix reference = schedule_propagator(build_two_qubit_sequence(p), policy);
  const UnitaryMatrix plain =
      schedule_propagator(build_exp_two_qubit_sequence(p, forward, reverse, false), policy);
  const UnitaryMatrix frame =
      schedule_propagator(build_exp_two_qubit_sequence(p, forward, reverse, true), policy);
  out.gate_distance_plain = gate_distance_up_to_global_phase(plain, reference);
  out.gate_distance_frame = gate_distance_up_to_global_phase(frame, reference);
  return out;
}

double reduced_model_coupling(double gammaI_B0, double gammaII_B0, double J, double theta) {
  const Operator h = build_full_two_qubit_root(gammaI_B0, gammaII_B0, J, theta, 1.0, 0.0).matrix();
  double off = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i % 2 != j % 2) off += std::norm(h(i, j));
  const double total = h.norm();
  return total > 0.0 ? std::sqrt(off) / total : 0.0;
}

}  // namespace tqd
