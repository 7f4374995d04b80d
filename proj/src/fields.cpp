#include "tqd/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tqd {

using std::numbers::pi;

namespace {

Operator half_dot(const Vec3& field) { return 0.5 * pauli::dot(field); }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_q(int q) {
  if (q != 0 && q != 1) throw std::invalid_argument("qubit-II index q must be 0 or 1");
}

double sign_q(int q) { return q == 0 ? 1.0 : -1.0; }

}  // namespace

void LoopParams::validate() const {
  require_finite(theta, "theta");
  require_finite(omega, "omega");
  require_finite(omega0, "omega0");
  if (theta < 0.0 || theta > pi) throw std::invalid_argument("theta must lie in [0, pi]");
  if (omega == 0.0) throw std::invalid_argument("omega must be nonzero");
  if (omega0 <= 0.0) throw std::invalid_argument("omega0 must be positive");
}

double LoopParams::period() const { return 2.0 * pi / std::abs(omega); }

void TwoQubitParams::validate() const {
  require_finite(omegaI, "omegaI");
  require_finite(J, "J");
  require_finite(omega, "omega");
  require_finite(omega_pi, "omega_pi");
  if (omegaI <= 0.0) throw std::invalid_argument("omegaI must be positive");
  if (J == 0.0) throw std::invalid_argument("J must be nonzero");
  if (omega == 0.0) throw std::invalid_argument("omega must be nonzero");
  if (omega_pi <= 0.0) throw std::invalid_argument("omega_pi must be positive");
}

double TwoQubitParams::period() const { return 2.0 * pi / std::abs(omega); }
double TwoQubitParams::cos_tilde() const { return J / std::hypot(omegaI, J); }
double TwoQubitParams::sin_tilde() const { return omegaI / std::hypot(omegaI, J); }
double TwoQubitParams::theta_tilde() const { return std::atan2(sin_tilde(), cos_tilde()); }

Vec3 root_direction(const LoopParams& p, double t) {
  const double s = std::sin(p.theta);
  return Vec3(s * std::cos(p.omega * t), s * std::sin(p.omega * t), std::cos(p.theta));
}

Vec3 root_field(const LoopParams& p, double t) { return p.omega0 * root_direction(p, t); }

Vec3 tqd_correction(const LoopParams& p, double t) {
  const double s = std::sin(p.theta);
  const double c = std::cos(p.theta);
  const double wt = p.omega * t;
  return Vec3(-p.omega * s * c * std::cos(wt), -p.omega * s * c * std::sin(wt), p.omega * s * s);
}

Vec3 tqd_correction(const DirectionFn& b0, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("tqd_correction: step must be positive");
  const Vec3 b = b0(t);
  if (std::abs(b.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("tqd_correction: direction is not a unit vector");
  }
  auto central = [&](double step) { return Vec3((b0(t + step) - b0(t - step)) / (2.0 * step)); };
  const Vec3 coarse = b.cross(central(h));
  const Vec3 fine = b.cross(central(0.5 * h));
  if ((fine - coarse).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::runtime_error("tqd_correction: finite difference not stable under step halving");
  }
  return fine;
}

Vec3 tqd_field(const LoopParams& p, double t) {
  const double s = std::sin(p.theta);
  const double c = std::cos(p.theta);
  const double wt = p.omega * t;
  const double radial = (p.omega0 - p.omega * c) * s;
  return Vec3(radial * std::cos(wt), radial * std::sin(wt), p.omega0 * c + p.omega * s * s);
}

Vec3 delta_field(const LoopParams& p, double t) {
  const double s = std::sin(p.theta);
  const double c = std::cos(p.theta);
  const double wt = p.omega * t;
  return 2.0 * s * Vec3(-p.omega * c * std::cos(wt), p.omega0 * std::sin(wt), p.omega * s);
}

double tqd_field_magnitude(const LoopParams& p) {
  const double r = p.omega / p.omega0 * std::sin(p.theta);
  return p.omega0 * std::sqrt(1.0 + r * r);
}

Eigen::Matrix3d rotation_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

Vec3 two_qubit_root_field(const TwoQubitParams& p, int q, double t) {
  require_q(q);
  const double wt = p.omega * t;
  return Vec3(p.omegaI * std::cos(wt), p.omegaI * std::sin(wt), sign_q(q) * p.J);
}

Vec3 two_qubit_conditional_field(const TwoQubitParams& p, int q, double t) {
  require_q(q);
  const double s = p.sin_tilde();
  const double c = p.cos_tilde();
  const double wt = p.omega * t;
  const double radial = p.omegaI - sign_q(q) * p.omega * s * c;
  return Vec3(radial * std::cos(wt), radial * std::sin(wt), sign_q(q) * p.J + p.omega * s * s);
}

Vec3 exp_rotating_field(const ExpParams& e, double omega, int q, double t) {
  require_q(q);
  const double wt = omega * t;
  const double radial = e.omegaIPrime * std::sin(e.thetaPrime) + sign_q(q) * e.Jxz;
  return Vec3(radial * std::cos(wt), radial * std::sin(wt),
              e.omegaIPrime * std::cos(e.thetaPrime) + omega + sign_q(q) * e.Jzz);
}

Operator conditional_operator(const Vec3& field0, const Vec3& field1) {
  Operator h = Operator::Zero(4, 4);
  const Operator h0 = half_dot(field0);
  const Operator h1 = half_dot(field1);
  // Index 2a + b with a the qubit-I and b the qubit-II computational label.
  for (int a = 0; a < 2; ++a) {
    for (int a2 = 0; a2 < 2; ++a2) {
      h(2 * a, 2 * a2) = h0(a, a2);
      h(2 * a + 1, 2 * a2 + 1) = h1(a, a2);
    }
  }
  return h;
}

HermitianOperator build_full_two_qubit_root(double gammaI_B0, double gammaII_B0, double J,
                                            double theta, double omega, double t) {
  const Vec3 b = root_direction({theta, omega, 1.0}, t);
  const Operator one = pauli::identity(2);
  Operator h = tensor_product(0.5 * gammaI_B0 * pauli::dot(b), one) +
               tensor_product(one, 0.5 * gammaII_B0 * pauli::dot(b)) +
               0.5 * J * tensor_product(pauli::z(), pauli::z());
  return HermitianOperator(h);
}

HermitianOperator build_reduced_two_qubit_root(const TwoQubitParams& p, double t) {
  return HermitianOperator(conditional_operator(two_qubit_root_field(p, 0, t),
                                                two_qubit_root_field(p, 1, t)));
}

std::string to_string(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::LoopC: return "loop-C";
    case SegmentLabel::LoopCbar: return "loop-Cbar";
    case SegmentLabel::Pi: return "pi";
    case SegmentLabel::PiI: return "pi-I";
    case SegmentLabel::PiII: return "pi-II";
    case SegmentLabel::Idle: return "idle";
  }
  return "unknown";
}

double SegmentSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

std::vector<std::string> SegmentSchedule::labels() const {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) out.push_back(to_string(seg.label));
  return out;
}

double SegmentSchedule::start_time(std::size_t k) const {
  double t = 0.0;
  for (std::size_t i = 0; i < k && i < segments.size(); ++i) t += segments[i].duration;
  return t;
}

Segment idle_segment(double duration, int dim) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("idle segment duration must be finite and >= 0");
  }
  if (dim != 2 && dim != 4) throw DimensionError("idle segment: dimension must be 2 or 4");
  Segment seg;
  seg.label = SegmentLabel::Idle;
  seg.duration = duration;
  seg.dim = dim;
  seg.constant = true;
  seg.generator = [dim](double) { return Operator(Operator::Zero(dim, dim)); };
  seg.root = seg.generator;
  if (dim == 2) {
    seg.field = [](double) { return Vec3(Vec3::Zero()); };
    seg.root_field = seg.field;
  }
  seg.description = {"idle", {}};
  return seg;
}

Segment pi_pulse_segment(double omega_pi, int dim, PulseTarget target) {
  if (!(omega_pi > 0.0) || !std::isfinite(omega_pi)) {
    throw std::invalid_argument("omega_pi must be positive");
  }
  Segment seg;
  seg.duration = pi / omega_pi;
  seg.dim = dim;
  seg.constant = true;
  Operator h;
  if (dim == 2) {
    if (target != PulseTarget::Single) {
      throw std::invalid_argument("pi pulse: single-qubit schedule needs target 'single'");
    }
    seg.label = SegmentLabel::Pi;
    const Vec3 field(0.0, omega_pi, 0.0);
    h = half_dot(field);
    seg.field = [field](double) { return field; };
    seg.root_field = [](double) { return Vec3(Vec3::Zero()); };
    seg.description = {"pi-pulse-y", {{"omega_pi", omega_pi}}};
  } else if (dim == 4) {
    const Operator one = pauli::identity(2);
    switch (target) {
      case PulseTarget::Single:
        throw std::invalid_argument("pi pulse: target 'single' is invalid for a two-qubit schedule");
      case PulseTarget::QubitI:
        seg.label = SegmentLabel::PiI;
        h = 0.5 * omega_pi * tensor_product(pauli::y(), one);
        seg.description = {"pi-pulse-y-on-I", {{"omega_pi", omega_pi}}};
        break;
      case PulseTarget::QubitII:
        seg.label = SegmentLabel::PiII;
        h = 0.5 * omega_pi * tensor_product(one, pauli::y());
        seg.description = {"pi-pulse-y-on-II", {{"omega_pi", omega_pi}}};
        break;
      case PulseTarget::QubitIIConeSwap:
        seg.label = SegmentLabel::PiII;
        h = 0.5 * omega_pi * (tensor_product(pauli::x(), one) + tensor_product(one, pauli::y()));
        seg.description = {"pi-pulse-y-on-II-x-on-I", {{"omega_pi", omega_pi}}};
        break;
    }
  } else {
    throw DimensionError("pi pulse: dimension must be 2 or 4");
  }
  seg.generator = [h](double) { return h; };
  // Pulses carry no root Hamiltonian, so they add nothing to dynamical phases.
  seg.root = [dim](double) { return Operator(Operator::Zero(dim, dim)); };
  return seg;
}

Segment loop_segment(const LoopParams& p, bool tqd_corrected) {
  p.validate();
  Segment seg;
  seg.label = SegmentLabel::LoopC;
  seg.duration = p.period();
  seg.dim = 2;
  seg.root_field = [p](double t) { return root_field(p, t); };
  if (tqd_corrected) {
    seg.field = [p](double t) { return tqd_field(p, t); };
  } else {
    seg.field = seg.root_field;
  }
  seg.generator = [f = seg.field](double t) { return half_dot(f(t)); };
  seg.root = [f = seg.root_field](double t) { return half_dot(f(t)); };
  seg.description = {tqd_corrected ? "tqd-cone" : "root-cone",
                     {{"theta", p.theta}, {"omega", p.omega}, {"omega0", p.omega0}}};
  return seg;
}

Segment two_qubit_loop_segment(const TwoQubitParams& p) {
  p.validate();
  Segment seg;
  seg.label = SegmentLabel::LoopC;
  seg.duration = p.period();
  seg.dim = 4;
  seg.generator = [p](double t) {
    return conditional_operator(two_qubit_conditional_field(p, 0, t),
                                two_qubit_conditional_field(p, 1, t));
  };
  seg.root = [p](double t) { return build_reduced_two_qubit_root(p, t).matrix(); };
  seg.description = {"tqd-conditional-cone",
                     {{"omegaI", p.omegaI}, {"J", p.J}, {"omega", p.omega}}};
  return seg;
}

Segment exp_loop_segment(const TwoQubitParams& p, const ExpParams& e, bool frame_term) {
  p.validate();
  Segment seg;
  seg.label = SegmentLabel::LoopC;
  seg.duration = p.period();
  seg.dim = 4;
  const double w = p.omega;
  const Operator frame =
      frame_term ? Operator(0.5 * w * tensor_product(pauli::identity(2), pauli::z()))
                 : Operator(Operator::Zero(4, 4));
  seg.generator = [e, w, frame](double t) {
    return Operator(conditional_operator(exp_rotating_field(e, w, 0, t),
                                         exp_rotating_field(e, w, 1, t)) +
                    frame);
  };
  seg.root = [p](double t) { return build_reduced_two_qubit_root(p, t).matrix(); };
  seg.description = {frame_term ? "exp-rotating-frame-with-frame-term" : "exp-rotating-frame",
                     {{"omega", w},
                      {"Jxz", e.Jxz},
                      {"Jzz", e.Jzz},
                      {"thetaPrime", e.thetaPrime},
                      {"omegaIPrime", e.omegaIPrime}}};
  return seg;
}

SegmentSchedule build_echo_sequence(const LoopParams& p, double omega_pi,
                                    const std::array<double, 3>& idle_gaps) {
  p.validate();
  SegmentSchedule s;
  s.dim = 2;
  Segment forward = loop_segment(p);
  Segment backward = loop_segment(p.reversed());
  backward.label = SegmentLabel::LoopCbar;
  const Segment pulse = pi_pulse_segment(omega_pi, 2, PulseTarget::Single);
  s.segments = {forward, idle_segment(idle_gaps[0], 2), pulse, idle_segment(idle_gaps[1], 2),
                backward, idle_segment(idle_gaps[2], 2), pulse};
  return s;
}

SegmentSchedule rotate_schedule(const SegmentSchedule& s, double angle) {
  if (s.dim != 2) {
    throw DimensionError("rotate_schedule: only single-qubit schedules carry rotatable fields");
  }
  const Eigen::Matrix3d r = rotation_y(angle);
  SegmentSchedule out = s;
  for (auto& seg : out.segments) {
    if (!seg.field || !seg.root_field) {
      throw std::invalid_argument("rotate_schedule: segment without a field parametrization");
    }
    seg.field = [r, f = seg.field](double t) { return Vec3(r * f(t)); };
    seg.root_field = [r, f = seg.root_field](double t) { return Vec3(r * f(t)); };
    seg.generator = [f = seg.field](double t) { return half_dot(f(t)); };
    seg.root = [f = seg.root_field](double t) { return half_dot(f(t)); };
    auto& params = seg.description.params;
    bool found = false;
    for (auto& [key, value] : params) {
      if (key == "rotation_y") {
        value += angle;
        found = true;
      }
    }
    if (!found) params.emplace_back("rotation_y", angle);
  }
  return out;
}

namespace {

SegmentSchedule assemble_two_qubit(const TwoQubitParams& p, Segment forward, Segment backward,
                                   const std::array<double, 7>& idle_gaps, PiIIMode mode) {
  backward.label = SegmentLabel::LoopCbar;
  const Segment pulse_i = pi_pulse_segment(p.omega_pi, 4, PulseTarget::QubitI);
  const Segment pulse_ii = pi_pulse_segment(
      p.omega_pi, 4,
      mode == PiIIMode::ConeSwap ? PulseTarget::QubitIIConeSwap : PulseTarget::QubitII);
  const std::array<const Segment*, 8> order = {&forward, &pulse_i, &backward, &pulse_ii,
                                               &forward, &pulse_i, &backward, &pulse_ii};
  SegmentSchedule s;
  s.dim = 4;
  for (std::size_t k = 0; k < order.size(); ++k) {
    s.segments.push_back(*order[k]);
    if (k + 1 < order.size()) s.segments.push_back(idle_segment(idle_gaps[k], 4));
  }
  return s;
}

}  // namespace

SegmentSchedule build_two_qubit_sequence(const TwoQubitParams& p,
                                         const std::array<double, 7>& idle_gaps, PiIIMode mode) {
  p.validate();
  return assemble_two_qubit(p, two_qubit_loop_segment(p), two_qubit_loop_segment(p.reversed()),
                            idle_gaps, mode);
}

SegmentSchedule build_exp_two_qubit_sequence(const TwoQubitParams& p, const ExpParams& forward,
                                             const ExpParams& reverse, bool frame_term,
                                             const std::array<double, 7>& idle_gaps,
                                             PiIIMode mode) {
  p.validate();
  return assemble_two_qubit(p, exp_loop_segment(p, forward, frame_term),
                            exp_loop_segment(p.reversed(), reverse, frame_term), idle_gaps, mode);
}

std::vector<FieldSample> field_timeline(const SegmentSchedule& s, int samples_per_segment) {
  if (s.dim != 2) throw DimensionError("field_timeline: only single-qubit schedules");
  if (samples_per_segment < 1) throw std::invalid_argument("field_timeline: samples must be >= 1");
  std::vector<FieldSample> out;
  double start = 0.0;
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    const Segment& seg = s.segments[k];
    const int n = seg.duration > 0.0 ? samples_per_segment : 0;
    for (int j = 0; j <= n; ++j) {
      const double local = n == 0 ? 0.0 : seg.duration * j / n;
      out.push_back({start + local, k, seg.field(local)});
    }
    start += seg.duration;
  }
  return out;
}

nlohmann::json to_json(const SegmentSchedule& s) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& seg : s.segments) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [key, value] : seg.description.params) params[key] = value;
    segments.push_back({{"label", to_string(seg.label)},
                        {"duration", seg.duration},
                        {"parametrization", seg.description.parametrization},
                        {"params", params}});
  }
  return {{"dim", s.dim}, {"total_duration", s.total_duration()}, {"segments", segments}};
}

}  // namespace tqd
