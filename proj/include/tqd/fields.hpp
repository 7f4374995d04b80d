#pragma once

// Magnetic-field timelines for transitionless spin echo. Every field is
// expressed as gamma*B in angular-frequency units, so a single-qubit
// Hamiltonian is H(t) = (1/2) field(t) . sigma.

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tqd/quantum_core.hpp"

namespace tqd {

// Cone loop of the root field: polar angle theta, signed loop rate omega
// (omega > 0 traces C, omega < 0 traces C-bar) and Larmor frequency omega0.
struct LoopParams {
  double theta = 0.0;
  double omega = 1.0;
  double omega0 = 1.0;

  void validate() const;
  double period() const;  // 2 pi / |omega|
  LoopParams reversed() const { return {theta, -omega, omega0}; }
};

// Resonant rf on qubit I with Ising coupling J to qubit II.
struct TwoQubitParams {
  double omegaI = 1.0;
  double J = 1.0;
  double omega = 0.5;
  double omega_pi = 25.0;

  void validate() const;
  double period() const;
  double cos_tilde() const;  // J / sqrt(omegaI^2 + J^2), signed with J
  double sin_tilde() const;  // omegaI / sqrt(omegaI^2 + J^2) > 0
  double theta_tilde() const;
  TwoQubitParams reversed() const { return {omegaI, J, -omega, omega_pi}; }
};

// Static two-qubit Hamiltonian whose rotating-frame image reproduces the
// conditional TQD fields.
struct ExpParams {
  double Jxz = 0.0;
  double Jzz = 0.0;
  double thetaPrime = 0.0;
  double omegaIPrime = 1.0;
};

// --- single-qubit fields ---------------------------------------------------

Vec3 root_direction(const LoopParams& p, double t);
Vec3 root_field(const LoopParams& p, double t);

// b0 x d(b0)/dt from the analytic cone parametrization.
Vec3 tqd_correction(const LoopParams& p, double t);

using DirectionFn = std::function<Vec3(double)>;

// b0 x d(b0)/dt for an arbitrary unit direction, by central differences with
// step h, checked against h/2. Throws std::invalid_argument if b0(t) is not
// a unit vector within 1e-9 and std::runtime_error if the two estimates
// disagree by more than 1e-9.
Vec3 tqd_correction(const DirectionFn& b0, double t, double h);

Vec3 tqd_field(const LoopParams& p, double t);

// gamma (B_a - B_c): the C loop minus the C-bar loop at equal local time.
Vec3 delta_field(const LoopParams& p, double t);

// Closed-form |tqd_field|: omega0 sqrt(1 + (omega sin(theta) / omega0)^2).
double tqd_field_magnitude(const LoopParams& p);

// R_y(angle) acting on 3-vectors.
Eigen::Matrix3d rotation_y(double angle);

// --- two-qubit fields ------------------------------------------------------

Vec3 two_qubit_root_field(const TwoQubitParams& p, int q, double t);
Vec3 two_qubit_conditional_field(const TwoQubitParams& p, int q, double t);
Vec3 exp_rotating_field(const ExpParams& e, double omega, int q, double t);

// sum_q (1/2) field_q . sigma (x) |q><q|, qubit I is the first factor.
Operator conditional_operator(const Vec3& field0, const Vec3& field1);

// gamma_I B0 . S (x) 1 + 1 (x) gamma_II B0 . S + J sigma_z sigma_z / 2.
HermitianOperator build_full_two_qubit_root(double gammaI_B0, double gammaII_B0, double J,
                                            double theta, double omega, double t);

// Reduced block Hamiltonian sum_q gamma_I B0^(q) . S (x) |q><q|.
HermitianOperator build_reduced_two_qubit_root(const TwoQubitParams& p, double t);

// --- segments and schedules ------------------------------------------------

enum class SegmentLabel { LoopC, LoopCbar, Pi, PiI, PiII, Idle };
std::string to_string(SegmentLabel label);

// How the pi pulse between the two halves of the two-qubit echo is realized.
//  ConeSwap: sigma_y half-turn on qubit II together with a sigma_x half-turn
//    on qubit I. The x half-turn maps the q cone onto the (1-q) cone, which
//    carries phi_{p,q} to phi_{p,1-q}.
//  SecondQubitOnly: sigma_y half-turn on qubit II alone. Leaves qubit I off
//    the new cone unless J = 0, so the echo leaks between eigenstates.
enum class PiIIMode { ConeSwap, SecondQubitOnly };

enum class PulseTarget { Single, QubitI, QubitII, QubitIIConeSwap };

using OperatorFn = std::function<Operator(double)>;
using FieldFn = std::function<Vec3(double)>;

struct SegmentDescription {
  std::string parametrization;
  std::vector<std::pair<std::string, double>> params;
};

struct Segment {
  SegmentLabel label = SegmentLabel::Idle;
  double duration = 0.0;
  int dim = 2;
  OperatorFn generator;    // H(t) on local time [0, duration]
  OperatorFn root;         // reference Hamiltonian for dynamical phases
  FieldFn field;           // dim 2 only
  FieldFn root_field;      // dim 2 only
  bool constant = false;   // generator independent of t
  SegmentDescription description;

  HermitianOperator hamiltonian(double t) const { return HermitianOperator(generator(t)); }
};

struct SegmentSchedule {
  int dim = 2;
  std::vector<Segment> segments;

  double total_duration() const;
  std::vector<std::string> labels() const;
  // Start time of segment k on the global clock.
  double start_time(std::size_t k) const;
};

Segment idle_segment(double duration, int dim);
Segment pi_pulse_segment(double omega_pi, int dim, PulseTarget target);
Segment loop_segment(const LoopParams& p, bool tqd_corrected = true);
Segment two_qubit_loop_segment(const TwoQubitParams& p);
Segment exp_loop_segment(const TwoQubitParams& p, const ExpParams& e, bool frame_term);

// C, idle, pi, idle, C-bar, idle, pi.
SegmentSchedule build_echo_sequence(const LoopParams& p, double omega_pi,
                                    const std::array<double, 3>& idle_gaps = {0.0, 0.0, 0.0});

// Rotates every field of a single-qubit schedule by R_y(angle).
SegmentSchedule rotate_schedule(const SegmentSchedule& s, double angle);

// C, pi_I, C-bar, pi_II, C, pi_I, C-bar, pi_II with idles in between.
SegmentSchedule build_two_qubit_sequence(const TwoQubitParams& p,
                                         const std::array<double, 7>& idle_gaps = {},
                                         PiIIMode mode = PiIIMode::ConeSwap);

// Same sequence driven by the rotating-frame image of the static
// experimental Hamiltonian; `forward` and `reverse` parametrize C and C-bar.
SegmentSchedule build_exp_two_qubit_sequence(const TwoQubitParams& p, const ExpParams& forward,
                                             const ExpParams& reverse, bool frame_term,
                                             const std::array<double, 7>& idle_gaps = {},
                                             PiIIMode mode = PiIIMode::ConeSwap);

struct FieldSample {
  double t;
  std::size_t segment;
  Vec3 field;
};

// Uniform samples (endpoints included) of each segment's field; dim 2 only.
std::vector<FieldSample> field_timeline(const SegmentSchedule& s, int samples_per_segment);

nlohmann::json to_json(const SegmentSchedule& s);

}  // namespace tqd
