#pragma once

// Instantaneous eigenbases of the root Hamiltonians and the split of
// accumulated phase into dynamical and geometric parts.
//
// Conventions: Schroedinger evolution exp(-iHt); dynamical phase
// -int <psi|H0|psi> dt; label p = 0 is the +1 eigenvector of b0 . sigma.
// Over one loop with omega > 0 the Berry phase of label p is (2p-1) Omega/2.

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tqd/fields.hpp"
#include "tqd/propagator.hpp"
#include "tqd/quantum_core.hpp"

namespace tqd {

// p labels the qubit-I eigenstate; q (two-qubit only) the qubit-II block.
struct EigenLabel {
  int p = 0;
  int q = -1;  // -1 for single-qubit labels

  static EigenLabel single(int p);
  static EigenLabel pair(int p, int q);
  bool is_pair() const { return q >= 0; }
  int index() const { return is_pair() ? 2 * p + q : p; }  // basis column
  std::string name() const;
};

struct PhaseDecomposition {
  EigenLabel label;
  double total = 0.0;
  double dynamical = 0.0;
  double geometric = 0.0;            // total - dynamical - pulse
  double pulse = 0.0;                // known sign picked up from pi pulses
  double closed_form_geometric = 0.0;
  double closed_form_dynamical = 0.0;

  // Deviations taken modulo 2 pi; geometric phases are defined only mod 2 pi.
  double geometric_deviation() const;
  double dynamical_deviation() const;
};

nlohmann::json to_json(const PhaseDecomposition& d);

// Wraps into (-pi, pi].
double wrap_phase(double phase);
double phase_distance(double a, double b);  // |wrap(a - b)|

// phi_0(t) = (cos(theta/2), e^{i omega t} sin(theta/2)),
// phi_1(t) = (-sin(theta/2), e^{i omega t} cos(theta/2)).
std::pair<SpinState, SpinState> instantaneous_eigenvectors(double theta, double omega, double t);

// phi_pq(t) in label order 00, 01, 10, 11 (index 2p + q).
std::array<SpinState, 4> two_qubit_eigenvectors(const TwoQubitParams& p, double t);

// Columns phi_pq(0) in label order; unitary change of basis.
UnitaryMatrix two_qubit_eigenbasis(const TwoQubitParams& p);

using EigenvectorFn = std::function<SpinState(double)>;

EigenvectorFn loop_eigenvector(const LoopParams& params, int p);
EigenvectorFn two_qubit_eigenvector(const TwoQubitParams& params, EigenLabel label);

class TrackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// F(t) = |<phi(t)|psi(t)>|^2 at every sample. Throws TrackingError when the
// trajectory does not start in phi(0) (overlap defect above 1e-9).
std::vector<double> tracking_fidelity(const Trajectory& traj, const EigenvectorFn& phi);

// -int <psi|H0|psi> dt by the trapezoid rule, H0 given on the global clock.
double dynamical_phase(const Trajectory& traj, const OperatorFn& root);

// Same, with each sample weighted by the root of its own segment on the
// segment's local clock. Pulses and idles have a zero root.
double dynamical_phase(const Trajectory& traj, const SegmentSchedule& s);

// Continuous unwrap of arg <phi(t)|psi(t)> along the samples, from f(0) = 0.
// Throws TrackingError if the fidelity drops below min_fidelity or if two
// adjacent samples differ by pi/4 or more (sampling too sparse).
double total_phase(const Trajectory& traj, const EigenvectorFn& phi,
                   double min_fidelity = 1.0 - 1e-6);

// Solid angle of the cone loop with polar angle theta.
double solid_angle(double theta);
double solid_angle_q(const TwoQubitParams& p, int q);
// (Omega_1 - Omega_0) / 2 = 2 pi cos(theta~).
double delta_omega(const TwoQubitParams& p);

// Tr{[b0 x db0/dt] . sigma rho(t)} with rho = (1 + sign b0 . sigma)/2.
double correction_energy_check(const LoopParams& p, int sign, double t);

// Closed-form one-loop phases for label p.
double loop_dynamical_phase(const LoopParams& p, int label);
double loop_geometric_phase(const LoopParams& p, int label);

// Samples per loop that keep adjacent phase steps well below pi/4.
int unwrap_samples(const LoopParams& p, int minimum = kDefaultSamplesPerSegment);

// Propagates one loop from phi_label(0) and decomposes its phase.
struct LoopPhaseRun {
  Trajectory trajectory;
  PhaseDecomposition phases;
  double min_fidelity = 0.0;
};
LoopPhaseRun loop_phase_run(const LoopParams& p, int label, const StepPolicy& policy,
                            bool tqd_corrected = true);

}  // namespace tqd
