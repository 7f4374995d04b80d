#pragma once

// Geometric gates from echo sequences and their closed forms.
//
// Single qubit: U(vartheta, Omega) = exp(-i Omega n'.sigma), n' = (sin vartheta, 0, cos vartheta).
// Two qubit:    U(vartheta0, vartheta1, dOmega) multiplies chi_pq by
//               exp((-1)^{p+q} 2i dOmega), with chi_pq = chi_p(vartheta_q) (x) |q>.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqd/fields.hpp"
#include "tqd/phase_analysis.hpp"
#include "tqd/propagator.hpp"
#include "tqd/quantum_core.hpp"

namespace tqd {

struct SingleGateSpec {
  double vartheta = 0.0;
  double Omega = 0.0;
};

struct TwoQubitGateSpec {
  double vartheta0 = 0.0;
  double vartheta1 = 0.0;
  double DeltaOmega = 0.0;
};

UnitaryMatrix closed_form_single(const SingleGateSpec& spec);

struct UniversalityResult {
  double witness = 0.0;          // sin(O1) sin(O2) sin(v1 - v2)
  bool universal = false;        // |witness| > 1e-9
  double commutator_norm = 0.0;  // |[U1, U2]|_F of the closed forms
  bool commuting = true;         // commutator_norm <= 1e-9
};

inline constexpr double kUniversalityThreshold = 1e-9;

UniversalityResult universality_check(const SingleGateSpec& g1, const SingleGateSpec& g2);

// Cone angle whose loop encloses |Omega|: arccos(1 - |Omega| / 2 pi).
// Throws std::invalid_argument unless 0 < |Omega| < 4 pi.
double cone_angle_for(double Omega);

struct GateReport {
  std::string kind;
  UnitaryMatrix simulated = UnitaryMatrix::identity(2);
  UnitaryMatrix target = UnitaryMatrix::identity(2);
  double distance = 0.0;  // gate_distance_up_to_global_phase(simulated, target)
  std::vector<PhaseDecomposition> phase_report;
  ConvergenceReport convergence;
  nlohmann::json spec;
  nlohmann::json derived;
  // Two-qubit only: max |(W^dag U W)_kl|, k != l, in the eigenbasis W.
  double leakage = 0.0;
  // Largest geometric_deviation() in the phase table.
  double max_phase_deviation = 0.0;
  // Largest |dynamical| in the phase table; refocused echoes leave ~0.
  double max_dynamical_residual = 0.0;
  // Sampled run from the first label's initial state; not serialized.
  Trajectory trajectory;
};

nlohmann::json to_json(const GateReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json matrix_to_json(const Operator& m);  // {"re": [[...]], "im": [[...]]}

struct SingleGateOptions {
  double omega = 1.0;      // loop rate magnitude
  double omega0 = 1.0;
  double omega_pi = 0.0;   // 0 selects 50 |omega|
  std::array<double, 3> idle_gaps = {0.0, 0.0, 0.0};
  long convergence_base = 256;
};

// Echo schedule C, pi, C-bar, pi for the spec, rotated so its axis is n'.
SegmentSchedule single_gate_schedule(const SingleGateSpec& spec, const SingleGateOptions& opt);

GateReport synthesize_single_gate(const SingleGateSpec& spec, const SingleGateOptions& opt,
                                  const StepPolicy& policy);

// diag(e^{2i dO}, e^{-2i dO}, e^{-2i dO}, e^{2i dO}) for vartheta0 = vartheta1 = 0.
// Nonzero angles throw std::invalid_argument unless basis_substitution is set,
// in which case the gate is built in the chi_pq basis described above.
UnitaryMatrix closed_form_two_qubit(const TwoQubitGateSpec& spec, bool basis_substitution = false);

// The spec realized by the two-qubit echo: eigen-angles theta~ and pi - theta~
// and dOmega = sgn(omega) 2 pi cos(theta~).
TwoQubitGateSpec two_qubit_gate_spec(const TwoQubitParams& p);

GateReport synthesize_two_qubit_gate(const TwoQubitParams& p, const StepPolicy& policy,
                                     PiIIMode mode = PiIIMode::ConeSwap);

ExpParams experimental_parameter_map(const TwoQubitParams& p);

// Max componentwise |exp_rotating_field(e, omega, q, t) - conditional field|
// over q in {0, 1} and `samples` + 1 uniform times on one loop of p.
double exp_field_deviation(const TwoQubitParams& p, const ExpParams& e, int samples);

struct ExpEquivalence {
  double field_deviation = 0.0;        // forward and reverse loops
  double gate_distance_plain = 0.0;    // exp sequence without frame term vs synthesized
  double gate_distance_frame = 0.0;    // exp sequence with frame term vs synthesized
};

ExpEquivalence verify_exp_equivalence(const TwoQubitParams& p, int samples,
                                      const StepPolicy& policy);

// Exploratory: how strongly the full two-spin root couples the qubit-II
// blocks that the reduced model keeps separate. Ratio of the off-block to the
// total Frobenius norm at t = 0. No tolerance is attached to it.
double reduced_model_coupling(double gammaI_B0, double gammaII_B0, double J, double theta);

}  // namespace tqd
