#pragma once

// Time-ordered propagation over piecewise schedules with the
// midpoint-exponential product rule
//
//   U = prod_k exp(-i H(t_k + dt/2) dt),  k descending in time,
//
// which is unitary step by step and second-order accurate in dt.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqd/fields.hpp"
#include "tqd/quantum_core.hpp"

namespace tqd {

inline constexpr long kMaxSubsteps = 1L << 20;

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Either a fixed number of substeps per time-dependent segment, or a target
// for the estimated error of the returned propagator. With U(N) and U(2N) the
// estimate is |U(N) - U(2N)|_F / 3 (Richardson, second order); step halving
// stops once it falls below the target.
class StepPolicy {
 public:
  static constexpr double kDefaultTargetError = 1e-8;
  static constexpr long kDefaultInitialSubsteps = 64;

  static StepPolicy fixed(long substeps_per_segment);
  static StepPolicy target(double target_error = kDefaultTargetError,
                           long initial_substeps = kDefaultInitialSubsteps);

  bool is_fixed() const { return substeps_.has_value(); }
  long substeps() const { return *substeps_; }
  double target_error() const { return *target_error_; }
  long initial_substeps() const { return initial_; }

 private:
  StepPolicy() = default;
  std::optional<long> substeps_;
  std::optional<double> target_error_;
  long initial_ = kDefaultInitialSubsteps;
};

struct SegmentPropagation {
  UnitaryMatrix propagator;
  long substeps = 1;
  // Richardson error estimate; zero for constant and fixed-step runs.
  double error_estimate = 0.0;
};

SegmentPropagation propagate_segment_detailed(const Segment& seg, const StepPolicy& policy,
                                              std::size_t index = 0);
UnitaryMatrix propagate_segment(const Segment& seg, const StepPolicy& policy);

// Ordered product of all segment propagators, without sampling.
UnitaryMatrix schedule_propagator(const SegmentSchedule& s, const StepPolicy& policy);

struct Trajectory {
  int dim = 2;
  std::vector<double> times;
  std::vector<SpinState> states;
  std::vector<UnitaryMatrix> propagators;  // cumulative, from t = 0
  std::vector<std::size_t> segment_index;
  std::vector<long> substeps;              // per segment

  std::size_t size() const { return times.size(); }
  const UnitaryMatrix& final_propagator() const { return propagators.back(); }
  const SpinState& final_state() const { return states.back(); }
};

inline constexpr int kDefaultSamplesPerSegment = 256;

// Samples every segment at its endpoints plus uniform interior points, so
// boundary times appear twice (end of one segment, start of the next).
Trajectory propagate_schedule(const SegmentSchedule& s, const SpinState& initial,
                              const StepPolicy& policy,
                              int samples_per_segment = kDefaultSamplesPerSegment);

// Re-applies the cumulative propagators of `traj` to a different initial
// state; cheaper than a second propagation when several labels are needed.
Trajectory with_initial_state(const Trajectory& traj, const SpinState& initial);

struct ConvergenceReport {
  long base_substeps = 0;
  double distance_coarse = 0.0;  // |U(N) - U(2N)|
  double distance_fine = 0.0;    // |U(2N) - U(4N)|
  bool exact = false;            // both distances at rounding level
  std::optional<double> order;   // log2(coarse / fine)
};

inline constexpr double kExactThreshold = 1e-12;

ConvergenceReport convergence_report(const SegmentSchedule& s, long base_substeps);

}  // namespace tqd
