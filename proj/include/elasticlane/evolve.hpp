#pragma once

// Gradient-flow simulation of a predicted lane attracted to its ground truth
// under the elastic interaction energy.
//
// Implicit mode evolves the whole ELM field psi; explicit mode moves the
// per-row x samples of the prediction along x, re-encoding psi from them at
// every step.

#include <optional>
#include <vector>

#include "elasticlane/elm.hpp"
#include "elasticlane/energy.hpp"
#include "elasticlane/field.hpp"

namespace elasticlane {

enum class EvolutionMode { Implicit, Explicit };

/// How explicit mode reads the velocity field at a lane sample.
enum class VelocitySampling {
  /// Bilinear point sample at (x_m, y_m).
  Bilinear,
  /// Sum of v weighted by the regularised delta around x_m on row y_m; the
  /// exact derivative of the discrete energy with respect to x_m.
  DeltaWeighted,
};

struct EvolutionConfig {
  EvolutionMode mode = EvolutionMode::Implicit;
  VelocitySampling sampling = VelocitySampling::Bilinear;
  double step_size = 0.1;
  int max_steps = 5000;
  double alpha = 0.5;
  double sigma = 3.0;
  bool clamp = true;
  /// Decode/re-encode psi every this many steps; 0 disables.
  int reinit_every = 0;
  int record_every = 1;
  /// Stop once a step lowers the energy by less than this.
  double stop_tol = 1e-10;
  /// A step that raises the energy is rolled back and ends the run. Relative
  /// rises up to this bound are overshoot across a minimum (the run stalls
  /// converged); larger rises mean the step size is too large.
  double stall_rise = 1e-2;
  bool keep_snapshots = false;

  void validate() const;
};

/// Energy rise tolerated between steps before it counts as an increase.
inline constexpr double kEnergySlack = 1e-9;

struct EvolutionTrace {
  std::vector<int> steps;
  std::vector<double> energies;
  std::vector<double> lane_errors;
  std::vector<Field2D> field_snapshots;
  std::vector<LanePolyline> lane_snapshots;

  /// Accepted steps.
  int steps_taken = 0;
  bool converged = false;
  /// Converged because the next step overshot the minimum.
  bool stalled = false;
  /// Explicit mode: samples pushed back inside the grid.
  int clamped_samples = 0;
  /// Max decoded-lane shift caused by each redistancing.
  std::vector<double> reinit_shifts;

  LanePolyline final_lane;
  std::optional<Field2D> final_field;

  std::size_t size() const noexcept { return energies.size(); }
};

/// Regularised curve delta: 1/(2 sigma) within sigma of each sampled x.
struct DeltaField {
  Field2D field;
};

/// Largest step for which the clamped implicit flow provably never raises
/// the energy: 2 / (alpha^2 * max sqrt(m^2+n^2)).
double stable_step_size(const GridShape& shape, double alpha);

/// Max |x_pred - x_ref| over rows valid in ref; a ref row the prediction
/// misses contributes `missing_penalty`.
double max_lane_error(const LanePolyline& pred, const LanePolyline& ref, double missing_penalty);

EvolutionTrace evolve_implicit(const Field2D& psi_init, const Field2D& gt, const RangeMask& mask,
                               const EvolutionConfig& cfg);

EvolutionTrace evolve_explicit(const LanePolyline& x_init, const LanePolyline& gt,
                               const GridShape& shape, const EvolutionConfig& cfg);

/// Baseline flow for the ELM-MSE comparison: phi <- phi - h * P * dMSE/dphi.
/// Records mse_energy.
EvolutionTrace evolve_implicit_mse(const Field2D& phi_init, const Field2D& gt,
                                   const RangeMask& mask, const EvolutionConfig& cfg);

DeltaField delta_field(const LanePolyline& lane, double sigma, const GridShape& shape);

/// Bilinear interpolation with border clamping.
double sample_bilinear(const Field2D& f, double x, double y) noexcept;

}  // namespace elasticlane
