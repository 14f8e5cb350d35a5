#include "elasticlane/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

namespace elasticlane {

void EvolutionConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw InvalidArgument("step size must be positive");
  }
  if (max_steps < 1) throw InvalidArgument("max_steps must be at least 1");
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (reinit_every < 0) throw InvalidArgument("reinit_every must be nonnegative");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  if (!(stop_tol >= 0.0)) throw InvalidArgument("stop_tol must be nonnegative");
  if (!(stall_rise >= 0.0)) throw InvalidArgument("stall_rise must be nonnegative");
}

double stable_step_size(const GridShape& shape, double alpha) {
  return 2.0 / (alpha * alpha * frequency_kernel(shape).max_magnitude());
}

double max_lane_error(const LanePolyline& pred, const LanePolyline& ref, double missing_penalty) {
  double worst = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (!ref.valid[i]) continue;
    while (j < pred.size() && pred.rows[j] < ref.rows[i]) ++j;
    const bool hit = j < pred.size() && pred.rows[j] == ref.rows[i] && pred.valid[j];
    worst = std::max(worst, hit ? std::abs(pred.xs[j] - ref.xs[i]) : missing_penalty);
  }
  return worst;
}

namespace {

double spectral_energy(const Spectrum& d, const FrequencyKernel& kernel) {
  const auto c = d.coefficients();
  const auto k = kernel.magnitudes();
  double energy = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) energy += k[i] * std::norm(c[i]);
  return energy;
}

Field2D half_kernel_apply(Spectrum d, const FrequencyKernel& kernel) {
  auto c = d.coefficients();
  const auto k = kernel.magnitudes();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= 0.5 * k[i];
  return dft_inverse(d);
}

// Shared stepping and recording. Every step is a trial:
//   propose(step) -> energy of the trial state
//   commit()      -> makes the trial state current
//   observe(trace) -> appends lane error (and snapshots) for the current state
// A trial that raises the energy is never committed, so recorded energies
// are nonincreasing within kEnergySlack. Redistancing steps are projections,
// not descent steps, and are exempt from both the rise and the stop test.
template <typename Propose, typename Commit, typename Observe>
void run_flow(const EvolutionConfig& cfg, int projection_every, double initial_energy,
              Propose&& propose, Commit&& commit, Observe&& observe, EvolutionTrace& trace) {
  auto record = [&](int step, double energy) {
    trace.steps.push_back(step);
    trace.energies.push_back(energy);
    observe(trace);
  };

  double energy = initial_energy;
  record(0, energy);
  int step = 0;
  bool recorded_last = true;
  while (step < cfg.max_steps) {
    const double trial = propose(step + 1);
    if (!std::isfinite(trial)) {
      std::ostringstream msg;
      msg << "energy became non-finite at step " << step + 1 << " with step size "
          << cfg.step_size;
      throw DivergenceError(msg.str(), cfg.step_size, step + 1);
    }
    const double rise = trial - energy;
    const bool projection = projection_every > 0 && (step + 1) % projection_every == 0;
    if (rise > kEnergySlack && !projection) {
      const double relative = rise / std::max(std::abs(energy), kEnergySlack);
      if (relative <= cfg.stall_rise) {
        trace.converged = true;
        trace.stalled = true;
        break;
      }
      std::ostringstream msg;
      msg << "energy rose by " << relative * 100.0 << "% at step " << step + 1
          << "; step size " << cfg.step_size << " is too large";
      throw DivergenceError(msg.str(), cfg.step_size, step + 1);
    }
    commit();
    ++step;
    energy = trial;
    recorded_last = step % cfg.record_every == 0;
    if (recorded_last) record(step, energy);
    if (!projection && -rise < cfg.stop_tol) {
      trace.converged = true;
      break;
    }
  }
  if (!recorded_last) record(step, energy);
  trace.steps_taken = step;
}

double curve_velocity(const Field2D& g, double x, int row, const EvolutionConfig& cfg) {
  if (cfg.sampling == VelocitySampling::Bilinear) {
    return sample_bilinear(g, x, static_cast<double>(row));
  }
  const double weight = 0.5 / cfg.sigma;
  const int lo = std::max(0, static_cast<int>(std::floor(x - cfg.sigma)));
  const int hi = std::min(g.width() - 1, static_cast<int>(std::ceil(x + cfg.sigma)));
  double sum = 0.0;
  for (int px = lo; px <= hi; ++px) {
    if (std::abs(static_cast<double>(px) - x) < cfg.sigma) sum += weight * g(px, row);
  }
  return sum;
}

void clamp_psi(Field2D& psi) {
  for (double& v : psi.values()) v = std::clamp(v, -0.5, 0.5);
}

// Decoded shift between two lanes over rows valid in both.
double decoded_shift(const LanePolyline& a, const LanePolyline& b) {
  double shift = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a.valid[i] && b.valid[i]) shift = std::max(shift, std::abs(a.xs[i] - b.xs[i]));
  }
  return shift;
}

}  // namespace

EvolutionTrace evolve_implicit(const Field2D& psi_init, const Field2D& gt, const RangeMask& mask,
                               const EvolutionConfig& cfg) {
  cfg.validate();
  if (psi_init.shape() != gt.shape()) throw ShapeMismatch("evolve_implicit: shape mismatch");
  if (static_cast<int>(mask.size()) != gt.height()) {
    throw ShapeMismatch("evolve_implicit: range mask length differs from grid height");
  }
  const GridShape shape = gt.shape();
  const EieParams eie(cfg.alpha);
  const HeavisideParams heaviside_params(cfg.sigma);
  const FrequencyKernel kernel = frequency_kernel(shape);
  const LanePolyline reference = decode_lane(gt, mask);
  const RangeMask all_rows = RangeMask::full(shape.height());
  const double missing = static_cast<double>(shape.width());

  Field2D psi = psi_init;
  Spectrum d = dft_forward(difference_field(gt, psi, eie));
  Field2D trial_psi = psi;
  Spectrum trial_d = d;
  std::optional<double> trial_shift;

  EvolutionTrace trace;
  auto propose = [&](int step) {
    const Field2D g = half_kernel_apply(d, kernel);
    trial_psi = psi;
    auto values = trial_psi.values();
    const auto gv = g.values();
    const double scale = cfg.step_size * cfg.alpha;
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += scale * gv[i];
    if (cfg.clamp) clamp_psi(trial_psi);

    trial_shift.reset();
    if (cfg.reinit_every > 0 && step % cfg.reinit_every == 0) {
      const LanePolyline before = decode_lane(trial_psi, all_rows);
      if (before.valid_count() >= 2) {
        trial_psi = encode_lane(before, shape, heaviside_params).psi;
        trial_shift = decoded_shift(before, decode_lane(trial_psi, all_rows));
      }
    }
    trial_d = dft_forward(difference_field(gt, trial_psi, eie));
    return spectral_energy(trial_d, kernel);
  };
  auto commit = [&] {
    std::swap(psi, trial_psi);
    std::swap(d, trial_d);
    if (trial_shift) trace.reinit_shifts.push_back(*trial_shift);
  };
  auto observe = [&](EvolutionTrace& t) {
    LanePolyline lane = decode_lane(psi, mask);
    t.lane_errors.push_back(max_lane_error(lane, reference, missing));
    if (cfg.keep_snapshots) {
      t.field_snapshots.push_back(psi);
      t.lane_snapshots.push_back(std::move(lane));
    }
  };

  run_flow(cfg, cfg.reinit_every, spectral_energy(d, kernel), propose, commit, observe, trace);
  trace.final_lane = decode_lane(psi, mask);
  trace.final_field = psi;
  return trace;
}

EvolutionTrace evolve_explicit(const LanePolyline& x_init, const LanePolyline& gt,
                               const GridShape& shape, const EvolutionConfig& cfg) {
  cfg.validate();
  x_init.validate();
  gt.validate();
  if (x_init.rows != gt.rows || x_init.valid != gt.valid) {
    throw InvalidArgument("evolve_explicit: prediction and ground truth must share valid rows");
  }
  const EieParams eie(cfg.alpha);
  const HeavisideParams heaviside_params(cfg.sigma);
  const FrequencyKernel kernel = frequency_kernel(shape);
  const Field2D gt_psi = encode_lane(gt, shape, heaviside_params).psi;
  const double x_max = static_cast<double>(shape.width() - 1);

  LanePolyline lane = x_init;
  auto spectrum_of = [&](const LanePolyline& l) {
    return dft_forward(difference_field(gt_psi, encode_lane(l, shape, heaviside_params).psi, eie));
  };
  Spectrum d = spectrum_of(lane);
  LanePolyline trial_lane = lane;
  Spectrum trial_d = d;
  int trial_clamped = 0;

  EvolutionTrace trace;
  auto propose = [&](int) {
    // velocity v = -eie_gradient(D), read on the curve, projected on x
    const Field2D g = half_kernel_apply(d, kernel);
    trial_lane = lane;
    trial_clamped = 0;
    for (std::size_t i = 0; i < lane.size(); ++i) {
      if (!lane.valid[i]) continue;
      const double v = -curve_velocity(g, lane.xs[i], lane.rows[i], cfg);
      double x = lane.xs[i] + cfg.step_size * cfg.alpha * v;
      if (x < 0.0 || x > x_max) {
        x = std::clamp(x, 0.0, x_max);
        ++trial_clamped;
      }
      trial_lane.xs[i] = x;
    }
    trial_d = spectrum_of(trial_lane);
    return spectral_energy(trial_d, kernel);
  };
  auto commit = [&] {
    std::swap(lane, trial_lane);
    std::swap(d, trial_d);
    trace.clamped_samples += trial_clamped;
  };
  auto observe = [&](EvolutionTrace& t) {
    t.lane_errors.push_back(max_lane_error(lane, gt, static_cast<double>(shape.width())));
    if (cfg.keep_snapshots) {
      t.lane_snapshots.push_back(lane);
      t.field_snapshots.push_back(encode_lane(lane, shape, heaviside_params).psi);
    }
  };

  run_flow(cfg, 0, spectral_energy(d, kernel), propose, commit, observe, trace);
  trace.final_lane = lane;
  trace.final_field = encode_lane(lane, shape, heaviside_params).psi;
  return trace;
}

EvolutionTrace evolve_implicit_mse(const Field2D& phi_init, const Field2D& gt,
                                   const RangeMask& mask, const EvolutionConfig& cfg) {
  cfg.validate();
  if (phi_init.shape() != gt.shape()) throw ShapeMismatch("evolve_implicit_mse: shape mismatch");
  if (static_cast<int>(mask.size()) != gt.height()) {
    throw ShapeMismatch("evolve_implicit_mse: range mask length differs from grid height");
  }
  const HeavisideParams heaviside_params(cfg.sigma);
  const LanePolyline reference = decode_lane(gt, mask);
  const double missing = static_cast<double>(gt.width());
  const double pixels = static_cast<double>(gt.shape().size());

  Field2D phi = phi_init;
  Field2D psi = psi_from_level_set(phi, heaviside_params);
  Field2D trial_phi = phi;
  Field2D trial_psi = psi;

  EvolutionTrace trace;
  auto propose = [&](int) {
    const Field2D grad = mse_gradient_wrt_phi(gt, psi, phi, heaviside_params);
    trial_phi = phi;
    auto values = trial_phi.values();
    const auto gv = grad.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= cfg.step_size * pixels * gv[i];
    trial_psi = psi_from_level_set(trial_phi, heaviside_params);
    return mse_energy(gt, trial_psi);
  };
  auto commit = [&] {
    std::swap(phi, trial_phi);
    std::swap(psi, trial_psi);
  };
  auto observe = [&](EvolutionTrace& t) {
    LanePolyline lane = decode_lane(psi, mask);
    t.lane_errors.push_back(max_lane_error(lane, reference, missing));
    if (cfg.keep_snapshots) {
      t.field_snapshots.push_back(psi);
      t.lane_snapshots.push_back(std::move(lane));
    }
  };

  run_flow(cfg, 0, mse_energy(gt, psi), propose, commit, observe, trace);
  trace.final_lane = decode_lane(psi, mask);
  trace.final_field = psi;
  return trace;
}

DeltaField delta_field(const LanePolyline& lane, double sigma, const GridShape& shape) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  lane.validate();
  Field2D delta(shape);
  const double height = 0.5 / sigma;
  for (std::size_t i = 0; i < lane.size(); ++i) {
    if (!lane.valid[i] || lane.rows[i] < 0 || lane.rows[i] >= shape.height()) continue;
    for (int x = 0; x < shape.width(); ++x) {
      if (std::abs(static_cast<double>(x) - lane.xs[i]) < sigma) delta(x, lane.rows[i]) = height;
    }
  }
  return {std::move(delta)};
}

double sample_bilinear(const Field2D& f, double x, double y) noexcept {
  const double xc = std::clamp(x, 0.0, static_cast<double>(f.width() - 1));
  const double yc = std::clamp(y, 0.0, static_cast<double>(f.height() - 1));
  const int x0 = static_cast<int>(std::floor(xc));
  const int y0 = static_cast<int>(std::floor(yc));
  const int x1 = std::min(x0 + 1, f.width() - 1);
  const int y1 = std::min(y0 + 1, f.height() - 1);
  const double tx = xc - x0;
  const double ty = yc - y0;
  const double top = (1.0 - tx) * f(x0, y0) + tx * f(x1, y0);
  const double bottom = (1.0 - tx) * f(x0, y1) + tx * f(x1, y1);
  return (1.0 - ty) * top + ty * bottom;
}

}  // namespace elasticlane
