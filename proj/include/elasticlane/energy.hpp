#pragma once

// Elastic interaction energy of a difference field D = G_t - alpha * Psi_p,
// evaluated spectrally as sum_{m,n} sqrt(m^2 + n^2) |d_mn|^2, plus the
// auxiliary losses that accompany it in training.
//
// Scale of the gradient: with the 1/(w h) forward normalisation the exact
// derivative of eie_energy with respect to D(x, y) is
//
//     dE/dD(x, y) = (4 / (w h)) * eie_gradient(D)(x, y),
//
// where eie_gradient applies the kernel sqrt(m^2 + n^2) / 2. The constant is
// absorbed into the step size of the evolution; see exact_gradient_scale().

#include <span>

#include "elasticlane/elm.hpp"
#include "elasticlane/field.hpp"

namespace elasticlane {

struct EieParams {
  double alpha = 0.5;

  EieParams() = default;
  explicit EieParams(double a);
};

struct LossWeights {
  double lambda_eie = 1.0;
  double lambda_aux = 1.0;
  double lambda_range = 0.1;
  double lambda_exist = 0.2;
  double aux_lambda1 = 0.3;
  double aux_lambda2 = 0.3;

  /// Throws InvalidArgument when any weight is negative.
  void validate() const;
};

struct EnergyBreakdown {
  double self_gt = 0.0;
  double self_pred = 0.0;
  double interaction = 0.0;

  double total() const noexcept { return self_gt + self_pred + interaction; }
};

/// Probability clamp used by every log-based loss.
inline constexpr double kProbabilityEpsilon = 1e-7;

/// 4 / (w h): ratio between the exact energy derivative and eie_gradient.
double exact_gradient_scale(const GridShape& shape) noexcept;

Field2D difference_field(const Field2D& gt, const Field2D& psi_p, const EieParams& p);

double eie_energy(const Field2D& d);
double eie_energy(const Field2D& d, const FrequencyKernel& kernel);

/// Symmetric bilinear form Q(a, b) = sum sqrt(m^2+n^2) Re(conj(a_mn) b_mn).
double eie_bilinear(const Field2D& a, const Field2D& b);

/// self_gt = Q(G,G), self_pred = alpha^2 Q(Psi,Psi), interaction = -2 alpha Q(G,Psi).
EnergyBreakdown energy_breakdown(const Field2D& gt, const Field2D& psi_p, const EieParams& p);

/// Inverse transform of (sqrt(m^2+n^2)/2) d_mn.
Field2D eie_gradient(const Field2D& d);
Field2D eie_gradient(const Field2D& d, const FrequencyKernel& kernel);

/// alpha * eie_gradient(G - alpha Psi); adding a small positive multiple to
/// Psi lowers the energy.
Field2D descent_direction(const Field2D& gt, const Field2D& psi_p, const EieParams& p);

double mse_energy(const Field2D& gt, const Field2D& psi_p);

/// d mse_energy / d phi_p through psi_p = H_sigma(phi_p) - 0.5.
Field2D mse_gradient_wrt_phi(const Field2D& gt, const Field2D& psi_p, const Field2D& phi_p,
                             const HeavisideParams& p);

/// Row-wise lane-range binary cross entropy, mean over rows.
double range_bce(std::span<const double> probs, std::span<const double> labels);

/// Mean focal loss over lane slots.
double focal_existence(std::span<const double> probs, std::span<const double> labels,
                       double gamma = 2.0, double alpha_f = 0.25);

/// lambda1 E(gt2 - alpha psi_p2) + lambda2 E(gt3 - alpha psi_p3).
double aux_loss(const Field2D& psi_p2, const Field2D& psi_p3, const Field2D& gt2,
                const Field2D& gt3, const LossWeights& w, const EieParams& p);

double total_loss(double l_eie, double l_aux, double l_range, double l_exist,
                  const LossWeights& w);

}  // namespace elasticlane
