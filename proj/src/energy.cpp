#include "elasticlane/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace elasticlane {

EieParams::EieParams(double a) : alpha(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("alpha must be positive");
}

void LossWeights::validate() const {
  for (double v : {lambda_eie, lambda_aux, lambda_range, lambda_exist, aux_lambda1, aux_lambda2}) {
    if (!(v >= 0.0)) throw InvalidArgument("loss weights must be nonnegative");
  }
}

namespace {

void require_same_shape(const Field2D& a, const Field2D& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(what) + ": fields have different shapes");
  }
}

void require_kernel_shape(const Field2D& d, const FrequencyKernel& kernel) {
  if (d.shape() != kernel.shape()) throw ShapeMismatch("kernel shape differs from field shape");
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

}  // namespace

double exact_gradient_scale(const GridShape& shape) noexcept {
  return 4.0 / static_cast<double>(shape.size());
}

Field2D difference_field(const Field2D& gt, const Field2D& psi_p, const EieParams& p) {
  require_same_shape(gt, psi_p, "difference_field");
  Field2D d(gt.shape());
  auto out = d.values();
  const auto g = gt.values();
  const auto psi = psi_p.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i] - p.alpha * psi[i];
  return d;
}

double eie_energy(const Field2D& d) { return eie_energy(d, frequency_kernel(d.shape())); }

double eie_energy(const Field2D& d, const FrequencyKernel& kernel) {
  require_kernel_shape(d, kernel);
  const Spectrum s = dft_forward(d);
  const auto c = s.coefficients();
  const auto k = kernel.magnitudes();
  double energy = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) energy += k[i] * std::norm(c[i]);
  return energy;
}

double eie_bilinear(const Field2D& a, const Field2D& b) {
  require_same_shape(a, b, "eie_bilinear");
  const FrequencyKernel kernel = frequency_kernel(a.shape());
  const Spectrum sa = dft_forward(a);
  const Spectrum sb = dft_forward(b);
  const auto ca = sa.coefficients();
  const auto cb = sb.coefficients();
  const auto k = kernel.magnitudes();
  double q = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) q += k[i] * (std::conj(ca[i]) * cb[i]).real();
  return q;
}

EnergyBreakdown energy_breakdown(const Field2D& gt, const Field2D& psi_p, const EieParams& p) {
  require_same_shape(gt, psi_p, "energy_breakdown");
  EnergyBreakdown e;
  e.self_gt = eie_bilinear(gt, gt);
  e.self_pred = p.alpha * p.alpha * eie_bilinear(psi_p, psi_p);
  e.interaction = -2.0 * p.alpha * eie_bilinear(gt, psi_p);
  return e;
}

Field2D eie_gradient(const Field2D& d) { return eie_gradient(d, frequency_kernel(d.shape())); }

Field2D eie_gradient(const Field2D& d, const FrequencyKernel& kernel) {
  require_kernel_shape(d, kernel);
  Spectrum s = dft_forward(d);
  auto c = s.coefficients();
  const auto k = kernel.magnitudes();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= 0.5 * k[i];
  return dft_inverse(s);
}

Field2D descent_direction(const Field2D& gt, const Field2D& psi_p, const EieParams& p) {
  Field2D g = eie_gradient(difference_field(gt, psi_p, p));
  for (double& v : g.values()) v *= p.alpha;
  return g;
}

double mse_energy(const Field2D& gt, const Field2D& psi_p) {
  require_same_shape(gt, psi_p, "mse_energy");
  const auto g = gt.values();
  const auto psi = psi_p.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g[i] - psi[i];
    sum += r * r;
  }
  return sum / static_cast<double>(g.size());
}

Field2D mse_gradient_wrt_phi(const Field2D& gt, const Field2D& psi_p, const Field2D& phi_p,
                             const HeavisideParams& p) {
  require_same_shape(gt, psi_p, "mse_gradient_wrt_phi");
  require_same_shape(gt, phi_p, "mse_gradient_wrt_phi");
  Field2D grad(gt.shape());
  auto out = grad.values();
  const auto g = gt.values();
  const auto psi = psi_p.values();
  const auto phi = phi_p.values();
  const double pixels = static_cast<double>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double slope = heaviside_derivative(phi[i], p.sigma);
    out[i] = slope == 0.0 ? 0.0 : -2.0 * (g[i] - psi[i]) * slope / pixels;
  }
  return grad;
}

double range_bce(std::span<const double> probs, std::span<const double> labels) {
  if (probs.size() != labels.size()) throw ShapeMismatch("range_bce: length mismatch");
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_probability(probs[i]);
    sum += labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return -sum / static_cast<double>(probs.size());
}

double focal_existence(std::span<const double> probs, std::span<const double> labels,
                       double gamma, double alpha_f) {
  if (probs.size() != labels.size()) throw ShapeMismatch("focal_existence: length mismatch");
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_probability(probs[i]);
    const double pt = labels[i] > 0.5 ? p : 1.0 - p;
    sum += -alpha_f * std::pow(1.0 - pt, gamma) * std::log(pt);
  }
  return sum / static_cast<double>(probs.size());
}

double aux_loss(const Field2D& psi_p2, const Field2D& psi_p3, const Field2D& gt2,
                const Field2D& gt3, const LossWeights& w, const EieParams& p) {
  w.validate();
  return w.aux_lambda1 * eie_energy(difference_field(gt2, psi_p2, p)) +
         w.aux_lambda2 * eie_energy(difference_field(gt3, psi_p3, p));
}

double total_loss(double l_eie, double l_aux, double l_range, double l_exist,
                  const LossWeights& w) {
  w.validate();
  // Neumaier summation, so that e.g. the default weights on unit components
  // give the correctly rounded 2.3.
  double sum = 0.0;
  double compensation = 0.0;
  for (double term : {w.lambda_eie * l_eie, w.lambda_aux * l_aux, w.lambda_range * l_range,
                      w.lambda_exist * l_exist}) {
    const double t = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

}  // namespace elasticlane
