#include "elasticlane/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>

namespace elasticlane {

GridShape::GridShape(int width, int height) : width_(width), height_(height) {
  if (width < 4 || height < 4) {
    throw InvalidArgument("grid shape " + std::to_string(width) + "x" +
                          std::to_string(height) + " is smaller than 4x4");
  }
}

Field2D::Field2D(GridShape shape, double fill) : shape_(shape), values_(shape.size(), fill) {}

Field2D::Field2D(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) {
    throw ShapeMismatch("field value count " + std::to_string(values_.size()) +
                        " does not match grid size " + std::to_string(shape_.size()));
  }
  if (!all_finite()) throw InvalidArgument("field contains non-finite values");
}

bool Field2D::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field2D::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Spectrum::Spectrum(GridShape shape, std::vector<Complex> coefficients)
    : shape_(shape), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != shape_.size()) {
    throw ShapeMismatch("spectrum coefficient count does not match grid size");
  }
}

Spectrum::Spectrum(GridShape shape) : shape_(shape), coefficients_(shape.size()) {}

Complex Spectrum::at(int m, int n) const noexcept {
  return coefficients_[shape_.index(storage_mode(m, shape_.width()),
                                    storage_mode(n, shape_.height()))];
}

Complex& Spectrum::at(int m, int n) noexcept {
  return coefficients_[shape_.index(storage_mode(m, shape_.width()),
                                    storage_mode(n, shape_.height()))];
}

double Spectrum::hermitian_defect() const noexcept {
  const int w = shape_.width();
  const int h = shape_.height();
  double defect = 0.0;
  for (int l = 0; l < h; ++l) {
    for (int k = 0; k < w; ++k) {
      const Complex a = coefficients_[shape_.index(k, l)];
      const Complex b = coefficients_[shape_.index((w - k) % w, (h - l) % h)];
      defect = std::max(defect, std::abs(a - std::conj(b)));
    }
  }
  return defect;
}

FrequencyKernel::FrequencyKernel(GridShape shape, std::vector<double> magnitudes)
    : shape_(shape), magnitudes_(std::move(magnitudes)) {
  if (magnitudes_.size() != shape_.size()) {
    throw ShapeMismatch("kernel size does not match grid size");
  }
}

double FrequencyKernel::at(int m, int n) const noexcept {
  return magnitudes_[shape_.index(storage_mode(m, shape_.width()),
                                  storage_mode(n, shape_.height()))];
}

double FrequencyKernel::max_magnitude() const noexcept {
  return *std::max_element(magnitudes_.begin(), magnitudes_.end());
}

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer allocate(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

// The FFTW planner is not thread-safe; execution with new arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const GridShape& shape, int direction) {
    const std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(shape.width(), shape.height(), direction);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto in = allocate(shape.size());
    auto out = allocate(shape.size());
    fftw_plan plan = fftw_plan_dft_2d(shape.height(), shape.width(), in.get(), out.get(),
                                      direction, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const GridShape& shape, int direction, const fftw_complex* in, fftw_complex* out) {
  fftw_plan plan = PlanCache::instance().get(shape, direction);
  fftw_execute_dft(plan, const_cast<fftw_complex*>(in), out);
}

}  // namespace

Spectrum dft_forward(const Field2D& f) {
  const GridShape& shape = f.shape();
  const std::size_t n = shape.size();
  auto in = allocate(n);
  auto out = allocate(n);
  const auto values = f.values();
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = values[i];
    in[i][1] = 0.0;
  }
  execute(shape, FFTW_FORWARD, in.get(), out.get());

  const double scale = 1.0 / static_cast<double>(n);
  std::vector<Complex> coefficients(n);
  for (std::size_t i = 0; i < n; ++i) {
    coefficients[i] = Complex(out[i][0] * scale, out[i][1] * scale);
  }
  return Spectrum(shape, std::move(coefficients));
}

Field2D dft_inverse(const Spectrum& s) {
  const GridShape& shape = s.shape();
  const std::size_t n = shape.size();
  auto in = allocate(n);
  auto out = allocate(n);
  const auto coefficients = s.coefficients();
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = coefficients[i].real();
    in[i][1] = coefficients[i].imag();
  }
  execute(shape, FFTW_BACKWARD, in.get(), out.get());

  double residue = 0.0;
  double magnitude = 0.0;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = out[i][0];
    residue = std::max(residue, std::abs(out[i][1]));
    magnitude = std::max(magnitude, std::hypot(out[i][0], out[i][1]));
  }
  if (residue > 1e-10 * magnitude) {
    throw NonHermitianSpectrum("inverse transform has imaginary residue " +
                               std::to_string(residue) + " relative to magnitude " +
                               std::to_string(magnitude));
  }
  return Field2D(shape, std::move(values));
}

FrequencyKernel frequency_kernel(const GridShape& shape) {
  const int w = shape.width();
  const int h = shape.height();
  std::vector<double> magnitudes(shape.size());
  for (int l = 0; l < h; ++l) {
    const double n = signed_mode(l, h);
    for (int k = 0; k < w; ++k) {
      const double m = signed_mode(k, w);
      magnitudes[shape.index(k, l)] = std::sqrt(m * m + n * n);
    }
  }
  return FrequencyKernel(shape, std::move(magnitudes));
}

}  // namespace elasticlane
