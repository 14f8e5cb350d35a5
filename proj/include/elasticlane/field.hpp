#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "elasticlane/error.hpp"

namespace elasticlane {

using Complex = std::complex<double>;

/// Grid extent. Both sides must be at least 4 pixels.
class GridShape {
 public:
  GridShape(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  bool operator==(const GridShape&) const = default;

 private:
  int width_;
  int height_;
};

/// Maps a storage index k in [0, n) to its signed frequency.
///
/// Non-negative modes come first; the Nyquist mode of an even length is
/// assigned to the negative side, so the layout is [-n/2, n/2) for even n
/// and [-(n-1)/2, (n-1)/2] for odd n.
inline int signed_mode(int k, int n) noexcept { return k < (n + 1) / 2 ? k : k - n; }

/// Inverse of signed_mode.
inline int storage_mode(int m, int n) noexcept { return ((m % n) + n) % n; }

/// Real scalar grid, row-major (x fastest).
class Field2D {
 public:
  explicit Field2D(GridShape shape, double fill = 0.0);
  Field2D(GridShape shape, std::vector<double> values);

  const GridShape& shape() const noexcept { return shape_; }
  int width() const noexcept { return shape_.width(); }
  int height() const noexcept { return shape_.height(); }

  double operator()(int x, int y) const noexcept { return values_[shape_.index(x, y)]; }
  double& operator()(int x, int y) noexcept { return values_[shape_.index(x, y)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

/// Frequency-domain coefficients of a Field2D in FFT storage order.
/// Use at(m, n) with signed modes for the mathematical indexing.
class Spectrum {
 public:
  Spectrum(GridShape shape, std::vector<Complex> coefficients);
  explicit Spectrum(GridShape shape);

  const GridShape& shape() const noexcept { return shape_; }

  Complex at(int m, int n) const noexcept;
  Complex& at(int m, int n) noexcept;

  std::span<const Complex> coefficients() const noexcept { return coefficients_; }
  std::span<Complex> coefficients() noexcept { return coefficients_; }

  /// max |c(m,n) - conj(c(-m,-n))|.
  double hermitian_defect() const noexcept;

 private:
  GridShape shape_;
  std::vector<Complex> coefficients_;
};

/// sqrt(m^2 + n^2) per mode, same storage order as Spectrum.
class FrequencyKernel {
 public:
  FrequencyKernel(GridShape shape, std::vector<double> magnitudes);

  const GridShape& shape() const noexcept { return shape_; }
  double at(int m, int n) const noexcept;
  std::span<const double> magnitudes() const noexcept { return magnitudes_; }
  double max_magnitude() const noexcept;

 private:
  GridShape shape_;
  std::vector<double> magnitudes_;
};

/// d(m,n) = 1/(w h) * sum f(x,y) exp(-2 pi i (m x / w + n y / h)).
Spectrum dft_forward(const Field2D& f);

/// f(x,y) = sum d(m,n) exp(+2 pi i (m x / w + n y / h)), real part.
/// Throws NonHermitianSpectrum when the imaginary residue exceeds 1e-10 of
/// the output magnitude.
Field2D dft_inverse(const Spectrum& s);

FrequencyKernel frequency_kernel(const GridShape& shape);

}  // namespace elasticlane
