#pragma once

// Independent reference computations used by gradcheck and the test suites:
// a direct O(K^4) DFT summation and central finite differences. Nothing here
// goes through FFTW.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "elasticlane/energy.hpp"
#include "elasticlane/field.hpp"

namespace elasticlane::oracle {

/// Uniform values in [-0.5, 0.5) from a 64-bit Mersenne twister.
inline Field2D random_field(const GridShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<double> v(shape.size());
  for (auto& x : v) x = dist(rng);
  return Field2D(shape, std::move(v));
}

/// d(m,n) = 1/(w h) sum f(x,y) exp(-2 pi i (m x/w + n y/h)), storage order.
inline std::vector<std::complex<double>> naive_dft(const Field2D& f) {
  const int w = f.shape().width();
  const int h = f.shape().height();
  const double tau = 2.0 * std::numbers::pi;
  std::vector<std::complex<double>> out(f.shape().size());
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double ang = -tau * (static_cast<double>(m) * x / w + static_cast<double>(n) * y / h);
          acc += f(x, y) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
      }
      out[static_cast<std::size_t>(n) * w + m] = acc / static_cast<double>(w * h);
    }
  }
  return out;
}

/// Direct inverse summation, real part.
inline Field2D naive_idft(const GridShape& shape, const std::vector<std::complex<double>>& d) {
  const int w = shape.width();
  const int h = shape.height();
  const double tau = 2.0 * std::numbers::pi;
  Field2D f(shape);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::complex<double> acc = 0.0;
      for (int n = 0; n < h; ++n) {
        for (int m = 0; m < w; ++m) {
          const double ang = tau * (static_cast<double>(m) * x / w + static_cast<double>(n) * y / h);
          acc += d[static_cast<std::size_t>(n) * w + m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
      }
      f(x, y) = acc.real();
    }
  }
  return f;
}

/// Energy straight from the naive transform.
inline double naive_energy(const Field2D& d) {
  const auto c = naive_dft(d);
  const int w = d.shape().width();
  const int h = d.shape().height();
  double e = 0.0;
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      const double mm = signed_mode(m, w);
      const double nn = signed_mode(n, h);
      e += std::sqrt(mm * mm + nn * nn) * std::norm(c[static_cast<std::size_t>(n) * w + m]);
    }
  }
  return e;
}

/// Central differences of eie_energy, one pixel at a time. The energy is
/// quadratic, so the only error is rounding.
inline Field2D fd_energy_gradient(const Field2D& d, double eps = 1e-3) {
  Field2D g(d.shape());
  Field2D probe = d;
  for (int y = 0; y < d.shape().height(); ++y) {
    for (int x = 0; x < d.shape().width(); ++x) {
      const double v = probe(x, y);
      probe(x, y) = v + eps;
      const double ep = eie_energy(probe);
      probe(x, y) = v - eps;
      const double em = eie_energy(probe);
      probe(x, y) = v;
      g(x, y) = (ep - em) / (2.0 * eps);
    }
  }
  return g;
}

inline double dot(const Field2D& a, const Field2D& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

inline double cosine(const Field2D& a, const Field2D& b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  return (na == 0.0 || nb == 0.0) ? 0.0 : dot(a, b) / (na * nb);
}

/// Least-squares scale s minimising |fd - s * g|.
inline double fitted_scale(const Field2D& fd, const Field2D& g) { return dot(fd, g) / dot(g, g); }

}  // namespace elasticlane::oracle
