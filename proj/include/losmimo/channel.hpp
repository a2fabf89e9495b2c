#pragma once

#include "losmimo/numerics.hpp"

#include <cmath>
#include <limits>

namespace losmimo {

inline constexpr double kInfiniteK = std::numeric_limits<double>::infinity();

struct ChannelMatrix {
  CMatrix h;
  CMatrix h_los;
  CMatrix h_nlos;
  double k_lin = kInfiniteK;

  Eigen::Index size() const { return h.rows(); }
};

/// Two parallel broadside ULAs facing each other across link_distance.
struct UlaGeometry {
  double wavelength = 0.0;
  double link_distance = 0.0;
  double tx_spacing = 0.0;
  double rx_spacing = 0.0;
  int n = 0;

  void validate() const {
    if (!(wavelength > 0.0) || !(link_distance > 0.0) || !(tx_spacing > 0.0) || !(rx_spacing > 0.0) || n < 1) {
      throw std::invalid_argument("UlaGeometry: lengths must be positive and N >= 1");
    }
  }
};

/// Canonical LOS matrix: unit-modulus DFT form with H^H H = N I.
inline CMatrix los_dft(int n) { return dft_matrix(n); }

/// Spherical-wave LOS matrix between the two arrays, unit modulus per entry.
inline CMatrix ula_channel(const UlaGeometry& g) {
  g.validate();
  CMatrix h(g.n, g.n);
  const double tx_center = 0.5 * (g.n - 1) * g.tx_spacing;
  const double rx_center = 0.5 * (g.n - 1) * g.rx_spacing;
  for (int m = 0; m < g.n; ++m) {
    const double rx_pos = m * g.rx_spacing - rx_center;
    for (int k = 0; k < g.n; ++k) {
      const double tx_pos = k * g.tx_spacing - tx_center;
      const double offset = rx_pos - tx_pos;
      const double r = std::hypot(g.link_distance, offset);
      h(m, k) = std::polar(1.0, 2.0 * kPi * std::fmod(r / g.wavelength, 1.0));
    }
  }
  return h;
}

/// Spacing product d_t * d_r that makes the ULA channel orthogonal: lambda R / N.
inline double optimal_spacing(double wavelength, double link_distance, int n) {
  if (!(wavelength > 0.0) || !(link_distance > 0.0) || n < 1)
    throw std::invalid_argument("optimal_spacing: arguments must be positive");
  return wavelength * link_distance / n;
}

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

/// H = sqrt(K/(1+K)) H_los + sqrt(1/(1+K)) H_nlos; K = inf selects H_los exactly.
inline ChannelMatrix rician_mix(const CMatrix& h_los, const CMatrix& h_nlos, double k_lin) {
  if (h_los.rows() != h_nlos.rows() || h_los.cols() != h_nlos.cols())
    throw std::invalid_argument("rician_mix: LOS and NLOS dimensions differ");
  if (!(k_lin >= 0.0)) throw std::invalid_argument("rician_mix: K must be >= 0");
  ChannelMatrix out{h_los, h_los, h_nlos, k_lin};
  if (std::isinf(k_lin)) return out;
  if (k_lin == 0.0) {
    out.h = h_nlos;
    return out;
  }
  const double w_los = std::sqrt(k_lin / (1.0 + k_lin));
  const double w_nlos = std::sqrt(1.0 / (1.0 + k_lin));
  out.h = w_los * h_los + w_nlos * h_nlos;
  return out;
}

/// N x N matrix of i.i.d. CN(0, 1) entries.
inline CMatrix sample_nlos(int n, RandomSource& rs) {
  if (n < 1) throw std::invalid_argument("sample_nlos: N must be >= 1");
  CVector v = sample_cgauss(rs, static_cast<Eigen::Index>(n) * n, 1.0);
  return Eigen::Map<CMatrix>(v.data(), n, n);
}

}  // namespace losmimo
