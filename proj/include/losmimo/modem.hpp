#pragma once

#include "losmimo/numerics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace losmimo {

struct Constellation {
  std::string name;
  std::vector<cplx> points;  // index i carries Gray label labels[i]
  std::vector<unsigned> labels;
  int bits_per_symbol = 0;

  int size() const { return static_cast<int>(points.size()); }

  double average_energy() const {
    double e = 0.0;
    for (const auto& p : points) e += std::norm(p);
    return e / static_cast<double>(points.size());
  }
};

namespace detail {

inline unsigned gray(unsigned v) { return v ^ (v >> 1); }

inline Constellation square_qam(const std::string& name, int side, int bits) {
  Constellation c{name, {}, {}, bits};
  const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
  const int half_bits = bits / 2;
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      const double re = 2.0 * i - (side - 1);
      const double im = 2.0 * q - (side - 1);
      c.points.emplace_back(scale * re, scale * im);
      c.labels.push_back((gray(static_cast<unsigned>(i)) << half_bits) | gray(static_cast<unsigned>(q)));
    }
  }
  return c;
}

inline Constellation psk(const std::string& name, int order, int bits) {
  Constellation c{name, {}, {}, bits};
  for (int k = 0; k < order; ++k) {
    c.points.push_back(std::polar(1.0, 2.0 * kPi * k / order));
    c.labels.push_back(gray(static_cast<unsigned>(k)));
  }
  return c;
}

}  // namespace detail

/// Unit-average-energy Gray-mapped constellation: BPSK, QAM16, QAM64, PSK8, PSK16.
inline Constellation make_constellation(const std::string& name) {
  Constellation c;
  if (name == "BPSK") {
    c = Constellation{"BPSK", {cplx(1.0, 0.0), cplx(-1.0, 0.0)}, {0u, 1u}, 1};
  } else if (name == "QAM16") {
    c = detail::square_qam(name, 4, 4);
  } else if (name == "QAM64") {
    c = detail::square_qam(name, 8, 6);
  } else if (name == "PSK8") {
    c = detail::psk(name, 8, 3);
  } else if (name == "PSK16") {
    c = detail::psk(name, 16, 4);
  } else {
    throw std::invalid_argument("unknown constellation '" + name + "' (expected BPSK, QAM16, QAM64, PSK8, PSK16)");
  }
  if (std::abs(c.average_energy() - 1.0) > 1e-12) throw std::logic_error("constellation energy not normalized");
  return c;
}

/// ML (minimum-distance) detection; ties go to the lowest index.
inline int nearest_point(const Constellation& c, cplx z) {
  int best = 0;
  double best_d = std::norm(z - c.points[0]);
  for (int i = 1; i < c.size(); ++i) {
    const double d = std::norm(z - c.points[static_cast<std::size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

/// N x L_f block: L_t training columns followed by L_d data columns.
struct Frame {
  int n = 0;
  int training_len = 0;
  int data_len = 0;
  CMatrix symbols;
  IMatrix data_indices;  // N x L_d

  int frame_len() const { return training_len + data_len; }
  auto training() const { return symbols.leftCols(training_len); }
  auto data() const { return symbols.rightCols(data_len); }
};

enum class TrainingKind { hadamard, dft };

/// Training block: BPSK Hadamard columns (L_t = N), or the DFT matrix when
/// allow_dft_fallback is set and no Hadamard construction exists for N.
inline CMatrix training_block(int n, bool allow_dft_fallback) {
  if (hadamard_constructible(n)) return hadamard(n).cast<double>().cast<cplx>();
  if (!allow_dft_fallback) throw HadamardOrderError(n);
  return dft_matrix(n);
}

inline Frame build_frame(int n, int data_len, const Constellation& c, RandomSource& rs,
                         bool allow_dft_fallback = false) {
  if (n < 1 || data_len < 0) throw std::invalid_argument("build_frame: N >= 1 and L_d >= 0 required");
  Frame f;
  f.n = n;
  f.training_len = n;
  f.data_len = data_len;
  f.symbols.resize(n, n + data_len);
  f.symbols.leftCols(n) = training_block(n, allow_dft_fallback);
  f.data_indices.resize(n, data_len);
  for (int k = 0; k < data_len; ++k) {
    for (int i = 0; i < n; ++i) {
      const int idx = rs.uniform_index(c.size());
      f.data_indices(i, k) = idx;
      f.symbols(i, n + k) = c.points[static_cast<std::size_t>(idx)];
    }
  }
  return f;
}

}  // namespace losmimo
