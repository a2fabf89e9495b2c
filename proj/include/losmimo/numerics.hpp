#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace losmimo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using IMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = std::numbers::pi;

class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(double cond)
      : std::runtime_error("matrix is rank deficient to working precision (condition estimate " +
                           std::to_string(cond) + ")"),
        condition(cond) {}
  double condition;
};

class HadamardOrderError : public std::invalid_argument {
 public:
  explicit HadamardOrderError(int n)
      : std::invalid_argument("no Sylvester/Paley-I Hadamard construction for order " +
                              std::to_string(n) + "; use DFT training instead"),
        order(n) {}
  int order;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic random stream identified by (master_seed, stream_id).
/// Sources are single-owner; parallel consumers get their own via derive().
class RandomSource {
 public:
  RandomSource(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  /// Child stream; depends only on the ids, never on how much of this stream was consumed.
  RandomSource derive(std::uint64_t sub_id) const {
    return RandomSource(master_seed_, detail::splitmix64(stream_id_ ^ detail::splitmix64(sub_id + 1)));
  }

  double normal() { return normal_(engine_); }

  double uniform() { return uniform_(engine_); }

  /// Uniform integer in [0, n).
  int uniform_index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// i.i.d. CN(0, variance) samples; real and imaginary parts each carry variance/2.
inline CVector sample_cgauss(RandomSource& rs, Eigen::Index count, double variance) {
  if (variance < 0.0) throw std::invalid_argument("sample_cgauss: negative variance");
  CVector out(count);
  const double s = std::sqrt(variance / 2.0);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double re = rs.normal();
    const double im = rs.normal();
    out[i] = cplx(s * re, s * im);
  }
  return out;
}

inline constexpr double kMaxCondition = 1e12;

/// Moore-Penrose pseudo-inverse of a square matrix via SVD. Throws
/// RankDeficientError when the condition estimate exceeds 1e12.
inline CMatrix pinv(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("pinv: matrix must be square");
  if (!m.allFinite()) throw std::invalid_argument("pinv: non-finite entries");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  if (smax == 0.0 || smin <= smax / kMaxCondition) {
    throw RankDeficientError(smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity());
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
}

/// 2-norm condition number (ratio of extreme singular values).
inline double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

/// W[m,n] = exp(-j 2 pi m n / N), so W^H W = N I.
inline CMatrix dft_matrix(int n) {
  if (n < 1) throw std::invalid_argument("dft_matrix: N must be >= 1");
  CMatrix w(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // reduce the exponent modulo N to keep the phase argument exact
      const long k = (static_cast<long>(r) * c) % n;
      w(r, c) = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / n);
    }
  }
  return w;
}

namespace detail {

inline bool is_prime(int q) {
  if (q < 2) return false;
  for (int d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

// Paley construction I: order q+1 for prime q = 3 mod 4.
inline IMatrix paley_one(int q) {
  std::vector<int> chi(q, -1);
  chi[0] = 0;
  for (int x = 1; x < q; ++x) chi[(static_cast<long>(x) * x) % q] = 1;
  const int n = q + 1;
  IMatrix h(n, n);
  h(0, 0) = 1;
  for (int i = 1; i < n; ++i) {
    h(0, i) = 1;
    h(i, 0) = -1;
  }
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      // Jacobsthal matrix Q[i][j] = chi(j - i); H = I + S with S skew
      const int q_ij = chi[((j - i) % q + q) % q];
      h(i + 1, j + 1) = q_ij + (i == j ? 1 : 0);
    }
  }
  return h;
}

inline IMatrix kron(const IMatrix& a, const IMatrix& b) {
  IMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline bool hadamard_build(int n, IMatrix& out, std::map<int, IMatrix>& memo) {
  if (auto it = memo.find(n); it != memo.end()) {
    out = it->second;
    return true;
  }
  if (n == 1) {
    out = IMatrix::Ones(1, 1);
  } else if (n == 2) {
    out.resize(2, 2);
    out << 1, 1, 1, -1;
  } else if (n % 4 == 0 && is_prime(n - 1) && (n - 1) % 4 == 3) {
    out = paley_one(n - 1);
  } else {
    bool found = false;
    // prefer a Sylvester factor of 2 when available
    if (n % 2 == 0) {
      IMatrix rest;
      if (hadamard_build(n / 2, rest, memo)) {
        IMatrix h2(2, 2);
        h2 << 1, 1, 1, -1;
        out = kron(h2, rest);
        found = true;
      }
    }
    for (int d = 3; !found && d * d <= n; ++d) {
      if (n % d != 0) continue;
      IMatrix a, b;
      if (hadamard_build(d, a, memo) && hadamard_build(n / d, b, memo)) {
        out = kron(a, b);
        found = true;
      }
    }
    if (!found) return false;
  }
  memo[n] = out;
  return true;
}

}  // namespace detail

/// True when hadamard(n) has a Sylvester/Paley-I Kronecker construction.
inline bool hadamard_constructible(int n) {
  if (n < 1) return false;
  std::map<int, IMatrix> memo;
  IMatrix tmp;
  return detail::hadamard_build(n, tmp, memo);
}

/// Integer ±1 matrix with H H^T = n I.
inline IMatrix hadamard(int n) {
  if (n < 1) throw HadamardOrderError(n);
  std::map<int, IMatrix> memo;
  IMatrix h;
  if (!detail::hadamard_build(n, h, memo)) throw HadamardOrderError(n);
  return h;
}

/// Circular FFT helpers over Eigen's kissfft backend.
inline std::vector<cplx> fft(const std::vector<cplx>& in) {
  Eigen::FFT<double> engine;
  std::vector<cplx> out;
  engine.fwd(out, in);
  return out;
}

inline std::vector<cplx> ifft(const std::vector<cplx>& in) {
  Eigen::FFT<double> engine;
  std::vector<cplx> out;
  engine.inv(out, in);
  return out;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// FIR filter applied by overlap-save FFT convolution; the tap spectrum is computed once.
class FirFilter {
 public:
  FirFilter() = default;
  explicit FirFilter(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) return;
    nfft_ = next_pow2(std::max<std::size_t>(4 * taps_.size(), 1024));
    std::vector<double> padded(nfft_, 0.0);
    std::copy(taps_.begin(), taps_.end(), padded.begin());
    Eigen::FFT<double> engine;
    engine.fwd(taps_f_, padded);
  }

  const std::vector<double>& taps() const { return taps_; }

  /// out[k] = sum_i taps[i] * x[k + L - 1 - i] for k in [0, x.size() - L].
  std::vector<double> apply_valid(const std::vector<double>& x) const {
    const std::size_t len = taps_.size();
    if (len == 0 || x.size() < len) throw std::invalid_argument("FirFilter: input shorter than filter");
    const std::size_t out_len = x.size() - len + 1;
    const std::size_t step = nfft_ - len + 1;
    thread_local Eigen::FFT<double> engine;  // plans are cached per size
    std::vector<double> out(out_len);
    std::vector<double> block(nfft_);
    std::vector<cplx> block_f;
    std::vector<double> block_t;
    for (std::size_t start = 0; start < out_len; start += step) {
      std::fill(block.begin(), block.end(), 0.0);
      const std::size_t avail = std::min(nfft_, x.size() - start);
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), avail, block.begin());
      engine.fwd(block_f, block);
      for (std::size_t k = 0; k < block_f.size(); ++k) block_f[k] *= taps_f_[k];
      engine.inv(block_t, block_f);
      const std::size_t count = std::min(step, out_len - start);
      for (std::size_t k = 0; k < count; ++k) out[start + k] = block_t[k + len - 1];
    }
    return out;
  }

 private:
  std::vector<double> taps_;
  std::size_t nfft_ = 0;
  std::vector<cplx> taps_f_;
};

inline std::vector<double> convolve_valid(const std::vector<double>& taps, const std::vector<double>& x) {
  return FirFilter(taps).apply_valid(x);
}

}  // namespace losmimo
