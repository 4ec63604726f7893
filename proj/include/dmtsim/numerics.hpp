#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace dmtsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Largest tolerated |A - A^H| entry, relative to max(1, max |A_ij|).
inline constexpr double kHermitianTol = 1e-10;
/// Largest tolerated ||A A^-1 - I||_F / ||I||_F on a successful inversion.
inline constexpr double kResidualTol = 1e-8;

/// Base of the recoverable numerical failures. A trial that raises one of
/// these is discarded and counted by the caller.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

//---------------------------------------------------------------------------//
/*!
 * Counter-based random stream (Philox4x64-10).
 *
 * The key is the run seed; the 256-bit counter holds (block, stream, lane, 0).
 * A stream therefore yields the same sequence no matter which thread draws it
 * or in which order streams are visited.
 */
class RngStream {
 public:
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane = 0);

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return counter_[1]; }
  std::uint64_t lane() const { return counter_[2]; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Circularly symmetric complex Gaussian, E|z|^2 = 1.
  Complex cn01();

  /// Raw Philox4x64 with 10 rounds.
  static Block philox(Block counter, Key key);

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int pos_ = 4;
};

/// Matrix of i.i.d. CN(0,1) entries drawn column-major from `rng`.
ComplexMatrix sample_cn01(RngStream& rng, int rows, int cols);

bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);

/// Cholesky factor A = L L^H of a Hermitian positive definite matrix.
class HermitianFactor {
 public:
  explicit HermitianFactor(const ComplexMatrix& a, double hermitian_tol = kHermitianTol);

  Eigen::Index size() const { return llt_.rows(); }
  /// L^-1 B.
  ComplexMatrix whiten(const ComplexMatrix& b) const;
  /// A^-1 B.
  ComplexMatrix solve(const ComplexMatrix& b) const;
  ComplexMatrix inverse() const;
  /// log det A in natural units.
  double log_det() const;

 private:
  Eigen::LLT<ComplexMatrix> llt_;
};

/// Inverse of a Hermitian positive definite matrix via its Cholesky factor.
/// Throws NotPositiveDefinite when a pivot fails or the residual check fails.
ComplexMatrix hermitian_inverse(const ComplexMatrix& a,
                                double hermitian_tol = kHermitianTol,
                                double residual_tol = kResidualTol);

/// Real eigenvalues of a Hermitian matrix in non-increasing order. Negative
/// values within round-off of zero are clamped to 0.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a,
                                          double hermitian_tol = kHermitianTol);

/// (A + A^H) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

}  // namespace dmtsim
