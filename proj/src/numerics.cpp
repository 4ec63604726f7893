#include "dmtsim/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace dmtsim {
namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

double max_abs_entry(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

//---------------------------------------------------------------------------//
RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane)
    : key_{seed, 0}, counter_{0, stream, lane, 0} {}

RngStream::Block RngStream::philox(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ == 4) {
    buffer_ = philox(counter_, key_);
    ++counter_[0];
    pos_ = 0;
  }
  return buffer_[pos_++];
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Complex RngStream::cn01() {
  // Marsaglia polar method, scaled to variance 1/2 per component.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-std::log(s) / s);
  return {u * f, v * f};
}

ComplexMatrix sample_cn01(RngStream& rng, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = rng.cn01();
    }
  }
  return m;
}

//---------------------------------------------------------------------------//
bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) {
    return false;
  }
  const double scale = std::max(1.0, max_abs_entry(a));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) {
        return false;
      }
    }
  }
  return true;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

HermitianFactor::HermitianFactor(const ComplexMatrix& a, double hermitian_tol) {
  require_square(a, "HermitianFactor");
  if (!a.allFinite()) {
    throw NotPositiveDefinite("HermitianFactor: non-finite entries");
  }
  if (!is_hermitian(a, hermitian_tol)) {
    throw std::invalid_argument("HermitianFactor: matrix is not Hermitian");
  }
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("HermitianFactor: Cholesky pivot failed");
  }
  const auto diag = llt_.matrixLLT().diagonal().real();
  if (!diag.allFinite() || (diag.array() <= 0.0).any()) {
    throw NotPositiveDefinite("HermitianFactor: non-positive pivot");
  }
}

ComplexMatrix HermitianFactor::whiten(const ComplexMatrix& b) const {
  return llt_.matrixL().solve(b);
}

ComplexMatrix HermitianFactor::solve(const ComplexMatrix& b) const {
  return llt_.solve(b);
}

ComplexMatrix HermitianFactor::inverse() const {
  return llt_.solve(ComplexMatrix::Identity(size(), size()));
}

double HermitianFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().real().array().log().sum();
}

ComplexMatrix hermitian_inverse(const ComplexMatrix& a, double hermitian_tol,
                                double residual_tol) {
  const HermitianFactor factor(a, hermitian_tol);
  ComplexMatrix inv = hermitian_part(factor.inverse());
  const auto n = a.rows();
  const double residual =
      (a * inv - ComplexMatrix::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
  if (!inv.allFinite() || !(residual <= residual_tol)) {
    throw NotPositiveDefinite("hermitian_inverse: residual check failed");
  }
  return inv;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, double hermitian_tol) {
  require_square(a, "hermitian_eigenvalues");
  if (!is_hermitian(a, hermitian_tol)) {
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite()) {
    throw ConvergenceFailure("hermitian_eigenvalues: solver did not converge");
  }
  std::vector<double> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(values.begin(), values.end(), std::greater<>());
  const double floor = -hermitian_tol * std::max(1.0, std::abs(values.front()));
  for (double& v : values) {
    if (v < 0.0 && v >= floor) {
      v = 0.0;
    }
  }
  return values;
}

}  // namespace dmtsim
