#include "dmtsim/receiver.hpp"

#include <algorithm>
#include <cmath>

namespace dmtsim {
namespace {

/// (I + (SNR/INR) C)^-1 and the matrix it inverts.
struct PostFilterMatrices {
  ComplexMatrix gram;     // C
  ComplexMatrix inverse;  // (I + s C)^-1
};

PostFilterMatrices post_filter(const ChannelRealization& real) {
  PostFilterMatrices out;
  out.gram = whitened_gram(real);
  const auto m = out.gram.rows();
  const double s = real.snr_linear / real.inr_linear;
  const ComplexMatrix a = ComplexMatrix::Identity(m, m) + s * out.gram;
  out.inverse = hermitian_inverse(a);
  return out;
}

double mutual_information_from(const ComplexMatrix& inverse) {
  double bits = 0.0;
  for (Eigen::Index i = 0; i < inverse.rows(); ++i) {
    const double rho = 1.0 / inverse(i, i).real() - 1.0;
    bits += std::log1p(std::max(rho, 0.0));
  }
  return bits / std::log(2.0);
}

}  // namespace

ComplexMatrix interference_gram(const ChannelRealization& real) {
  const auto n = real.H.rows();
  if (!real.has_interference()) {
    return ComplexMatrix::Zero(n, n);
  }
  const ComplexMatrix scaled = real.R_stack * real.q_diag.cwiseSqrt().asDiagonal();
  return hermitian_part(scaled * scaled.adjoint());
}

ComplexMatrix whitened_gram(const ChannelRealization& real) {
  const double m = real.M();
  if (!real.has_interference()) {
    return hermitian_part((real.inr_linear / m) * (real.H.adjoint() * real.H));
  }
  if (!(real.inr_linear > 0.0)) {
    throw std::invalid_argument("whitened_gram: INR must be positive with interferers");
  }
  ComplexMatrix w = interference_gram(real);
  w.diagonal().array() += m / real.inr_linear;
  const HermitianFactor factor(w);
  const ComplexMatrix x = factor.whiten(real.H);
  return hermitian_part(x.adjoint() * x);
}

ComplexMatrix mmse_filter(const ChannelRealization& real) {
  const double m = real.M();
  const double snr = real.snr_linear;
  ComplexMatrix t = real.H * real.H.adjoint();
  if (real.has_interference()) {
    t += (real.inr_linear / snr) * interference_gram(real);
  }
  t.diagonal().array() += m / snr;
  const HermitianFactor factor(hermitian_part(t));
  // H^H T^-1 = (T^-1 H)^H for Hermitian T.
  return std::sqrt(m / snr) * factor.solve(real.H).adjoint();
}

std::vector<double> sinr_per_stream(const ChannelRealization& real) {
  const auto pf = post_filter(real);
  std::vector<double> sinr(static_cast<std::size_t>(pf.inverse.rows()));
  for (std::size_t i = 0; i < sinr.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sinr[i] = std::max(1.0 / pf.inverse(k, k).real() - 1.0, 0.0);
  }
  return sinr;
}

double mutual_information(const ChannelRealization& real) {
  return mutual_information_from(post_filter(real).inverse);
}

double jensen_lower(const ChannelRealization& real) {
  return evaluate_mmse(real).jensen_lower_bits;
}

double jensen_upper(const ChannelRealization& real) {
  return evaluate_mmse(real).jensen_upper_bits;
}

double smallest_eigenvalue(const ComplexMatrix& c) {
  return std::max(hermitian_eigenvalues(c).back(), 0.0);
}

double lambda_min(const ChannelRealization& real) {
  return smallest_eigenvalue(whitened_gram(real));
}

MmseEvaluation evaluate_mmse(const ChannelRealization& real) {
  const auto pf = post_filter(real);
  const auto m = pf.inverse.rows();
  const double md = static_cast<double>(m);
  const double ln2 = std::log(2.0);

  MmseEvaluation ev;
  ev.sinr.resize(static_cast<std::size_t>(m));
  double trace = 0.0;
  double inv_diag_sum = 0.0;
  double diag_bits = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double b = pf.inverse(i, i).real();
    ev.sinr[static_cast<std::size_t>(i)] = std::max(1.0 / b - 1.0, 0.0);
    trace += b;
    inv_diag_sum += 1.0 / b;
    diag_bits -= std::log(b);
  }
  ev.mutual_info_bits = mutual_information_from(pf.inverse);
  ev.mutual_info_diag_bits = diag_bits / ln2;
  ev.jensen_lower_bits = -md * std::log(trace / md) / ln2;
  ev.jensen_upper_bits = md * std::log(inv_diag_sum / md) / ln2;

  const double s = real.snr_linear / real.inr_linear;
  const ComplexMatrix a = ComplexMatrix::Identity(m, m) + s * pf.gram;
  ev.logdet_upper_bits = HermitianFactor(a).log_det() / ln2;
  ev.lambda_min = smallest_eigenvalue(pf.gram);
  return ev;
}

}  // namespace dmtsim
