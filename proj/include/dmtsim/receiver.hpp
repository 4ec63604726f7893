#pragma once

#include <vector>

#include "dmtsim/model.hpp"
#include "dmtsim/numerics.hpp"

namespace dmtsim {

/// Everything the linear MMSE receiver yields for one realization, computed
/// in a single pass so the bounds can be compared against each other.
struct MmseEvaluation {
  std::vector<double> sinr;          ///< per-stream post-filter SINR (linear)
  double mutual_info_bits = 0.0;     ///< sum_i log2(1 + sinr_i)
  double mutual_info_diag_bits = 0.0;///< -sum_i log2 [(I + s C)^-1]_ii
  double jensen_lower_bits = 0.0;    ///< -M log2(tr[(I + s C)^-1] / M)
  double jensen_upper_bits = 0.0;    ///< M log2(mean_i 1 / [(I + s C)^-1]_ii)
  double logdet_upper_bits = 0.0;    ///< log2 det(I + s C)
  double lambda_min = 0.0;           ///< smallest eigenvalue of C, clamped at 0
};

/// R Q R^H, the N x N interference Gram matrix (zero without interferers).
ComplexMatrix interference_gram(const ChannelRealization& real);

/// C = H^H (R Q R^H + (M/INR) I)^-1 H. Without interferers this is
/// (INR/M) H^H H.
ComplexMatrix whitened_gram(const ChannelRealization& real);

/// G = sqrt(M/SNR) H^H (H H^H + (INR/SNR) R Q R^H + (M/SNR) I)^-1, M x N.
ComplexMatrix mmse_filter(const ChannelRealization& real);

/// rho_i = 1 / [(I + (SNR/INR) C)^-1]_ii - 1.
std::vector<double> sinr_per_stream(const ChannelRealization& real);

double mutual_information(const ChannelRealization& real);
double jensen_lower(const ChannelRealization& real);
double jensen_upper(const ChannelRealization& real);
double lambda_min(const ChannelRealization& real);

/// Smallest eigenvalue of a Hermitian PSD matrix, clamped at 0.
double smallest_eigenvalue(const ComplexMatrix& c);

MmseEvaluation evaluate_mmse(const ChannelRealization& real);

}  // namespace dmtsim
