#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dmtsim/model.hpp"
#include "dmtsim/numerics.hpp"

namespace dmtsim::checks {

enum class Status { kPass, kFail, kSkip };

struct PropertyResult {
  std::string name;
  Status status = Status::kPass;
  double measured = 0.0;   ///< worst observed error (or the estimate itself)
  double tolerance = 0.0;
  std::string detail;

  bool ok() const { return status != Status::kFail; }
};

struct Tolerances {
  double hermitian = kHermitianTol;
  double residual = kResidualTol;
  double eigen_identity = 1e-8;
  double woodbury = 1e-8;
  double mi_routes = 1e-8;
  double sandwich = 1e-10;
  double decomposition = 1e-12;
  double tail_exponent = 0.3;
};

/// Post-filter SINR computed the long way: apply G from the MMSE filter and
/// split the full N x N covariance of G y into signal and the rest.
std::vector<double> direct_sinr(const ChannelRealization& real);

/// Realizations drawn from `config`, cycling through its SNR grid.
std::vector<ChannelRealization> sample_ensemble(const SystemConfig& config, int count);

/// Least-squares slope of log F_n(lambda) against log lambda over the lower
/// `quantile` of the sorted sample.
double tail_exponent(std::vector<double> samples, double quantile = 0.01);

/// Smallest eigenvalues of H^H H for `samples` draws of an N x M channel.
std::vector<double> sample_lambda_min(std::uint64_t seed, int M, int N, std::int64_t samples);

PropertyResult check_hermitian_inverse(std::uint64_t seed, int count, int max_dim,
                                       const Tolerances& tol);
PropertyResult check_eigen_identities(std::uint64_t seed, int count, int max_dim,
                                      const Tolerances& tol);
PropertyResult check_woodbury(std::span<const ChannelRealization> reals, const Tolerances& tol);
PropertyResult check_mi_routes(std::span<const ChannelRealization> reals, const Tolerances& tol);
PropertyResult check_sandwich(std::span<const ChannelRealization> reals, const Tolerances& tol);
PropertyResult check_logdet(std::span<const ChannelRealization> reals, const Tolerances& tol);
/// Jensen bounds collapse onto I_mmse for H = I_M without interference.
PropertyResult check_identity_equality(int max_M, double snr_linear, const Tolerances& tol);
PropertyResult check_snr_monotonic(std::span<const ChannelRealization> reals);
/// Removing the interferers never lowers I_mmse. Skipped without interferers.
PropertyResult check_interference_penalty(std::span<const ChannelRealization> reals);
PropertyResult check_eigen_tail(std::uint64_t seed, int M, int N, std::int64_t samples,
                                const Tolerances& tol);
/// The three forms of the interference tradeoff agree on an n x n grid of
/// (r, xi) with r + M xi <= M.
PropertyResult check_decomposition(int M, int N, int grid, const Tolerances& tol);

}  // namespace dmtsim::checks
