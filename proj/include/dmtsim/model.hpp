#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dmtsim/numerics.hpp"

namespace dmtsim {

/// Configuration value that breaks a model invariant (N < M, xi out of range, ...).
/// `key` names the offending configuration entry, e.g. "system.N".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string key, const std::string& message)
      : std::invalid_argument(message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Target rate fixed at `bits` per channel use.
struct FixedRate {
  double bits = 1.0;
};

/// Target rate r * log2(SNR): multiplexing gain r.
struct ScalingRate {
  double r = 0.0;
};

using RateMode = std::variant<FixedRate, ScalingRate>;

struct SystemConfig {
  int M = 1;  ///< transmit antennas per user
  int N = 1;  ///< receive antennas at the base station
  int num_interferers = 0;
  /// Reference interference exponent; equals max(xi_k) once validated.
  double xi = 0.0;
  /// Per-interferer exponents. Empty means "all equal to xi".
  std::vector<double> xi_k;
  std::vector<double> snr_grid_db;
  RateMode rate = FixedRate{};
  std::int64_t trials_per_point = 1000;
  /// Stop a point early once this many outages are seen (checked at batch
  /// boundaries). 0 disables early stopping.
  std::int64_t target_outages = 0;
  std::uint64_t seed = 0;

  /// Exponent used for INR and for the theoretical tradeoff. Zero without
  /// interferers, whatever `xi` says.
  double reference_xi() const { return num_interferers == 0 ? 0.0 : xi; }
  /// r in scaling mode, 0 in fixed-rate mode.
  double multiplexing_gain() const;
};

/// Checks every invariant, fills `xi_k` defaults and resolves `xi` as the
/// maximum exponent. Throws ValidationError.
SystemConfig validated(SystemConfig config);

/// One quasi-static block: y = sqrt(SNR/M) H x + sqrt(INR/M) R Q^{1/2} x_I + n.
struct ChannelRealization {
  ComplexMatrix H;          ///< N x M desired channel
  ComplexMatrix R_stack;    ///< N x M(K-1), [H_1 ... H_{K-1}]
  Eigen::VectorXd q_diag;   ///< diagonal of Q, one entry per interferer column
  double snr_linear = 1.0;
  double inr_linear = 1.0;  ///< reference INR; 1 when there is no interference

  int M() const { return static_cast<int>(H.cols()); }
  int N() const { return static_cast<int>(H.rows()); }
  bool has_interference() const { return R_stack.cols() > 0; }
  int num_interferers() const { return M() == 0 ? 0 : static_cast<int>(R_stack.cols()) / M(); }
  /// Q as a dense diagonal matrix.
  Eigen::MatrixXd Q() const { return q_diag.asDiagonal(); }
};

/// Builds an interference-free realization around a given channel.
ChannelRealization make_realization(ComplexMatrix H, double snr_linear);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// SNR^xi_k. Requires snr_linear > 0 and 0 < xi_k < 1.
double inr_from_snr(double snr_linear, double xi_k);

/// Fresh realization for grid point `point_index` and trial `trial`. Each
/// (seed, point, trial, attempt) tuple owns an independent random stream;
/// `attempt` > 0 draws replacements for discarded trials.
ChannelRealization sample_realization(const SystemConfig& config, std::size_t point_index,
                                      std::uint64_t trial, std::uint32_t attempt = 0);

/// Same, locating `snr_db` in the configured grid.
ChannelRealization sample_realization(const SystemConfig& config, double snr_db,
                                      std::uint64_t trial);

std::size_t grid_index(const SystemConfig& config, double snr_db);

/// Target rate in bits per channel use.
double target_rate(const SystemConfig& config, double snr_linear);

}  // namespace dmtsim
