#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dmtsim/model.hpp"

namespace dmtsim {

/// Discarded-trial fraction above kMaxDiscardFraction, or a trial whose
/// replacements all failed.
class RunInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer than three curve points qualify for the slope fit.
class InsufficientPoints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMaxDiscardFraction = 1e-4;
inline constexpr std::uint32_t kMaxAttempts = 16;
/// Trials are processed in fixed batches; early stopping is only decided at
/// batch boundaries so the result does not depend on the worker count.
inline constexpr std::int64_t kBatchSize = 10000;
/// Two-sided 95% standard normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = kZ95);

struct OutagePoint {
  double snr_db = 0.0;
  double snr_linear = 1.0;
  double target_rate_bits = 0.0;
  std::int64_t trials = 0;
  std::int64_t outages = 0;
  double p_out = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::int64_t discarded = 0;
};

struct OutageCurve {
  SystemConfig config;
  std::vector<OutagePoint> points;
};

struct FitWindow {
  double p_min = 1e-4;
  double p_max = 1e-1;
  std::int64_t min_events = 50;
};

struct DmtEstimate {
  double slope = 0.0;  ///< empirical diversity order, minus the log-log slope
  double stderr_ = 0.0;
  int points_used = 0;
  double theoretical_d = 0.0;
  FitWindow fit_range;
};

struct TrialOutcome {
  bool outage = false;
  std::uint32_t discarded = 0;
  bool exhausted = false;  ///< every replacement failed
};

/// One trial at grid point `point_index`: draws the realization (replacing it
/// on numerical failure) and tests I_mmse <= rate.
TrialOutcome run_trial(const SystemConfig& config, std::size_t point_index, std::uint64_t trial,
                       double rate_bits);

/// OpenMP-parallel outage estimate at one grid point.
OutagePoint estimate_outage_at(const SystemConfig& config, std::size_t point_index);
OutagePoint estimate_outage(const SystemConfig& config, double snr_db);

/// Single-threaded reference; must agree exactly with estimate_outage_at.
OutagePoint estimate_outage_serial(const SystemConfig& config, std::size_t point_index);

OutageCurve sweep_curve(const SystemConfig& config);
OutageCurve sweep_curve_serial(const SystemConfig& config);

/// Sets the OpenMP thread count used by the parallel kernels.
void set_workers(int workers);
int max_workers();

/// Weighted least-squares slope of log10 p_out against log10 SNR over the
/// points inside `window` that saw at least `window.min_events` outages.
DmtEstimate estimate_slope(const OutageCurve& curve, const FitWindow& window = {});

/// (N - M + 1) (1 - xi - r/M)^+
double dmt_theoretical(int M, int N, double r, double xi);
/// (N - M + 1) (1 - r/M)^+
double dmt_p2p(int M, int N, double r);

struct DmtDecomposition {
  double direct = 0.0;           ///< dmt_theoretical(M, N, r, xi)
  double diversity_shift = 0.0;  ///< dmt_p2p(M, N, r) - (N - M + 1) xi
  double rate_shift = 0.0;       ///< dmt_p2p(M, N, r + M xi)
};

DmtDecomposition dmt_decomposition_check(int M, int N, double r, double xi);

/// (M - r)(N - r) for integer 0 <= r <= min(M, N).
double ml_dmt_reference(int M, int N, int r);
/// The ML tradeoff curve, linear between the integer corner points and 0
/// past min(M, N).
double ml_dmt_interpolated(int M, int N, double r);

}  // namespace dmtsim
