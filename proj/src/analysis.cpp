#include "dmtsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

#include "dmtsim/receiver.hpp"

namespace dmtsim {
namespace {

OutagePoint finish_point(const SystemConfig& config, std::size_t point_index, double rate,
                         std::int64_t trials, std::int64_t outages, std::int64_t discarded) {
  OutagePoint p;
  p.snr_db = config.snr_grid_db[point_index];
  p.snr_linear = db_to_linear(p.snr_db);
  p.target_rate_bits = rate;
  p.trials = trials;
  p.outages = outages;
  p.discarded = discarded;
  p.p_out = static_cast<double>(outages) / static_cast<double>(trials);
  const auto ci = wilson_interval(outages, trials);
  p.ci_low = ci.low;
  p.ci_high = ci.high;
  if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(trials)) {
    throw RunInvalid("discarded " + std::to_string(discarded) + " of " +
                     std::to_string(trials) + " trials at " + std::to_string(p.snr_db) + " dB");
  }
  return p;
}

bool keep_going(const SystemConfig& config, std::int64_t done, std::int64_t outages) {
  if (done >= config.trials_per_point) {
    return false;
  }
  return config.target_outages == 0 || outages < config.target_outages;
}

void check_exhausted(bool exhausted) {
  if (exhausted) {
    throw RunInvalid("a trial failed on every replacement draw");
  }
}

}  // namespace

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials, trials > 0");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Guard the endpoints against round-off at k = 0 and k = n.
  ci.low = std::min(ci.low, p);
  ci.high = std::max(ci.high, p);
  return ci;
}

TrialOutcome run_trial(const SystemConfig& config, std::size_t point_index, std::uint64_t trial,
                       double rate_bits) {
  TrialOutcome out;
  for (std::uint32_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    try {
      const auto real = sample_realization(config, point_index, trial, attempt);
      out.outage = mutual_information(real) <= rate_bits;
      return out;
    } catch (const NumericalError&) {
      ++out.discarded;
    }
  }
  out.exhausted = true;
  return out;
}

OutagePoint estimate_outage_at(const SystemConfig& config, std::size_t point_index) {
  const double rate = target_rate(config, db_to_linear(config.snr_grid_db.at(point_index)));
  std::int64_t done = 0;
  std::int64_t outages = 0;
  std::int64_t discarded = 0;
  bool exhausted = false;
  std::exception_ptr failure;

  while (keep_going(config, done, outages)) {
    const std::int64_t end = std::min(done + kBatchSize, config.trials_per_point);
    std::int64_t batch_outages = 0;
    std::int64_t batch_discarded = 0;
    bool batch_exhausted = false;
#pragma omp parallel for schedule(static) reduction(+ : batch_outages, batch_discarded) \
    reduction(|| : batch_exhausted)
    for (std::int64_t t = done; t < end; ++t) {
      try {
        const auto o = run_trial(config, point_index, static_cast<std::uint64_t>(t), rate);
        batch_outages += o.outage ? 1 : 0;
        batch_discarded += o.discarded;
        batch_exhausted = batch_exhausted || o.exhausted;
      } catch (...) {
#pragma omp critical(dmtsim_failure)
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
    if (failure) {
      std::rethrow_exception(failure);
    }
    outages += batch_outages;
    discarded += batch_discarded;
    exhausted = exhausted || batch_exhausted;
    done = end;
  }
  check_exhausted(exhausted);
  return finish_point(config, point_index, rate, done, outages, discarded);
}

OutagePoint estimate_outage(const SystemConfig& config, double snr_db) {
  return estimate_outage_at(config, grid_index(config, snr_db));
}

OutagePoint estimate_outage_serial(const SystemConfig& config, std::size_t point_index) {
  const double rate = target_rate(config, db_to_linear(config.snr_grid_db.at(point_index)));
  std::int64_t done = 0;
  std::int64_t outages = 0;
  std::int64_t discarded = 0;
  bool exhausted = false;
  while (keep_going(config, done, outages)) {
    const std::int64_t end = std::min(done + kBatchSize, config.trials_per_point);
    for (std::int64_t t = done; t < end; ++t) {
      const auto o = run_trial(config, point_index, static_cast<std::uint64_t>(t), rate);
      outages += o.outage ? 1 : 0;
      discarded += o.discarded;
      exhausted = exhausted || o.exhausted;
    }
    done = end;
  }
  check_exhausted(exhausted);
  return finish_point(config, point_index, rate, done, outages, discarded);
}

OutageCurve sweep_curve(const SystemConfig& config) {
  OutageCurve curve{config, {}};
  curve.points.reserve(config.snr_grid_db.size());
  for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
    curve.points.push_back(estimate_outage_at(config, i));
  }
  return curve;
}

OutageCurve sweep_curve_serial(const SystemConfig& config) {
  OutageCurve curve{config, {}};
  curve.points.reserve(config.snr_grid_db.size());
  for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
    curve.points.push_back(estimate_outage_serial(config, i));
  }
  return curve;
}

void set_workers(int workers) {
  omp_set_num_threads(std::max(1, workers));
}

int max_workers() {
  return omp_get_max_threads();
}

//---------------------------------------------------------------------------//
DmtEstimate estimate_slope(const OutageCurve& curve, const FitWindow& window) {
  std::vector<double> x, y, w;
  for (const auto& p : curve.points) {
    if (p.p_out < window.p_min || p.p_out > window.p_max || p.outages < window.min_events) {
      continue;
    }
    const double half = 0.5 * (std::log10(p.ci_high) - std::log10(p.ci_low));
    if (!(half > 0.0) || !std::isfinite(half)) {
      continue;
    }
    x.push_back(std::log10(p.snr_linear));
    y.push_back(std::log10(p.p_out));
    w.push_back(1.0 / (half * half));
  }
  const auto n = x.size();
  if (n < 3) {
    throw InsufficientPoints("only " + std::to_string(n) +
                             " points inside the fit window (need 3)");
  }

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - ybar - slope * (x[i] - xbar);
    rss += w[i] * r * r;
  }
  // Scale-free WLS standard error: residual variance per degree of freedom.
  const double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);

  DmtEstimate est;
  est.slope = -slope;
  est.stderr_ = se;
  est.points_used = static_cast<int>(n);
  est.theoretical_d = dmt_theoretical(curve.config.M, curve.config.N,
                                      curve.config.multiplexing_gain(),
                                      curve.config.reference_xi());
  est.fit_range = window;
  return est;
}

//---------------------------------------------------------------------------//
namespace {

void require_dims(int M, int N, double r) {
  if (M < 1 || N < M || !(r >= 0.0)) {
    throw std::invalid_argument("need N >= M >= 1 and r >= 0");
  }
}

}  // namespace

double dmt_theoretical(int M, int N, double r, double xi) {
  require_dims(M, N, r);
  if (!(xi >= 0.0 && xi < 1.0)) {
    throw std::invalid_argument("dmt_theoretical: xi must lie in [0, 1)");
  }
  return (N - M + 1) * std::max(0.0, 1.0 - xi - r / M);
}

double dmt_p2p(int M, int N, double r) {
  require_dims(M, N, r);
  return (N - M + 1) * std::max(0.0, 1.0 - r / M);
}

DmtDecomposition dmt_decomposition_check(int M, int N, double r, double xi) {
  if (r + M * xi > M + 1e-12) {
    throw std::invalid_argument("dmt_decomposition_check: need r + M xi <= M");
  }
  return {dmt_theoretical(M, N, r, xi), dmt_p2p(M, N, r) - (N - M + 1) * xi,
          dmt_p2p(M, N, r + M * xi)};
}

double ml_dmt_reference(int M, int N, int r) {
  if (M < 1 || N < 1 || r < 0 || r > std::min(M, N)) {
    throw std::invalid_argument("ml_dmt_reference: need 0 <= r <= min(M, N)");
  }
  return static_cast<double>(M - r) * static_cast<double>(N - r);
}

double ml_dmt_interpolated(int M, int N, double r) {
  if (M < 1 || N < 1 || !(r >= 0.0)) {
    throw std::invalid_argument("ml_dmt_interpolated: need M, N >= 1 and r >= 0");
  }
  const int top = std::min(M, N);
  if (r >= top) {
    return 0.0;
  }
  const int k = static_cast<int>(std::floor(r));
  const double frac = r - k;
  const double lo = ml_dmt_reference(M, N, k);
  const double hi = ml_dmt_reference(M, N, k + 1);
  return lo + frac * (hi - lo);
}

}  // namespace dmtsim
