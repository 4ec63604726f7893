#include "dmtsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dmtsim {
namespace {

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) {
    throw ValidationError(key, message);
  }
}

}  // namespace

double SystemConfig::multiplexing_gain() const {
  if (const auto* scaling = std::get_if<ScalingRate>(&rate)) {
    return scaling->r;
  }
  return 0.0;
}

SystemConfig validated(SystemConfig c) {
  require(c.M >= 1, "system.M", "M must be >= 1");
  require(c.N >= c.M, "system.N", "N must be >= M");
  require(c.num_interferers >= 0, "system.interferers", "interferers must be >= 0");
  require(std::isfinite(c.xi) && c.xi >= 0.0 && c.xi < 1.0, "system.xi", "xi must lie in [0, 1)");

  if (c.num_interferers == 0) {
    require(c.xi_k.empty(), "system.xi_k", "xi_k given but there are no interferers");
  } else {
    if (c.xi_k.empty()) {
      require(c.xi > 0.0, "system.xi", "xi must lie in (0, 1) when interferers exist");
      c.xi_k.assign(static_cast<std::size_t>(c.num_interferers), c.xi);
    }
    require(c.xi_k.size() == static_cast<std::size_t>(c.num_interferers),
            "system.xi_k", "xi_k must list one exponent per interferer");
    for (double x : c.xi_k) {
      require(std::isfinite(x) && x > 0.0 && x < 1.0, "system.xi_k", "each xi_k must lie in (0, 1)");
    }
    const double xi_max = *std::max_element(c.xi_k.begin(), c.xi_k.end());
    require(c.xi == 0.0 || std::abs(c.xi - xi_max) <= 1e-12, "system.xi", "xi must equal max(xi_k)");
    c.xi = xi_max;
  }

  require(!c.snr_grid_db.empty(), "sweep.snr_db", "SNR grid must not be empty");
  for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i) {
    require(std::isfinite(c.snr_grid_db[i]), "sweep.snr_db", "SNR grid values must be finite");
    require(i == 0 || c.snr_grid_db[i] > c.snr_grid_db[i - 1],
            "sweep.snr_db", "SNR grid must be strictly increasing");
  }

  require(c.trials_per_point >= 1000, "sweep.trials", "trials must be >= 1000");
  require(c.target_outages >= 0, "sweep.target_outages", "target_outages must be >= 0");

  if (const auto* fixed = std::get_if<FixedRate>(&c.rate)) {
    require(std::isfinite(fixed->bits) && fixed->bits > 0.0, "rate.R", "R must be > 0");
  } else {
    const double r = std::get<ScalingRate>(c.rate).r;
    require(std::isfinite(r) && r >= 0.0, "rate.r", "r must be >= 0");
    require(r == 0.0 || c.snr_grid_db.front() > 0.0,
            "rate.r", "scaling rate needs SNR > 0 dB at every grid point");
  }
  return c;
}

ChannelRealization make_realization(ComplexMatrix H, double snr_linear) {
  ChannelRealization real;
  real.R_stack = ComplexMatrix(H.rows(), 0);
  real.H = std::move(H);
  real.q_diag = Eigen::VectorXd(0);
  real.snr_linear = snr_linear;
  real.inr_linear = 1.0;
  return real;
}

double inr_from_snr(double snr_linear, double xi_k) {
  if (!(snr_linear > 0.0) || !(xi_k > 0.0 && xi_k < 1.0)) {
    throw std::invalid_argument("inr_from_snr: need SNR > 0 and 0 < xi < 1");
  }
  return std::pow(snr_linear, xi_k);
}

std::size_t grid_index(const SystemConfig& config, double snr_db) {
  const auto& grid = config.snr_grid_db;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - snr_db) <= 1e-12 * std::max(1.0, std::abs(snr_db))) {
      return i;
    }
  }
  throw std::out_of_range("SNR " + std::to_string(snr_db) + " dB is not on the grid");
}

ChannelRealization sample_realization(const SystemConfig& config, std::size_t point_index,
                                      std::uint64_t trial, std::uint32_t attempt) {
  if (point_index >= config.snr_grid_db.size()) {
    throw std::out_of_range("sample_realization: point index outside the grid");
  }
  if (trial >= static_cast<std::uint64_t>(config.trials_per_point)) {
    throw std::out_of_range("sample_realization: trial index >= trials_per_point");
  }
  const std::uint64_t lane = (static_cast<std::uint64_t>(point_index) << 32) | attempt;
  RngStream rng(config.seed, trial, lane);

  const int M = config.M;
  const int N = config.N;
  const int K1 = config.num_interferers;

  ChannelRealization real;
  real.snr_linear = db_to_linear(config.snr_grid_db[point_index]);
  real.H = sample_cn01(rng, N, M);
  real.R_stack = sample_cn01(rng, N, M * K1);
  real.q_diag = Eigen::VectorXd(M * K1);
  if (K1 == 0) {
    real.inr_linear = 1.0;
    return real;
  }
  const double xi_ref = config.reference_xi();
  real.inr_linear = inr_from_snr(real.snr_linear, xi_ref);
  for (int k = 0; k < K1; ++k) {
    // INR_(k) / INR = SNR^(xi_k - xi) lies in (0, 1] since xi = max xi_k.
    const double xk = config.xi_k[static_cast<std::size_t>(k)];
    const double ratio = xk == xi_ref ? 1.0 : std::pow(real.snr_linear, xk - xi_ref);
    real.q_diag.segment(k * M, M).setConstant(ratio);
  }
  return real;
}

ChannelRealization sample_realization(const SystemConfig& config, double snr_db,
                                      std::uint64_t trial) {
  return sample_realization(config, grid_index(config, snr_db), trial);
}

double target_rate(const SystemConfig& config, double snr_linear) {
  if (const auto* fixed = std::get_if<FixedRate>(&config.rate)) {
    return fixed->bits;
  }
  const double r = std::get<ScalingRate>(config.rate).r;
  if (r == 0.0) {
    return 0.0;
  }
  if (!(snr_linear > 1.0)) {
    throw std::invalid_argument("target_rate: scaling mode needs SNR > 1");
  }
  return r * std::log2(snr_linear);
}

}  // namespace dmtsim
