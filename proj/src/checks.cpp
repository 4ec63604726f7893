#include "dmtsim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "dmtsim/analysis.hpp"
#include "dmtsim/receiver.hpp"

namespace dmtsim::checks {
namespace {

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

PropertyResult verdict(std::string name, double measured, double tolerance, std::string detail = {}) {
  PropertyResult r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.status = measured <= tolerance ? Status::kPass : Status::kFail;
  r.detail = std::move(detail);
  return r;
}

ComplexMatrix random_psd(RngStream& rng, int n) {
  const ComplexMatrix b = sample_cn01(rng, n, n);
  ComplexMatrix a = hermitian_part(b * b.adjoint());
  a.diagonal().array() += 1.0;
  return a;
}

}  // namespace

std::vector<double> direct_sinr(const ChannelRealization& real) {
  const double m = real.M();
  const ComplexMatrix g = mmse_filter(real);
  ComplexMatrix cov = (real.snr_linear / m) * (real.H * real.H.adjoint());
  if (real.has_interference()) {
    cov += (real.inr_linear / m) * interference_gram(real);
  }
  cov.diagonal().array() += 1.0;
  const ComplexMatrix out_cov = g * cov * g.adjoint();
  const ComplexMatrix gain = g * real.H;
  std::vector<double> sinr(static_cast<std::size_t>(real.M()));
  for (Eigen::Index i = 0; i < gain.rows(); ++i) {
    const double signal = real.snr_linear / m * std::norm(gain(i, i));
    const double rest = out_cov(i, i).real() - signal;
    sinr[static_cast<std::size_t>(i)] = signal / rest;
  }
  return sinr;
}

std::vector<ChannelRealization> sample_ensemble(const SystemConfig& config, int count) {
  std::vector<ChannelRealization> out;
  out.reserve(static_cast<std::size_t>(count));
  SystemConfig c = config;
  c.trials_per_point = std::max<std::int64_t>(c.trials_per_point, count);
  const auto points = c.snr_grid_db.size();
  for (int i = 0; i < count; ++i) {
    const auto point = static_cast<std::size_t>(i) % points;
    out.push_back(sample_realization(c, point, static_cast<std::uint64_t>(i)));
  }
  return out;
}

double tail_exponent(std::vector<double> samples, double quantile) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const auto k = static_cast<std::size_t>(std::floor(quantile * n));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(samples[j] > 0.0)) {
      continue;
    }
    const double x = std::log(samples[j]);
    const double y = std::log(static_cast<double>(j + 1) / n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 3) {
    throw std::invalid_argument("tail_exponent: too few samples in the tail");
  }
  const double u = static_cast<double>(used);
  return (sxy - sx * sy / u) / (sxx - sx * sx / u);
}

std::vector<double> sample_lambda_min(std::uint64_t seed, int M, int N, std::int64_t samples) {
  std::vector<double> out(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < samples; ++t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t), 0xE16E0000ULL);
    const ComplexMatrix h = sample_cn01(rng, N, M);
    out[static_cast<std::size_t>(t)] = smallest_eigenvalue(hermitian_part(h.adjoint() * h));
  }
  return out;
}

//---------------------------------------------------------------------------//
PropertyResult check_hermitian_inverse(std::uint64_t seed, int count, int max_dim,
                                       const Tolerances& tol) {
  RngStream rng(seed, 0, 0x1A7E0000ULL);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = 1 + i % max_dim;
    const ComplexMatrix a = random_psd(rng, n);
    const ComplexMatrix inv = HermitianFactor(a, tol.hermitian).inverse();
    const double res = (a * inv - ComplexMatrix::Identity(n, n)).norm() / std::sqrt(double(n));
    worst = std::max(worst, res);
  }
  return verdict("hermitian-inverse-residual", worst, tol.residual);
}

PropertyResult check_eigen_identities(std::uint64_t seed, int count, int max_dim,
                                      const Tolerances& tol) {
  RngStream rng(seed, 0, 0xE1CE0000ULL);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = 1 + i % max_dim;
    const ComplexMatrix b = sample_cn01(rng, n, n);
    const ComplexMatrix a = hermitian_part(b + b.adjoint());
    const auto eig = hermitian_eigenvalues(a, tol.hermitian);
    double sum = 0.0, prod = 1.0, abs_sum = 0.0;
    for (double v : eig) {
      sum += v;
      prod *= v;
      abs_sum += std::abs(v);
    }
    const double trace = a.trace().real();
    const double det = a.determinant().real();
    worst = std::max(worst, std::abs(sum - trace) / std::max(1.0, abs_sum));
    worst = std::max(worst, rel_err(prod, det));
  }
  return verdict("eigenvalue-trace-determinant", worst, tol.eigen_identity);
}

PropertyResult check_woodbury(std::span<const ChannelRealization> reals, const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& real : reals) {
    const auto fast = sinr_per_stream(real);
    const auto slow = direct_sinr(real);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      worst = std::max(worst, rel_err(fast[i], slow[i]));
    }
  }
  return verdict("woodbury-sinr", worst, tol.woodbury,
                 std::to_string(reals.size()) + " realizations");
}

PropertyResult check_mi_routes(std::span<const ChannelRealization> reals, const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& real : reals) {
    const auto ev = evaluate_mmse(real);
    worst = std::max(worst, rel_err(ev.mutual_info_bits, ev.mutual_info_diag_bits));
  }
  return verdict("mutual-information-routes", worst, tol.mi_routes);
}

PropertyResult check_sandwich(std::span<const ChannelRealization> reals, const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& real : reals) {
    const auto ev = evaluate_mmse(real);
    const double scale = std::max(1.0, ev.mutual_info_bits);
    worst = std::max(worst, (ev.jensen_lower_bits - ev.mutual_info_bits) / scale);
    worst = std::max(worst, (ev.mutual_info_bits - ev.jensen_upper_bits) / scale);
  }
  return verdict("jensen-sandwich", std::max(worst, 0.0), tol.sandwich);
}

PropertyResult check_logdet(std::span<const ChannelRealization> reals, const Tolerances& tol) {
  double worst = 0.0;
  for (const auto& real : reals) {
    const auto ev = evaluate_mmse(real);
    worst = std::max(worst, (ev.mutual_info_bits - ev.logdet_upper_bits) /
                                std::max(1.0, ev.logdet_upper_bits));
  }
  return verdict("logdet-domination", std::max(worst, 0.0), tol.sandwich);
}

PropertyResult check_identity_equality(int max_M, double snr_linear, const Tolerances& tol) {
  double worst = 0.0;
  for (int m = 1; m <= max_M; ++m) {
    const auto ev = evaluate_mmse(make_realization(ComplexMatrix::Identity(m, m), snr_linear));
    const double scale = std::max(1.0, ev.mutual_info_bits);
    worst = std::max(worst, std::abs(ev.jensen_lower_bits - ev.mutual_info_bits) / scale);
    worst = std::max(worst, std::abs(ev.jensen_upper_bits - ev.mutual_info_bits) / scale);
  }
  return verdict("jensen-identity-equality", worst, tol.sandwich);
}

PropertyResult check_snr_monotonic(std::span<const ChannelRealization> reals) {
  static constexpr double kFactors[] = {0.1, 0.5, 1.0, 2.0, 10.0};
  double worst = 0.0;
  for (const auto& base : reals) {
    double prev = -1.0;
    for (double f : kFactors) {
      ChannelRealization r = base;
      r.snr_linear = base.snr_linear * f;
      const double mi = mutual_information(r);
      if (prev >= 0.0) {
        worst = std::max(worst, (prev - mi) / std::max(1.0, prev));
      }
      prev = mi;
    }
  }
  return verdict("snr-monotonicity", std::max(worst, 0.0), 1e-12);
}

PropertyResult check_interference_penalty(std::span<const ChannelRealization> reals) {
  double worst = 0.0;
  std::size_t used = 0;
  for (const auto& real : reals) {
    if (!real.has_interference()) {
      continue;
    }
    const double with = mutual_information(real);
    const double without = mutual_information(make_realization(real.H, real.snr_linear));
    worst = std::max(worst, (with - without) / std::max(1.0, without));
    ++used;
  }
  if (used == 0) {
    PropertyResult r;
    r.name = "interference-penalty";
    r.status = Status::kSkip;
    r.detail = "no interferers";
    return r;
  }
  return verdict("interference-penalty", std::max(worst, 0.0), 1e-10);
}

PropertyResult check_eigen_tail(std::uint64_t seed, int M, int N, std::int64_t samples,
                                const Tolerances& tol) {
  const double expected = N - M + 1;
  const double est = tail_exponent(sample_lambda_min(seed, M, N, samples), 0.01);
  std::ostringstream os;
  os << "exponent=" << est << " expected=" << expected;
  auto r = verdict("eigenvalue-tail-exponent", std::abs(est - expected), tol.tail_exponent,
                   os.str());
  return r;
}

PropertyResult check_decomposition(int M, int N, int grid, const Tolerances& tol) {
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double xi = 0.9 * i / (grid - 1);
    const double r_max = M * (1.0 - xi);
    for (int j = 0; j < grid; ++j) {
      const double r = r_max * j / (grid - 1);
      const auto d = dmt_decomposition_check(M, N, r, xi);
      worst = std::max({worst, std::abs(d.direct - d.diversity_shift),
                        std::abs(d.direct - d.rate_shift)});
    }
  }
  return verdict("dmt-decomposition", worst, tol.decomposition);
}

}  // namespace dmtsim::checks
