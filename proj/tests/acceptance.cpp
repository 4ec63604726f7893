// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// fails. Pass criterion numbers as arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "dmtsim/analysis.hpp"
#include "dmtsim/checks.hpp"
#include "dmtsim/commands.hpp"

using namespace dmtsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* kUplink = R"([system]
M = 2
N = 4
interferers = 3
xi = 0.5

[sweep]
snr_db = 15:2.5:40
trials = 1000000

[rate]
mode = fixed
R = 5
)";

cli::RunConfig uplink_config(int interferers) {
  auto raw = cli::read_config_text(kUplink, "uplink");
  cli::apply_override(raw, "system.interferers=" + std::to_string(interferers));
  return cli::resolve(raw, cli::Command::kSweep);
}

// Sweeps are shared between criteria 7, 8 and 10.
const OutageCurve& uplink_curve(int interferers) {
  static std::map<int, OutageCurve> cache;
  auto it = cache.find(interferers);
  if (it == cache.end()) {
    it = cache.emplace(interferers, sweep_curve(uplink_config(interferers).system)).first;
  }
  return it->second;
}

std::string describe(const DmtEstimate& e) {
  return "d_hat=" + fmt_double(e.slope) + " se=" + fmt_double(e.stderr_) +
         " points=" + std::to_string(e.points_used);
}

Outcome closed_forms() {
  const double a = dmt_theoretical(2, 4, 0, 0.5);
  const double b = dmt_theoretical(2, 4, 1, 0);
  const double c = dmt_p2p(2, 4, 0);
  const double d = ml_dmt_reference(2, 4, 0);
  return {a == 1.5 && b == 1.5 && c == 3.0 && d == 8.0,
          fmt_double(a) + " " + fmt_double(b) + " " + fmt_double(c) + " " + fmt_double(d)};
}

Outcome decomposition() {
  checks::Tolerances tol;
  tol.decomposition = 1e-12;
  const auto r = checks::check_decomposition(2, 4, 10, tol);
  return {r.status == checks::Status::kPass, "max_err=" + fmt_double(r.measured)};
}

std::vector<ChannelRealization> oracle_ensemble() {
  std::vector<ChannelRealization> out;
  std::uint64_t seed = 0;
  for (int M = 1; M <= 4; ++M) {
    for (int N = M; N <= 6; ++N) {
      for (int K1 = 0; K1 <= 4; ++K1) {
        SystemConfig c;
        c.M = M;
        c.N = N;
        c.num_interferers = K1;
        c.xi = 0.5;
        c.snr_grid_db = {10.0, 20.0, 30.0};
        c.seed = seed++;
        const auto part = checks::sample_ensemble(validated(c), 12);
        out.insert(out.end(), part.begin(), part.end());
      }
    }
  }
  return out;
}

Outcome woodbury() {
  const auto reals = oracle_ensemble();
  checks::Tolerances tol;
  tol.woodbury = 1e-8;
  const auto r = checks::check_woodbury(reals, tol);
  return {r.status == checks::Status::kPass && reals.size() >= 1000,
          std::to_string(reals.size()) + " realizations, max_rel_err=" + fmt_double(r.measured)};
}

Outcome sandwich() {
  const auto reals = oracle_ensemble();
  checks::Tolerances tol;
  tol.sandwich = 1e-10;
  const auto s = checks::check_sandwich(reals, tol);
  bool pass = s.status == checks::Status::kPass;
  double worst_eq = 0.0;
  for (double snr_db : {0.0, 10.0, 20.0, 30.0}) {
    const auto e = checks::check_identity_equality(4, db_to_linear(snr_db), tol);
    pass = pass && e.status == checks::Status::kPass;
    worst_eq = std::max(worst_eq, e.measured);
  }
  return {pass, "sandwich_violation=" + fmt_double(s.measured) +
                    " identity_gap=" + fmt_double(worst_eq)};
}

Outcome scalar_rayleigh() {
  SystemConfig c;
  c.snr_grid_db = {5.0, 10.0, 15.0, 20.0, 25.0};
  c.rate = FixedRate{2.0};
  c.trials_per_point = 100000;
  const auto curve = sweep_curve(validated(c));
  bool pass = true;
  std::string detail;
  for (const auto& p : curve.points) {
    const double oracle = -std::expm1(-(std::exp2(2.0) - 1.0) / p.snr_linear);
    const bool inside = p.ci_low <= oracle && oracle <= p.ci_high;
    pass = pass && inside;
    detail += fmt_double(p.snr_db) + "dB:" + fmt_double(p.p_out) + (inside ? "" : "(miss vs ") +
              (inside ? "" : fmt_double(oracle) + ")") + " ";
  }
  return {pass, detail};
}

Outcome eigen_tail() {
  checks::Tolerances tol;
  tol.tail_exponent = 0.3;
  const auto r = checks::check_eigen_tail(0, 2, 4, 1000000, tol);
  return {r.status == checks::Status::kPass, r.detail};
}

Outcome uplink_slope() {
  const auto est = estimate_slope(uplink_curve(3));
  return {std::abs(est.slope - 1.5) <= 0.3, describe(est)};
}

Outcome interferer_invariance() {
  const std::vector<int> counts = {1, 3, 6};
  std::vector<DmtEstimate> est;
  std::string detail;
  for (int k : counts) {
    est.push_back(estimate_slope(uplink_curve(k)));
    detail += "K-1=" + std::to_string(k) + ":" + describe(est.back()) + " ";
  }
  bool slopes_ok = true;
  for (std::size_t i = 0; i < est.size(); ++i) {
    for (std::size_t j = i + 1; j < est.size(); ++j) {
      const double bound = 2.0 * std::hypot(est[i].stderr_, est[j].stderr_);
      if (std::abs(est[i].slope - est[j].slope) > bound) {
        slopes_ok = false;
        detail += "[K-1=" + std::to_string(counts[i]) + " vs " + std::to_string(counts[j]) +
                  ": |diff|=" + fmt_double(std::abs(est[i].slope - est[j].slope)) +
                  " > " + fmt_double(bound) + "] ";
      }
    }
  }
  bool order_ok = true;
  const auto n_points = uplink_curve(1).points.size();
  for (std::size_t p = 0; p < n_points; ++p) {
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
      const auto& lo = uplink_curve(counts[i]).points[p];
      const auto& hi = uplink_curve(counts[i + 1]).points[p];
      if (lo.p_out > hi.p_out && lo.ci_low > hi.ci_high) {
        order_ok = false;
        detail += "[order broken at " + fmt_double(lo.snr_db) + " dB] ";
      }
    }
  }
  detail += slopes_ok ? "slopes agree; " : "slopes disagree; ";
  detail += order_ok ? "p_out ordered" : "p_out order violated";
  return {slopes_ok && order_ok, detail};
}

Outcome p2p_reduction() {
  auto raw = cli::read_config_text(
      "[system]\nM = 2\nN = 2\n[sweep]\nsnr_db = 10:2.5:35\ntrials = 1000000\n"
      "[rate]\nmode = fixed\nR = 4\n",
      "p2p");
  const auto rc = cli::resolve(raw, cli::Command::kSweep);
  const auto est = estimate_slope(sweep_curve(rc.system));
  return {std::abs(est.slope - 1.0) <= 0.3, describe(est)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "dmtsim_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "uplink.ini") << kUplink;
  const auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const int previous = max_workers();
  std::string files[2];
  const int workers[2] = {1, 8};
  for (int i = 0; i < 2; ++i) {
    cli::RunSpec spec;
    spec.config_path = dir / "uplink.ini";
    spec.output_dir = dir / std::to_string(workers[i]);
    spec.workers = workers[i];
    std::ostringstream sink;
    if (cli::run_sweep(spec, sink, sink) != cli::kExitOk) {
      return {false, "sweep failed with " + std::to_string(workers[i]) + " workers"};
    }
    files[i] = read(spec.output_dir / "outage.csv");
  }
  set_workers(previous);
  // The criterion-7 sweep is the third run.
  const auto rc = uplink_config(3);
  const auto again = cli::format_outage_csv(rc, uplink_curve(3));
  fs::remove_all(dir);
  const bool pass = !files[0].empty() && files[0] == files[1] && files[0] == again;
  return {pass, std::to_string(files[0].size()) + " bytes; 1 vs 8 workers " +
                    (files[0] == files[1] ? "identical" : "differ") + "; repeat run " +
                    (files[0] == again ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form tradeoff values", closed_forms},
      {"decomposition identity", decomposition},
      {"woodbury vs direct SINR", woodbury},
      {"jensen sandwich and identity equality", sandwich},
      {"scalar rayleigh outage oracle", scalar_rayleigh},
      {"eigenvalue tail exponent", eigen_tail},
      {"slope with 3 interferers", uplink_slope},
      {"interferer-count invariance", interferer_invariance},
      {"point-to-point reduction", p2p_reduction},
      {"determinism across runs and workers", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    selected.insert(std::atoi(argv[i]));
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s  criterion %2d  %-40s %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
