#include "dmtsim/commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace dmtsim::cli {
namespace {

std::string num(double v) {
  return fmt::format("{:.17g}", v);
}

/// Parses the config (with --seed folded in as an override). Returns nullopt
/// after reporting the error.
std::optional<RunConfig> load(const RunSpec& spec, std::ostream& err) {
  auto overrides = spec.overrides;
  if (spec.seed) {
    overrides.push_back("rng.seed=" + std::to_string(*spec.seed));
  }
  try {
    return parse_config(spec.config_path, spec.command, overrides);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
  }
  return std::nullopt;
}

bool write_file(const std::filesystem::path& path, const std::string& body, std::ostream& err) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << body;
  if (!f) {
    err << "cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

bool prepare_output(const RunSpec& spec, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) {
    err << "cannot create output directory " << spec.output_dir.string() << ": "
        << ec.message() << "\n";
    return false;
  }
  return true;
}

}  // namespace

const char* command_name(Command command) {
  switch (command) {
    case Command::kSweep:
      return "sweep";
    case Command::kDmtSurface:
      return "dmt-surface";
    case Command::kVerify:
      return "verify";
  }
  return "?";
}

std::string output_header(const RunConfig& config, Command command) {
  std::string out = fmt::format("# dmt-sim {}\n# command = {}\n", DMTSIM_VERSION,
                                command_name(command));
  for (const auto& line : echo_lines(config, command)) {
    out += "# " + line + "\n";
  }
  return out;
}

std::string format_outage_csv(const RunConfig& config, const OutageCurve& curve) {
  std::string out = output_header(config, Command::kSweep);
  out += "snr_db,target_rate_bits,trials,outages,p_out,ci_low,ci_high,discarded\n";
  for (const auto& p : curve.points) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", num(p.snr_db), num(p.target_rate_bits),
                       p.trials, p.outages, num(p.p_out), num(p.ci_low), num(p.ci_high),
                       p.discarded);
  }
  return out;
}

std::string format_surface_csv(const RunConfig& config) {
  const int M = config.system.M;
  const int N = config.system.N;
  std::string out = output_header(config, Command::kDmtSurface);
  out += "r,xi,d_mmse,d_p2p,d_ml\n";
  for (double xi : config.surface.xi) {
    for (double r : config.surface.r) {
      out += fmt::format("{},{},{},{},{}\n", num(r), num(xi), num(dmt_theoretical(M, N, r, xi)),
                         num(dmt_p2p(M, N, r)), num(ml_dmt_interpolated(M, N, r)));
    }
  }
  return out;
}

//---------------------------------------------------------------------------//
int run_sweep(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto config = load(spec, err);
  if (!config) {
    return kExitConfigError;
  }
  if (spec.workers > 0) {
    set_workers(spec.workers);
  }
  if (!prepare_output(spec, err)) {
    return kExitConfigError;
  }

  const auto& sys = config->system;
  std::string summary = output_header(*config, Command::kSweep);
  OutageCurve curve{sys, {}};
  try {
    for (std::size_t i = 0; i < sys.snr_grid_db.size(); ++i) {
      curve.points.push_back(estimate_outage_at(sys, i));
      const auto& p = curve.points.back();
      err << fmt::format("[{}/{}] {} dB  p_out={:.4g}  trials={}\n", i + 1,
                         sys.snr_grid_db.size(), p.snr_db, p.p_out, p.trials);
    }
  } catch (const RunInvalid& e) {
    err << "run invalid: " << e.what() << "\n";
    summary += fmt::format("status = RunInvalid\nreason = {}\n", e.what());
    write_file(spec.output_dir / "summary.txt", summary, err);
    return kExitRunInvalid;
  }

  if (!write_file(spec.output_dir / "outage.csv", format_outage_csv(*config, curve), err)) {
    return kExitRunInvalid;
  }

  std::int64_t discarded = 0;
  for (const auto& p : curve.points) {
    discarded += p.discarded;
  }
  const double d_theory =
      dmt_theoretical(sys.M, sys.N, sys.multiplexing_gain(), sys.reference_xi());
  summary += "status = ok\n";
  summary += fmt::format("points = {}\ndiscarded_total = {}\n", curve.points.size(), discarded);
  summary += fmt::format("fit_window = [{}, {}]\nfit_min_events = {}\n", num(config->fit.p_min),
                         num(config->fit.p_max), config->fit.min_events);
  summary += fmt::format("d_theoretical = {}\n", num(d_theory));
  try {
    const auto est = estimate_slope(curve, config->fit);
    summary += "slope_status = ok\n";
    summary += fmt::format("d_hat = {}\nd_stderr = {}\npoints_used = {}\n", num(est.slope),
                           num(est.stderr_), est.points_used);
    out << fmt::format("d_hat = {:.4f} +/- {:.4f} over {} points (theory {:.4f})\n", est.slope,
                       est.stderr_, est.points_used, d_theory);
  } catch (const InsufficientPoints& e) {
    summary += "slope_status = InsufficientPoints\n";
    summary += fmt::format("slope_note = {}\n", e.what());
    err << "warning: InsufficientPoints: " << e.what() << "\n";
  }
  if (!write_file(spec.output_dir / "summary.txt", summary, err)) {
    return kExitRunInvalid;
  }
  return kExitOk;
}

int run_dmt_surface(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto config = load(spec, err);
  if (!config) {
    return kExitConfigError;
  }
  if (!prepare_output(spec, err)) {
    return kExitConfigError;
  }
  const auto path = spec.output_dir / "dmt_surface.csv";
  if (!write_file(path, format_surface_csv(*config), err)) {
    return kExitConfigError;
  }
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int run_verify(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto config = load(spec, err);
  if (!config) {
    return kExitConfigError;
  }
  if (spec.workers > 0) {
    set_workers(spec.workers);
  }
  const auto& sys = config->system;
  const auto& tol = config->tol;
  const auto ensemble = checks::sample_ensemble(sys, config->verify.realizations);

  std::vector<checks::PropertyResult> results;
  results.push_back(checks::check_hermitian_inverse(sys.seed, 200, 8, tol));
  results.push_back(checks::check_eigen_identities(sys.seed, 200, 8, tol));
  results.push_back(checks::check_woodbury(ensemble, tol));
  results.push_back(checks::check_mi_routes(ensemble, tol));
  results.push_back(checks::check_sandwich(ensemble, tol));
  results.push_back(checks::check_identity_equality(sys.M, db_to_linear(sys.snr_grid_db.back()), tol));
  results.push_back(checks::check_logdet(ensemble, tol));
  results.push_back(checks::check_snr_monotonic(ensemble));
  results.push_back(checks::check_interference_penalty(ensemble));
  results.push_back(checks::check_eigen_tail(sys.seed, sys.M, sys.N, config->verify.tail_samples, tol));
  results.push_back(checks::check_decomposition(sys.M, sys.N, 10, tol));

  out << output_header(*config, Command::kVerify);
  bool all_ok = true;
  for (const auto& r : results) {
    if (r.status == checks::Status::kSkip) {
      out << fmt::format("SKIP  {:<30} ({})\n", r.name, r.detail);
      continue;
    }
    const bool pass = r.status == checks::Status::kPass;
    all_ok = all_ok && pass;
    out << fmt::format("{}  {:<30} measured={:.3e} tol={:.3e}{}\n", pass ? "PASS" : "FAIL",
                       r.name, r.measured, r.tolerance,
                       r.detail.empty() ? "" : "  " + r.detail);
  }
  out << (all_ok ? "all properties passed\n" : "property failures detected\n");
  return all_ok ? kExitOk : kExitPropertyFailure;
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  switch (spec.command) {
    case Command::kSweep:
      return run_sweep(spec, out, err);
    case Command::kDmtSurface:
      return run_dmt_surface(spec, out, err);
    case Command::kVerify:
      return run_verify(spec, out, err);
  }
  return kExitConfigError;
}

}  // namespace dmtsim::cli
