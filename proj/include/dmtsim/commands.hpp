#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dmtsim/analysis.hpp"
#include "dmtsim/config.hpp"

namespace dmtsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRunInvalid = 3;

struct RunSpec {
  Command command = Command::kSweep;
  std::filesystem::path config_path;
  std::filesystem::path output_dir = ".";
  std::vector<std::string> overrides;
  int workers = 0;  ///< 0 keeps the OpenMP default
  std::optional<std::uint64_t> seed;
};

const char* command_name(Command command);

/// Comment block that opens every output file.
std::string output_header(const RunConfig& config, Command command);

std::string format_outage_csv(const RunConfig& config, const OutageCurve& curve);
std::string format_surface_csv(const RunConfig& config);

int run_sweep(const RunSpec& spec, std::ostream& out, std::ostream& err);
int run_dmt_surface(const RunSpec& spec, std::ostream& out, std::ostream& err);
int run_verify(const RunSpec& spec, std::ostream& out, std::ostream& err);
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace dmtsim::cli
