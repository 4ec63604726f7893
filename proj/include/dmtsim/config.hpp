#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dmtsim/analysis.hpp"
#include "dmtsim/checks.hpp"
#include "dmtsim/model.hpp"

namespace dmtsim::cli {

/// Malformed configuration text. The message carries "origin:line: ".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kSweep, kDmtSurface, kVerify };

struct SurfaceGrid {
  std::vector<double> r;
  std::vector<double> xi;
};

struct VerifyOptions {
  int realizations = 1000;
  std::int64_t tail_samples = 1000000;
};

/// Everything a run needs once the file and overrides are resolved.
struct RunConfig {
  SystemConfig system;
  FitWindow fit;
  SurfaceGrid surface;
  checks::Tolerances tol;
  VerifyOptions verify;
};

/// One `key = value` entry with where it came from.
struct Entry {
  std::string value;
  std::string origin;  ///< file name or "--set"
  int line = 0;

  std::string where() const;
};

/// Keys are "section.name", e.g. "system.M".
using RawConfig = std::map<std::string, Entry>;

RawConfig read_config_text(std::string_view text, const std::string& origin);
RawConfig read_config_file(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(RawConfig& raw, std::string_view assignment);

/// Numbers separated by commas, or an inclusive `start:step:stop` range.
std::vector<double> parse_grid(std::string_view text);

/// Typed, validated configuration. Throws ParseError for malformed values and
/// unknown keys, ValidationError (message prefixed with the location) for
/// model invariant violations.
RunConfig resolve(const RawConfig& raw, Command command);

RunConfig parse_config(const std::filesystem::path& path, Command command,
                       const std::vector<std::string>& overrides = {});

/// `key = value` lines echoing the resolved configuration in a fixed order.
std::vector<std::string> echo_lines(const RunConfig& config, Command command);

}  // namespace dmtsim::cli
