#include "dmtsim/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace dmtsim::cli {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.M",        "system.N",          "system.interferers", "system.xi",
      "system.xi_k",     "sweep.snr_db",      "sweep.trials",       "sweep.target_outages",
      "rate.mode",       "rate.R",            "rate.r",             "rng.seed",
      "fit.p_min",       "fit.p_max",         "fit.min_events",     "surface.r",
      "surface.xi",      "tol.hermitian",     "tol.residual",       "tol.eigen_identity",
      "tol.woodbury",    "tol.mi_routes",     "tol.sandwich",       "tol.decomposition",
      "tol.tail_exponent", "verify.realizations", "verify.tail_samples"};
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const Entry& e, const std::string& key, const std::string& message) {
  throw ParseError(e.where() + ": " + key + ": " + message);
}

double to_double(std::string_view text, bool& ok) {
  const std::string s(trim(text));
  if (s.empty()) {
    ok = false;
    return 0.0;
  }
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  ok = end == s.c_str() + s.size() && errno == 0 && std::isfinite(v);
  return v;
}

template <class Int>
Int to_int(std::string_view text, bool& ok) {
  const auto s = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  ok = !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
  return v;
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  const Entry* find(const std::string& key) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &it->second;
  }

  double real(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    bool ok = false;
    const double v = to_double(e->value, ok);
    if (!ok) {
      fail(*e, key, "expected a number, got '" + e->value + "'");
    }
    return v;
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) const {
    const Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    bool ok = false;
    const Int v = to_int<Int>(e->value, ok);
    if (!ok) {
      fail(*e, key, "expected an integer, got '" + e->value + "'");
    }
    return v;
  }

  std::vector<double> grid(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    try {
      return parse_grid(e ? e->value : fallback);
    } catch (const std::invalid_argument& ex) {
      if (!e) {
        throw;
      }
      fail(*e, key, ex.what());
    }
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  std::string where(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->where() : std::string("(default)");
  }

 private:
  const RawConfig& raw_;
};

std::string num(double v) {
  return fmt::format("{:.17g}", v);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? ", " : "") + num(values[i]);
  }
  return out;
}

}  // namespace

std::string Entry::where() const {
  return line > 0 ? origin + ":" + std::to_string(line) : origin;
}

RawConfig read_config_text(std::string_view text, const std::string& origin) {
  RawConfig raw;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const Entry here{"", origin, line_no};
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError(here.where() + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(here.where() + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw ParseError(here.where() + ": key outside of any [section]");
    }
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    if (!known_keys().count(key)) {
      throw ParseError(here.where() + ": unknown key '" + key + "'");
    }
    if (raw.count(key)) {
      throw ParseError(here.where() + ": duplicate key '" + key + "'");
    }
    raw[key] = Entry{std::string(trim(line.substr(eq + 1))), origin, line_no};
  }
  return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path.string() + ": cannot open config file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_config_text(buf.str(), path.string());
}

void apply_override(RawConfig& raw, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ParseError("--set " + std::string(assignment) + ": expected key=value");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  if (!known_keys().count(key)) {
    throw ParseError("--set " + std::string(assignment) + ": unknown key '" + key + "'");
  }
  raw[key] = Entry{std::string(trim(assignment.substr(eq + 1))), "--set " + key, 0};
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) {
    throw std::invalid_argument("empty list");
  }
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = text.find(':', start);
      bool ok = false;
      parts.push_back(to_double(text.substr(start, colon - start), ok));
      if (!ok) {
        throw std::invalid_argument("malformed range '" + std::string(text) + "'");
      }
      if (colon == std::string_view::npos) {
        break;
      }
      start = colon + 1;
    }
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
      throw std::invalid_argument("range must be start:step:stop with step > 0, stop >= start");
    }
    const auto n = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) {
      out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
    }
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    bool ok = false;
    out.push_back(to_double(text.substr(start, comma - start), ok));
    if (!ok) {
      throw std::invalid_argument("malformed number list '" + std::string(text) + "'");
    }
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

RunConfig resolve(const RawConfig& raw, Command command) {
  const Reader in(raw);
  RunConfig rc;
  SystemConfig& sys = rc.system;

  for (const char* key : {"system.M", "system.N"}) {
    if (!in.has(key)) {
      throw ParseError(std::string("missing required key '") + key + "'");
    }
  }
  sys.M = in.integer<int>("system.M", 1);
  sys.N = in.integer<int>("system.N", 1);
  sys.num_interferers = in.integer<int>("system.interferers", 0);
  sys.xi = in.real("system.xi", 0.0);
  if (in.has("system.xi_k")) {
    sys.xi_k = in.grid("system.xi_k", "");
  }
  sys.snr_grid_db = in.grid("sweep.snr_db", "0:5:30");
  sys.trials_per_point = in.integer<std::int64_t>("sweep.trials", 10000);
  sys.target_outages = in.integer<std::int64_t>("sweep.target_outages", 0);
  sys.seed = in.integer<std::uint64_t>("rng.seed", 0);

  const std::string mode = in.text("rate.mode", "fixed");
  if (mode == "fixed") {
    if (command != Command::kDmtSurface && !in.has("rate.R")) {
      throw ParseError("missing required key 'rate.R' for rate.mode = fixed");
    }
    sys.rate = FixedRate{in.real("rate.R", 1.0)};
  } else if (mode == "scaling") {
    if (command != Command::kDmtSurface && !in.has("rate.r")) {
      throw ParseError("missing required key 'rate.r' for rate.mode = scaling");
    }
    sys.rate = ScalingRate{in.real("rate.r", 0.0)};
  } else {
    fail(*in.find("rate.mode"), "rate.mode", "expected 'fixed' or 'scaling', got '" + mode + "'");
  }

  rc.fit.p_min = in.real("fit.p_min", rc.fit.p_min);
  rc.fit.p_max = in.real("fit.p_max", rc.fit.p_max);
  rc.fit.min_events = in.integer<std::int64_t>("fit.min_events", rc.fit.min_events);

  rc.surface.r = in.grid("surface.r", "0:0.1:" + num(sys.M));
  rc.surface.xi = in.grid("surface.xi", "0:0.05:0.95");

  auto& tol = rc.tol;
  tol.hermitian = in.real("tol.hermitian", tol.hermitian);
  tol.residual = in.real("tol.residual", tol.residual);
  tol.eigen_identity = in.real("tol.eigen_identity", tol.eigen_identity);
  tol.woodbury = in.real("tol.woodbury", tol.woodbury);
  tol.mi_routes = in.real("tol.mi_routes", tol.mi_routes);
  tol.sandwich = in.real("tol.sandwich", tol.sandwich);
  tol.decomposition = in.real("tol.decomposition", tol.decomposition);
  tol.tail_exponent = in.real("tol.tail_exponent", tol.tail_exponent);
  rc.verify.realizations = in.integer<int>("verify.realizations", rc.verify.realizations);
  rc.verify.tail_samples = in.integer<std::int64_t>("verify.tail_samples", rc.verify.tail_samples);

  const auto invalid = [&](const std::string& key, const std::string& msg) {
    throw ValidationError(key, in.where(key) + ": " + key + ": " + msg);
  };

  if (command == Command::kDmtSurface) {
    if (sys.M < 1) invalid("system.M", "M must be >= 1");
    if (sys.N < sys.M) invalid("system.N", "N must be >= M");
    for (double r : rc.surface.r) {
      if (!(r >= 0.0)) invalid("surface.r", "r must be >= 0");
    }
    for (double x : rc.surface.xi) {
      if (!(x >= 0.0 && x < 1.0)) invalid("surface.xi", "xi must lie in [0, 1)");
    }
    return rc;
  }

  try {
    sys = validated(sys);
  } catch (const ValidationError& e) {
    invalid(e.key(), e.what());
  }
  if (!(rc.fit.p_min > 0.0 && rc.fit.p_min < rc.fit.p_max && rc.fit.p_max <= 1.0)) {
    invalid("fit.p_min", "need 0 < p_min < p_max <= 1");
  }
  if (rc.fit.min_events < 0) invalid("fit.min_events", "must be >= 0");
  if (rc.verify.realizations < 1) invalid("verify.realizations", "must be >= 1");
  if (rc.verify.tail_samples < 1000) invalid("verify.tail_samples", "must be >= 1000");
  return rc;
}

RunConfig parse_config(const std::filesystem::path& path, Command command,
                       const std::vector<std::string>& overrides) {
  RawConfig raw = read_config_file(path);
  for (const auto& o : overrides) {
    apply_override(raw, o);
  }
  return resolve(raw, command);
}

std::vector<std::string> echo_lines(const RunConfig& rc, Command command) {
  const auto& s = rc.system;
  std::vector<std::string> out;
  const auto add = [&](const std::string& key, const std::string& value) {
    out.push_back(key + " = " + value);
  };
  add("system.M", std::to_string(s.M));
  add("system.N", std::to_string(s.N));
  if (command == Command::kDmtSurface) {
    add("surface.r", join(rc.surface.r));
    add("surface.xi", join(rc.surface.xi));
    return out;
  }
  add("system.interferers", std::to_string(s.num_interferers));
  add("system.xi", num(s.xi));
  add("system.xi_k", join(s.xi_k));
  add("sweep.snr_db", join(s.snr_grid_db));
  add("sweep.trials", std::to_string(s.trials_per_point));
  add("sweep.target_outages", std::to_string(s.target_outages));
  if (const auto* fixed = std::get_if<FixedRate>(&s.rate)) {
    add("rate.mode", "fixed");
    add("rate.R", num(fixed->bits));
  } else {
    add("rate.mode", "scaling");
    add("rate.r", num(std::get<ScalingRate>(s.rate).r));
  }
  add("rng.seed", std::to_string(s.seed));
  if (command == Command::kSweep) {
    add("fit.p_min", num(rc.fit.p_min));
    add("fit.p_max", num(rc.fit.p_max));
    add("fit.min_events", std::to_string(rc.fit.min_events));
  } else {
    const auto& t = rc.tol;
    add("tol.hermitian", num(t.hermitian));
    add("tol.residual", num(t.residual));
    add("tol.eigen_identity", num(t.eigen_identity));
    add("tol.woodbury", num(t.woodbury));
    add("tol.mi_routes", num(t.mi_routes));
    add("tol.sandwich", num(t.sandwich));
    add("tol.decomposition", num(t.decomposition));
    add("tol.tail_exponent", num(t.tail_exponent));
    add("verify.realizations", std::to_string(rc.verify.realizations));
    add("verify.tail_samples", std::to_string(rc.verify.tail_samples));
  }
  return out;
}

}  // namespace dmtsim::cli
