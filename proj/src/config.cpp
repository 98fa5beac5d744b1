#include "chlog/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chlog/convergence.hpp"
#include "chlog/errors.hpp"
#include "chlog/grid.hpp"

namespace chlog {
namespace {

constexpr std::array<std::string_view, 13> kKnownKeys = {
    "grid_n", "nu",     "theta", "theta_c", "scheme", "tau",    "n_steps",
    "t_final", "init",  "seed",  "guard",   "cadence", "out_dir"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

const std::string& require(const ConfigMap& map, const char* key) {
  const auto it = map.find(key);
  if (it == map.end()) {
    throw ConfigError(std::string("missing required key '") + key + "'");
  }
  return it->second;
}

}  // namespace

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("invalid number '" + std::string(text) + "' for " +
                      std::string(what));
  }
  return value;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid integer '" + std::string(text) + "' for " +
                      std::string(what));
  }
  return value;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_double(part, "list entry"));
  return out;
}

SchemeKind parse_scheme(std::string_view text, int* cutoff) {
  text = trim(text);
  if (text == "semi_implicit") return SchemeKind::semi_implicit;
  if (text == "variant") return SchemeKind::variant;
  if (text.starts_with("galerkin:")) {
    const auto n = parse_int(text.substr(9), "galerkin cutoff");
    if (cutoff != nullptr) *cutoff = static_cast<int>(n);
    return SchemeKind::galerkin;
  }
  throw ConfigError("unknown scheme '" + std::string(text) +
                    "' (expected semi_implicit, variant or galerkin:N)");
}

InitialDataSpec parse_init(std::string_view text) {
  const auto parts = split(trim(text), ':');
  const auto kind = parts[0];
  auto arity = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw ConfigError("init '" + std::string(text) + "' expects " +
                        std::to_string(n) + " parameter(s)");
    }
  };
  if (kind == "constant") {
    arity(1);
    return InitialDataSpec::constant(parse_double(parts[1], "init constant"));
  }
  if (kind == "mode") {
    arity(4);
    return InitialDataSpec::single_mode(
        parse_double(parts[1], "init mode c"),
        static_cast<int>(parse_int(parts[2], "init mode k1")),
        static_cast<int>(parse_int(parts[3], "init mode k2")),
        parse_double(parts[4], "init mode eps"));
  }
  if (kind == "random") {
    arity(2);
    return InitialDataSpec::random_bandlimited(
        static_cast<int>(parse_int(parts[1], "init random kmax")),
        parse_double(parts[2], "init random amp"));
  }
  if (kind == "two_bump") {
    arity(0);
    return InitialDataSpec::two_bump();
  }
  throw ConfigError("unknown init kind '" + std::string(kind) + "'");
}

GuardPolicy parse_guard(std::string_view text) {
  const auto parts = split(trim(text), ':');
  GuardPolicy policy;
  if (parts[0] == "abort") {
    policy.mode = GuardMode::abort;
  } else if (parts[0] == "saturate") {
    policy.mode = GuardMode::saturate;
  } else {
    throw ConfigError("unknown guard '" + std::string(text) + "'");
  }
  if (parts.size() == 2) {
    policy.eps = parse_double(parts[1], "guard eps");
  } else if (parts.size() > 2) {
    throw ConfigError("guard expects mode[:eps]");
  }
  try {
    policy.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return policy;
}

ConfigMap parse_config_map(std::string_view text) {
  ConfigMap map;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key=value, got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ConfigError("unknown key '" + key + "' on line " +
                        std::to_string(line_no));
    }
    if (!map.emplace(key, value).second) {
      throw ConfigError("duplicate key '" + key + "' on line " +
                        std::to_string(line_no));
    }
  }
  return map;
}

RunConfig config_from_map(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  RunConfig cfg;
  const auto n = parse_int(require(map, "grid_n"), "grid_n");
  cfg.nu = parse_double(require(map, "nu"), "nu");
  cfg.theta = parse_double(require(map, "theta"), "theta");
  cfg.theta_c = parse_double(require(map, "theta_c"), "theta_c");
  cfg.scheme = parse_scheme(require(map, "scheme"), &cfg.galerkin_cutoff);
  cfg.init = parse_init(require(map, "init"));

  if (cfg.nu <= 0) throw ConfigError("nu must be positive");
  if (cfg.theta <= 0) throw ConfigError("theta must be positive");
  if (cfg.theta_c <= 0) throw ConfigError("theta_c must be positive");
  if (!(cfg.theta < cfg.theta_c)) throw ConfigError("theta must be < theta_c");

  GridHandle<double> grid;
  try {
    grid = make_grid(static_cast<int>(n));
  } catch (const GridError& e) {
    throw ConfigError(std::string("grid_n: ") + e.what());
  }
  cfg.grid_n = static_cast<int>(n);

  const auto params = cfg.params();
  const std::string& tau_text = require(map, "tau");
  if (trim(tau_text) == "auto") {
    const double bound = max_admissible_tau(params, *grid, cfg.scheme);
    if (!std::isfinite(bound)) {
      throw ConfigError("tau=auto needs a bounded admissible step; the variant "
                        "scheme accepts any tau > 0, give one explicitly");
    }
    cfg.tau_auto = true;
    cfg.tau = 0.5 * bound;
  } else {
    cfg.tau = parse_double(tau_text, "tau");
  }

  const bool has_steps = map.contains("n_steps");
  const bool has_final = map.contains("t_final");
  if (has_steps == has_final) {
    throw ConfigError("exactly one of n_steps and t_final must be given");
  }
  if (has_steps) {
    cfg.n_steps = parse_int(map.at("n_steps"), "n_steps");
    if (*cfg.n_steps < 0) throw ConfigError("n_steps must be non-negative");
  } else {
    cfg.t_final = parse_double(map.at("t_final"), "t_final");
    if (*cfg.t_final <= 0) throw ConfigError("t_final must be positive");
  }

  if (const auto it = map.find("seed"); it != map.end()) {
    const auto seed = parse_int(it->second, "seed");
    if (seed < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto it = map.find("guard"); it != map.end()) {
    cfg.guard = parse_guard(it->second);
  }
  if (const auto it = map.find("cadence"); it != map.end()) {
    cfg.cadence = parse_int(it->second, "cadence");
    if (cfg.cadence < 0) throw ConfigError("cadence must be non-negative");
  }
  if (const auto it = map.find("out_dir"); it != map.end()) {
    cfg.out_dir = it->second;
  }

  try {
    validate(cfg.scheme_config(), *grid);
    if (cfg.t_final) steps_to_reach(*cfg.t_final, cfg.tau);
    if (!(documented_margin(cfg.init) > 0.0)) {
      throw DomainError("init violates the separation bound");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig parse_config(std::string_view text) {
  return config_from_map(parse_config_map(text));
}

ConfigMap load_config_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_map(buf.str());
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_map(load_config_map(path));
}

SchemeConfig RunConfig::scheme_config() const {
  return SchemeConfig{.kind = scheme,
                      .tau = tau,
                      .params = params(),
                      .guard = guard,
                      .galerkin_cutoff = galerkin_cutoff};
}

std::int64_t RunConfig::total_steps() const {
  if (n_steps) return *n_steps;
  return steps_to_reach(*t_final, tau);
}

}  // namespace chlog
