#pragma once

// Plain-text run configuration: UTF-8 `key = value` lines, '#' starts a
// comment. Keys: grid_n, nu, theta, theta_c, scheme, tau, n_steps, t_final,
// init, seed, guard, cadence, out_dir.
//
//   scheme  semi_implicit | variant | galerkin:N
//   tau     <number> | auto        (auto = 0.5 * max admissible tau)
//   init    constant:c | mode:c:k1:k2:eps | random:kmax:amp | two_bump
//   guard   abort[:eps] | saturate[:eps]

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chlog/initial_data.hpp"
#include "chlog/potential.hpp"
#include "chlog/scheme.hpp"

namespace chlog {

using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
  int grid_n = 0;
  double nu = 0;
  double theta = 0;
  double theta_c = 0;
  SchemeKind scheme = SchemeKind::semi_implicit;
  int galerkin_cutoff = 0;
  bool tau_auto = false;
  /// Resolved step (auto already applied).
  double tau = 0;
  std::optional<std::int64_t> n_steps;
  std::optional<double> t_final;
  InitialDataSpec init;
  std::uint64_t seed = 0;
  GuardPolicy guard;
  std::int64_t cadence = 1;
  std::string out_dir = ".";

  ModelParams params() const { return {nu, theta, theta_c}; }
  SchemeConfig scheme_config() const;
  /// n_steps, or t_final / tau when the run is given by its final time.
  std::int64_t total_steps() const;
};

/// Splits text into key/value pairs; rejects malformed lines, duplicate and
/// unknown keys.
ConfigMap parse_config_map(std::string_view text);

/// Builds and validates a configuration from key/value pairs.
RunConfig config_from_map(const ConfigMap& map);

RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);
ConfigMap load_config_map(const std::filesystem::path& path);

SchemeKind parse_scheme(std::string_view text, int* cutoff);
InitialDataSpec parse_init(std::string_view text);
GuardPolicy parse_guard(std::string_view text);

/// Comma-separated list of doubles.
std::vector<double> parse_double_list(std::string_view text);

double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

}  // namespace chlog
