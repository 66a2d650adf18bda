#ifndef WSLAB_CONFIG_HPP
#define WSLAB_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"
#include "types.hpp"

namespace wslab {

enum class Command { sample, density, coulomb, cumulants, validate };

inline std::string to_string(Command c)
{
  switch (c) {
    case Command::sample: return "sample";
    case Command::density: return "density";
    case Command::coulomb: return "coulomb";
    case Command::cumulants: return "cumulants";
    case Command::validate: return "validate";
  }
  return "sample";
}

inline Command parse_command(const std::string& name)
{
  for (Command c : {Command::sample, Command::density, Command::coulomb, Command::cumulants, Command::validate})
    if (to_string(c) == name) return c;
  fail(ErrorCode::invalid_config, "unknown command '" + name + "'");
}

/// Fully resolved run description; `n_fict` is materialised from the default
/// rule before the config is written, so the file alone reproduces the run.
struct ExperimentConfig {
  Command command = Command::sample;
  int beta = 2;
  int n_open = 1;
  double gamma = 1.0;
  std::optional<int> n_fict;
  std::int64_t n_samples = 1000;
  std::uint64_t seed = 1;
  double mu = 0.0;
  int grid_size = 256;
  double tol = 1e-8;
  int max_iter = 500;
  std::string output_dir = "wslab-out";
  std::vector<std::string> only;
  int threads = 0; ///< 0: WSLAB_THREADS or hardware concurrency; not part of the results

  int resolved_n_fict() const { return n_fict ? *n_fict : CavityModel::default_n_fict(n_open, gamma); }

  void validate() const
  {
    auto check = [](bool ok, const std::string& msg) { require(ok, ErrorCode::invalid_config, msg); };
    check(beta == 1 || beta == 2 || beta == 4, "beta must be 1, 2 or 4");
    check(n_open >= 1 && n_open <= 4096, "n must lie in [1, 4096]");
    check(std::isfinite(gamma) && gamma >= 0.0 && gamma <= 1e6, "gamma must lie in [0, 1e6]");
    check(!n_fict || *n_fict > n_open, "nphi must exceed n");
    check(n_samples >= 1 && n_samples <= 100000000, "samples must lie in [1, 1e8]");
    check(std::isfinite(mu) && std::abs(mu) <= 1.0, "mu must lie in [-1, 1]");
    check(grid_size >= 16 && grid_size <= 8192, "grid must lie in [16, 8192]");
    check(std::isfinite(tol) && tol > 0.0, "tol must be positive");
    check(max_iter >= 1, "max_iter must be positive");
    check(!output_dir.empty(), "out must not be empty");
    check(threads >= 0, "threads must be non-negative");
  }

  /// JSON form with every default written out.
  json to_json() const
  {
    json j;
    j["command"] = to_string(command);
    j["beta"] = beta;
    j["n"] = n_open;
    j["gamma"] = gamma;
    j["nphi"] = resolved_n_fict();
    j["samples"] = n_samples;
    j["seed"] = seed;
    j["mu"] = mu;
    j["grid"] = grid_size;
    j["tol"] = tol;
    j["max_iter"] = max_iter;
    j["out"] = output_dir;
    j["only"] = only;
    return j;
  }

  static ExperimentConfig from_json(const json& j)
  {
    ExperimentConfig c;
    try {
      if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
      if (j.contains("beta")) c.beta = j.at("beta").get<int>();
      if (j.contains("n")) c.n_open = j.at("n").get<int>();
      if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
      if (j.contains("nphi") && !j.at("nphi").is_null()) c.n_fict = j.at("nphi").get<int>();
      if (j.contains("samples")) c.n_samples = j.at("samples").get<std::int64_t>();
      if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("mu")) c.mu = j.at("mu").get<double>();
      if (j.contains("grid")) c.grid_size = j.at("grid").get<int>();
      if (j.contains("tol")) c.tol = j.at("tol").get<double>();
      if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
      if (j.contains("out")) c.output_dir = j.at("out").get<std::string>();
      if (j.contains("only")) c.only = j.at("only").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      fail(ErrorCode::invalid_config, std::string("malformed config: ") + e.what());
    }
    return c;
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

} // namespace wslab

#endif // WSLAB_CONFIG_HPP
