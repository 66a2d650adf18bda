#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wslab/wslab.hpp"

namespace {

struct Flags {
  std::string command;
  std::string config_path;
  int beta = 2;
  int n_open = 1;
  double gamma = 1.0;
  int n_fict = 0;
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  double mu = 0.0;
  int grid = 256;
  double tol = 1e-8;
  int max_iter = 500;
  std::string out;
  std::vector<std::string> only;
  int threads = 0;
};

template <class T>
void override_if(const CLI::App& app, const char* name, const T& value, T& target)
{
  if (app.count(name) > 0) target = value;
}

wslab::ExperimentConfig resolve(const CLI::App& app, const Flags& f)
{
  wslab::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = wslab::ExperimentConfig::from_json(wslab::read_json(f.config_path));
  if (!f.command.empty()) cfg.command = wslab::parse_command(f.command);
  override_if(app, "--beta", f.beta, cfg.beta);
  override_if(app, "--n", f.n_open, cfg.n_open);
  override_if(app, "--gamma", f.gamma, cfg.gamma);
  if (app.count("--nphi") > 0) cfg.n_fict = f.n_fict;
  override_if(app, "--samples", f.samples, cfg.n_samples);
  override_if(app, "--seed", f.seed, cfg.seed);
  override_if(app, "--mu", f.mu, cfg.mu);
  override_if(app, "--grid", f.grid, cfg.grid_size);
  override_if(app, "--tol", f.tol, cfg.tol);
  override_if(app, "--max-iter", f.max_iter, cfg.max_iter);
  override_if(app, "--out", f.out, cfg.output_dir);
  override_if(app, "--only", f.only, cfg.only);
  override_if(app, "--threads", f.threads, cfg.threads);
  return cfg;
}

int report_error(std::string_view code, const std::string& message)
{
  std::cerr << wslab::error_line(code, message) << std::endl;
  return 2;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Wigner-time statistics of absorbing chaotic cavities"};
  app.set_version_flag("--version", std::string(wslab::version));
  Flags f;
  app.add_option("command", f.command, "sample | density | coulomb | cumulants | validate");
  app.add_option("--config", f.config_path, "JSON config; flags given on the command line override its values");
  app.add_option("--beta", f.beta, "Dyson index 1, 2 or 4");
  app.add_option("--n", f.n_open, "number of open channels N");
  app.add_option("--gamma", f.gamma, "absorption strength");
  app.add_option("--nphi", f.n_fict, "absorbing channels (default max(50N, ceil(10 gamma N)))");
  app.add_option("--samples", f.samples, "Monte Carlo sample count");
  app.add_option("--seed", f.seed, "base seed");
  app.add_option("--mu", f.mu, "generating-function parameter (coulomb)");
  app.add_option("--grid", f.grid, "grid size (density: points, coulomb: Chebyshev nodes)");
  app.add_option("--tol", f.tol, "Coulomb-gas solver tolerance");
  app.add_option("--max-iter", f.max_iter, "Coulomb-gas iteration cap");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--only", f.only, "validate: run only the named criteria")->delimiter(',');
  app.add_option("--threads", f.threads, "worker threads (0: WSLAB_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("invalid-config", e.what());
  }

  try {
    if (f.command.empty() && f.config_path.empty())
      wslab::fail(wslab::ErrorCode::invalid_config, "a command or --config is required");
    const wslab::ExperimentConfig cfg = resolve(app, f);
    const wslab::RunOutcome outcome = wslab::run(cfg, std::cout);
    return outcome.exit_code;
  } catch (const wslab::Error& e) {
    return report_error(e.code_name(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal-error", e.what());
  }
}
