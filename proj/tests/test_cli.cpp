#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wslab/runner.hpp"

using namespace wslab;
namespace fs = std::filesystem;

namespace {

struct Process {
  int status = 0;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name)
{
  const fs::path p = fs::path(WSLAB_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Process wslab_cli(const std::string& args, const fs::path& work)
{
  const fs::path out = work / "stdout.txt", err = work / "stderr.txt";
  const std::string cmd = std::string("\"") + WSLAB_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Process p;
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  p.out = slurp(out);
  p.err = slurp(err);
  return p;
}

template <class F>
void expect_error(ErrorCode code, F&& f)
{
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

} // namespace

TEST(Config, RoundTripsThroughJson)
{
  ExperimentConfig c;
  c.command = Command::coulomb;
  c.beta = 4;
  c.n_open = 3;
  c.gamma = 0.1 + 0.2;
  c.n_fict = 777;
  c.seed = 18446744073709551557ULL;
  c.mu = -0.05;
  c.tol = 3e-9;
  c.only = {"tricomi", "mc-n1"};
  const ExperimentConfig back = ExperimentConfig::from_json(json::parse(c.to_json().dump()));
  c.threads = back.threads;
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.gamma, 0.1 + 0.2);
}

TEST(Config, DefaultsAreMaterialised)
{
  ExperimentConfig c;
  c.n_open = 50;
  c.gamma = 10.0;
  const json j = c.to_json();
  EXPECT_EQ(j.at("nphi").get<int>(), 5000);
  const ExperimentConfig back = ExperimentConfig::from_json(j);
  EXPECT_EQ(back.to_json(), j);
}

TEST(Config, RangeChecks)
{
  auto bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    expect_error(ErrorCode::invalid_config, [&] { c.validate(); });
  };
  bad([](ExperimentConfig& c) { c.beta = 3; });
  bad([](ExperimentConfig& c) { c.n_open = 0; });
  bad([](ExperimentConfig& c) { c.gamma = -1.0; });
  bad([](ExperimentConfig& c) { c.n_fict = 1; });
  bad([](ExperimentConfig& c) { c.n_samples = 0; });
  bad([](ExperimentConfig& c) { c.grid_size = 4; });
  bad([](ExperimentConfig& c) { c.tol = 0.0; });
  bad([](ExperimentConfig& c) { c.output_dir.clear(); });
  ExperimentConfig ok;
  EXPECT_NO_THROW(ok.validate());
}

TEST(Config, MalformedJson)
{
  expect_error(ErrorCode::invalid_config, [] { ExperimentConfig::from_json(json{{"beta", "two"}}); });
  expect_error(ErrorCode::invalid_config, [] { ExperimentConfig::from_json(json{{"command", "plot"}}); });
}

TEST(Io, CsvUsesSeventeenDigitsAndLf)
{
  const fs::path dir = scratch("csv");
  {
    CsvWriter csv(dir / "t.csv", {"a", "b"});
    csv.row({0.1, 1.0 / 3.0});
  }
  const std::string text = slurp(dir / "t.csv");
  EXPECT_EQ(text, "a,b\n0.10000000000000001,0.33333333333333331\n");
  EXPECT_EQ(std::stod("0.33333333333333331"), 1.0 / 3.0);
}

TEST(Io, ErrorLineIsSingleLineJson)
{
  const std::string line = error_line("invalid-config", "bad\nthing");
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(json::parse(line).at("message"), "bad\nthing");
}

TEST(Run, WritesTheThreeArtifacts)
{
  ExperimentConfig c;
  c.command = Command::sample;
  c.n_open = 2;
  c.n_samples = 50;
  c.output_dir = scratch("run").string();
  std::ostringstream log;
  const RunOutcome r = run(c, log);
  EXPECT_EQ(r.exit_code, 0);
  for (const char* f : {"config.json", "results.csv", "report.json"}) EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / f));
  const json report = read_json(fs::path(c.output_dir) / "report.json");
  EXPECT_EQ(report.at("seed").get<std::uint64_t>(), 1u);
  EXPECT_TRUE(report.contains("wall_seconds"));
  EXPECT_TRUE(report.contains("version"));
  const std::string csv = slurp(fs::path(c.output_dir) / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sample_id,gamma_1,gamma_2,s,saturated_count");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
}

TEST(Cli, SampleIsByteDeterministic)
{
  const fs::path w = scratch("det");
  const std::string base = "sample --beta 2 --n 1 --gamma 1 --samples 1000 --seed 7 --out ";
  ASSERT_EQ(wslab_cli(base + (w / "a").string(), w).status, 0);
  ASSERT_EQ(wslab_cli(base + (w / "b").string() + " --threads 3", w).status, 0);
  const std::string a = slurp(w / "a" / "results.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(w / "b" / "results.csv"));
  EXPECT_EQ(slurp(w / "a" / "config.json").size(), slurp(w / "b" / "config.json").size());
}

TEST(Cli, RerunFromConfigReproducesResults)
{
  const fs::path w = scratch("rerun");
  ASSERT_EQ(wslab_cli("sample --beta 4 --n 2 --gamma 0.5 --samples 200 --seed 3 --out " + (w / "a").string(), w).status,
            0);
  ASSERT_EQ(wslab_cli("--config " + (w / "a" / "config.json").string() + " --out " + (w / "b").string(), w).status, 0);
  EXPECT_EQ(slurp(w / "a" / "results.csv"), slurp(w / "b" / "results.csv"));
}

TEST(Cli, FlagsOverrideConfigFile)
{
  const fs::path w = scratch("override");
  ExperimentConfig c;
  c.n_samples = 10;
  c.gamma = 2.0;
  write_json(w / "in.json", c.to_json());
  ASSERT_EQ(wslab_cli("--config " + (w / "in.json").string() + " --gamma 0.5 --out " + (w / "o").string(), w).status, 0);
  const json j = read_json(w / "o" / "config.json");
  EXPECT_EQ(j.at("gamma").get<double>(), 0.5);
  EXPECT_EQ(j.at("samples").get<int>(), 10);
}

TEST(Cli, InvalidConfigGivesOneLineError)
{
  const fs::path w = scratch("err");
  for (const std::string args : {"sample --beta 3", "sample --gamma -2", "plot", "sample --n abc", ""}) {
    const Process p = wslab_cli(args + " --out " + (w / "o").string(), w);
    EXPECT_NE(p.status, 0) << args;
    ASSERT_FALSE(p.err.empty()) << args;
    EXPECT_EQ(std::count(p.err.begin(), p.err.end(), '\n'), 1) << p.err;
    const json e = json::parse(p.err);
    EXPECT_EQ(e.at("error"), "invalid-config") << args;
  }
}

TEST(Cli, DensityMatchesSingleChannelLaw)
{
  const fs::path w = scratch("density");
  ASSERT_EQ(wslab_cli("density --beta 2 --n 1 --gamma 1 --grid 400 --out " + (w / "o").string(), w).status, 0);
  std::ifstream in(w / "o" / "results.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,density");
  bool seen = false;
  while (std::getline(in, line)) {
    const double x = std::stod(line.substr(0, line.find(',')));
    const double v = std::stod(line.substr(line.find(',') + 1));
    // e^{-x}(x(1 - e^{-1}) + 2 e^{-1} - 1) / e^{-1}
    const double oracle = x > 1.0 ? std::exp(1.0 - x) * (x * (1.0 - std::exp(-1.0)) + 2.0 * std::exp(-1.0) - 1.0) : 0.0;
    EXPECT_NEAR(v, oracle, 1e-12) << x;
    if (x == 2.0) {
      seen = true;
      EXPECT_NEAR(v, std::exp(-1.0), 1e-13);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Cli, CoulombReport)
{
  const fs::path w = scratch("coulomb");
  ASSERT_EQ(wslab_cli("coulomb --gamma 1 --mu 0 --grid 256 --out " + (w / "o").string(), w).status, 0);
  const json r = read_json(w / "o" / "report.json");
  EXPECT_LT(r.at("residuals").at("gamma_gas").get<double>(), 1e-8);
  EXPECT_LT(r.at("residuals").at("t_gas").get<double>(), 1e-8);
  EXPECT_NEAR(r.at("phi_prime").get<double>(), 0.5, 1e-3);
  EXPECT_TRUE(fs::exists(w / "o" / "rho_t.csv"));
}

TEST(Cli, CumulantsTableAndReport)
{
  const fs::path w = scratch("cumulants");
  const Process p = wslab_cli("cumulants --n 4 --gamma 0.1 --samples 500 --out " + (w / "o").string(), w);
  ASSERT_EQ(p.status, 0) << p.err;
  EXPECT_NE(p.out.find("variance-weak"), std::string::npos);
  const json r = read_json(w / "o" / "report.json");
  EXPECT_EQ(r.at("asymptotics").at("regime"), "weak");
  const std::string csv = slurp(w / "o" / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "order,value,stderr,n_samples");
}

TEST(Cli, TamperedToleranceIsFlagged)
{
  const fs::path w = scratch("tamper");
  const Process p = wslab_cli("validate --only coulomb-moments --tol 10 --out " + (w / "o").string(), w);
  EXPECT_NE(p.status, 0);
  const json r = read_json(w / "o" / "report.json");
  ASSERT_EQ(r.at("criteria").size(), 1u);
  EXPECT_EQ(r.at("criteria")[0].at("status"), "degraded");
  EXPECT_FALSE(r.at("all_passed").get<bool>());
}

TEST(Cli, OnlyFilterRunsOneCriterion)
{
  const fs::path w = scratch("only");
  const Process p = wslab_cli("validate --only mc-n1 --out " + (w / "o").string(), w);
  EXPECT_EQ(p.status, 0) << p.out;
  const json r = read_json(w / "o" / "report.json");
  ASSERT_EQ(r.at("criteria").size(), 1u);
  EXPECT_EQ(r.at("criteria")[0].at("name"), "mc-n1");
  EXPECT_EQ(r.at("criteria")[0].at("status"), "pass");
  const std::string csv = slurp(w / "o" / "results.csv");
  EXPECT_EQ(csv.find("seconds"), std::string::npos);
}

TEST(Cli, UnknownCriterionRejected)
{
  const fs::path w = scratch("unknown");
  const Process p = wslab_cli("validate --only nonsense --out " + (w / "o").string(), w);
  EXPECT_NE(p.status, 0);
  EXPECT_EQ(json::parse(p.err).at("error"), "invalid-config");
}
