#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "rateloss/rateloss.hpp"

namespace {

const char* cli_path() { return std::getenv("RATELOSS_CLI"); }

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = {}) {
  const auto out_file = std::filesystem::temp_directory_path() /
                        ("rateloss_cli_out_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = env_prefix + "'" + std::string(cli_path()) + "' " + args + " > '" +
                          out_file.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  result.out = buf.str();
  std::filesystem::remove(out_file);
  return result;
}

// reads the value of a `key = value` output line
std::optional<double> value_of(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  const std::string prefix = key + " = ";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return std::strtod(line.c_str() + prefix.size(), nullptr);
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("cli single-point bound query") {
  REQUIRE(cli_path() != nullptr);

  const auto run = run_cli("bound --eta 1e-4 --ns 0.5 --epsilon 1e-10 --n-uses 10000");
  REQUIRE(run.exit_code == 0);

  CHECK(value_of(run.out, "tgw") == rateloss::tgw_bound(1e-4));
  CHECK(value_of(run.out, "rci") == rateloss::rci_lower_bound(1e-4));
  CHECK(value_of(run.out, "bb84_ideal") == rateloss::ideal_bb84_rate(1e-4));
  CHECK(value_of(run.out, "two_way") == rateloss::two_way_bound(1e-4));
  CHECK(value_of(run.out, "tgw_finite_energy") == rateloss::tgw_bound_finite_energy(1e-4, 0.5));
  CHECK(value_of(run.out, "finite_n") ==
        rateloss::finite_n_bound(1e-4, rateloss::SecurityBudget{1e-10, 10000}));
}

TEST_CASE("cli bound accepts a distance instead of eta") {
  REQUIRE(cli_path() != nullptr);
  const auto run = run_cli("bound --distance-km 200");
  REQUIRE(run.exit_code == 0);
  CHECK(value_of(run.out, "eta") == rateloss::distance_to_eta(200.0, 0.2));
}

TEST_CASE("cli attenuation env override") {
  REQUIRE(cli_path() != nullptr);
  const auto run =
      run_cli("bound --distance-km 100", "RATELOSS_ATTENUATION_DB_PER_KM=0.4 ");
  REQUIRE(run.exit_code == 0);
  CHECK(value_of(run.out, "eta") == rateloss::distance_to_eta(100.0, 0.4));
}

TEST_CASE("cli validation failures exit with code 2") {
  REQUIRE(cli_path() != nullptr);
  CHECK(run_cli("bound --eta 2").exit_code == 2);
  CHECK(run_cli("bound").exit_code == 2);
  CHECK(run_cli("bound --eta 0.1 --distance-km 10").exit_code == 2);
  CHECK(run_cli("bound --eta 0.1 --epsilon 1e-10").exit_code == 2);
  CHECK(run_cli("nonsense").exit_code == 2);
  CHECK(run_cli("rate --eta 0.1").exit_code == 2);
  CHECK(run_cli("rate --protocol decoy").exit_code == 2);
  CHECK(run_cli("rate --protocol banana --eta 0.1").exit_code == 2);
  CHECK(run_cli("sweep --start 0 --stop 0.5 --points 1 --curves tgw").exit_code == 2);
  CHECK(run_cli("sweep --start 0 --stop 0.5 --points 5 --curves tgw,bogus").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("cli rate matches the library") {
  REQUIRE(cli_path() != nullptr);

  const auto decoy = run_cli("rate --protocol decoy --eta 0.1");
  REQUIRE(decoy.exit_code == 0);
  const auto opt = rateloss::decoy_optimal_rate(0.1, rateloss::decoy_methods_preset());
  CHECK(value_of(decoy.out, "mu_opt") == opt.mu_opt);
  CHECK(value_of(decoy.out, "key_rate") == opt.key_rate);

  const auto cv = run_cli("rate --protocol cv-cal --eta 0.5");
  REQUIRE(cv.exit_code == 0);
  const auto cv_opt =
      rateloss::cv_optimal_rate(0.5, rateloss::cv_methods_preset(rateloss::CvScenario::calibrated));
  CHECK(value_of(cv.out, "v_opt") == cv_opt.v_opt);
  CHECK(value_of(cv.out, "key_rate") == cv_opt.key_rate);
}

TEST_CASE("cli rate accepts a preset file") {
  REQUIRE(cli_path() != nullptr);
  const auto preset_path = std::filesystem::temp_directory_path() /
                           ("rateloss_preset_" + std::to_string(::getpid()) + ".txt");
  {
    std::ofstream f(preset_path);
    f << "# perfect devices\n"
      << "visibility = 1.0\n"
      << "detector_efficiency 1.0\n"
      << "dark_count = 0\n"
      << "ec_inefficiency = 1\n";
  }
  const auto run =
      run_cli("rate --protocol decoy --eta 1 --preset '" + preset_path.string() + "'");
  REQUIRE(run.exit_code == 0);
  const rateloss::DecoyParams perfect{1.0, 1.0, 1.0, 0.0, 1.0};
  CHECK(value_of(run.out, "key_rate") == rateloss::decoy_optimal_rate(1.0, perfect).key_rate);

  {
    std::ofstream f(preset_path);
    f << "visibility = 1.0\nbanana = 3\n";
  }
  CHECK(run_cli("rate --protocol decoy --eta 1 --preset '" + preset_path.string() + "'")
            .exit_code == 2);
  CHECK(run_cli("rate --protocol decoy --eta 1 --preset /nonexistent/preset.txt").exit_code == 2);
  std::filesystem::remove(preset_path);
}

TEST_CASE("cli sweep emits csv equal to the library output") {
  REQUIRE(cli_path() != nullptr);

  const auto run = run_cli("sweep --axis eta --start 0 --stop 0.5 --points 3 --curves tgw,rci");
  REQUIRE(run.exit_code == 0);

  rateloss::SweepSpec spec;
  spec.start = 0.0;
  spec.stop = 0.5;
  spec.points = 3;
  spec.curves = {rateloss::Curve::tgw, rateloss::Curve::rci};
  CHECK(run.out == rateloss::to_csv(rateloss::run_sweep(spec)));
}

TEST_CASE("cli sweep config file matches flags") {
  REQUIRE(cli_path() != nullptr);
  const auto cfg_path = std::filesystem::temp_directory_path() /
                        ("rateloss_cfg_" + std::to_string(::getpid()) + ".txt");
  {
    std::ofstream f(cfg_path);
    f << "axis distance_km\n"
      << "start 0\n"
      << "stop 200\n"
      << "points 5\n"
      << "spacing linear\n"
      << "curves tgw,rci\n"
      << "attenuation_db_per_km 0.2\n";
  }
  const auto from_config = run_cli("sweep --config '" + cfg_path.string() + "'");
  const auto from_flags = run_cli(
      "sweep --axis distance_km --start 0 --stop 200 --points 5 --spacing linear "
      "--curves tgw,rci --attenuation-db-per-km 0.2");
  REQUIRE(from_config.exit_code == 0);
  REQUIRE(from_flags.exit_code == 0);
  CHECK(from_config.out == from_flags.out);
  std::filesystem::remove(cfg_path);
}
