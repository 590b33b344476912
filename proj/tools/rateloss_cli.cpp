// rateloss: bounds and imperfect-device key rates for lossy optical channels.
//
// Subcommands: bound (single-point bounds), rate (protocol key rate),
// sweep (grid sweep to CSV), figure3 (zero-config rate-vs-loss data).
// Exit codes: 0 success, 2 validation error, 1 other failure.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "rateloss/rateloss.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print_kv(const std::string& key, const std::string& value) {
  std::cout << key << " = " << value << '\n';
}

void print_kv(const std::string& key, double value) { print_kv(key, fmt(value)); }

void trim(std::string& s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
}

double to_double(const std::string& value, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument(key + ": not a count: '" + value + "'");
  }
  return static_cast<std::uint64_t>(v);
}

// simple `key value` / `key = value` lines, '#' starts a comment
std::map<std::string, std::string> parse_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    trim(line);
    if (line.empty()) continue;
    std::string key;
    std::string value;
    if (const auto eq = line.find('='); eq != std::string::npos) {
      key = line.substr(0, eq);
      value = line.substr(eq + 1);
    } else if (const auto ws = line.find_first_of(" \t"); ws != std::string::npos) {
      key = line.substr(0, ws);
      value = line.substr(ws + 1);
    } else {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'key value' or 'key = value'");
    }
    trim(key);
    trim(value);
    if (key.empty() || value.empty()) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'key value' or 'key = value'");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

double default_attenuation() {
  if (const char* env = std::getenv("RATELOSS_ATTENUATION_DB_PER_KM")) {
    return to_double(env, "RATELOSS_ATTENUATION_DB_PER_KM");
  }
  return rateloss::kDefaultAttenuationDbPerKm;
}

struct PointArgs {
  std::optional<double> eta;
  std::optional<double> distance_km;
  double attenuation = rateloss::kDefaultAttenuationDbPerKm;

  double resolve_eta() const {
    if (eta && distance_km) {
      throw std::invalid_argument("give either --eta or --distance-km, not both");
    }
    if (eta) {
      if (!(*eta >= 0.0 && *eta <= 1.0)) {
        throw std::domain_error("--eta must lie in [0,1]");
      }
      return *eta;
    }
    if (distance_km) return rateloss::distance_to_eta(*distance_km, attenuation);
    throw std::invalid_argument("one of --eta or --distance-km is required");
  }
};

void add_point_options(CLI::App* cmd, PointArgs& args) {
  args.attenuation = default_attenuation();
  cmd->add_option("--eta", args.eta, "channel transmittance in [0,1]");
  cmd->add_option("--distance-km", args.distance_km, "fiber distance; converted via attenuation");
  cmd->add_option("--attenuation-db-per-km", args.attenuation,
                  "fiber attenuation (default 0.2, or RATELOSS_ATTENUATION_DB_PER_KM)")
      ->capture_default_str();
}

rateloss::DecoyParams decoy_params_from_file(const std::filesystem::path& path) {
  rateloss::DecoyParams p = rateloss::decoy_methods_preset();
  for (const auto& [key, value] : parse_key_values(path)) {
    if (key == "visibility") p.visibility = to_double(value, key);
    else if (key == "bob_transmittance") p.bob_transmittance = to_double(value, key);
    else if (key == "detector_efficiency") p.detector_efficiency = to_double(value, key);
    else if (key == "dark_count") p.dark_count = to_double(value, key);
    else if (key == "ec_inefficiency") p.ec_inefficiency = to_double(value, key);
    else throw std::invalid_argument("unknown decoy preset key '" + key + "'");
  }
  return p;
}

rateloss::CvParams cv_params_from_file(const std::filesystem::path& path,
                                       rateloss::CvScenario scenario) {
  rateloss::CvParams p = rateloss::cv_methods_preset(scenario);
  for (const auto& [key, value] : parse_key_values(path)) {
    if (key == "reconciliation") p.reconciliation_efficiency = to_double(value, key);
    else if (key == "excess_noise") p.excess_noise = to_double(value, key);
    else if (key == "detector_efficiency") p.detector_efficiency = to_double(value, key);
    else if (key == "electronic_noise") p.electronic_noise = to_double(value, key);
    else throw std::invalid_argument("unknown cv preset key '" + key + "'");
  }
  return p;
}

rateloss::SweepSpec sweep_spec_from_config(const std::filesystem::path& path) {
  rateloss::SweepSpec spec;
  spec.attenuation_db_per_km = default_attenuation();
  std::optional<double> epsilon;
  std::optional<std::uint64_t> n_uses;
  for (const auto& [key, value] : parse_key_values(path)) {
    if (key == "axis") {
      if (value == "eta") spec.axis = rateloss::SweepAxis::eta;
      else if (value == "distance_km") spec.axis = rateloss::SweepAxis::distance_km;
      else throw std::invalid_argument("axis: expected 'eta' or 'distance_km', got '" + value + "'");
    } else if (key == "start") {
      spec.start = to_double(value, key);
    } else if (key == "stop") {
      spec.stop = to_double(value, key);
    } else if (key == "points") {
      spec.points = static_cast<std::size_t>(to_u64(value, key));
    } else if (key == "spacing") {
      if (value == "linear") spec.spacing = rateloss::GridSpacing::linear;
      else if (value == "log") spec.spacing = rateloss::GridSpacing::log;
      else throw std::invalid_argument("spacing: expected 'linear' or 'log', got '" + value + "'");
    } else if (key == "curves") {
      spec.curves = {};
      std::string list = value;
      while (!list.empty()) {
        const auto comma = list.find(',');
        std::string name = list.substr(0, comma);
        list = comma == std::string::npos ? std::string{} : list.substr(comma + 1);
        trim(name);
        if (name.empty()) continue;
        const auto curve = rateloss::curve_from_name(name);
        if (!curve) throw std::invalid_argument("curves: unknown curve '" + name + "'");
        spec.curves.push_back(*curve);
      }
    } else if (key == "n_s") {
      spec.n_s = to_double(value, key);
    } else if (key == "epsilon") {
      epsilon = to_double(value, key);
    } else if (key == "n_uses") {
      n_uses = to_u64(value, key);
    } else if (key == "attenuation_db_per_km") {
      spec.attenuation_db_per_km = to_double(value, key);
    } else {
      throw std::invalid_argument("unknown sweep config key '" + key + "'");
    }
  }
  if (epsilon.has_value() != n_uses.has_value()) {
    throw std::invalid_argument("epsilon and n_uses must be given together");
  }
  if (epsilon) spec.budget = rateloss::SecurityBudget{*epsilon, *n_uses};
  return spec;
}

std::vector<rateloss::Curve> parse_curve_list(const std::vector<std::string>& names) {
  std::vector<rateloss::Curve> curves;
  for (std::string name : names) {
    trim(name);
    const auto curve = rateloss::curve_from_name(name);
    if (!curve) throw std::invalid_argument("--curves: unknown curve '" + name + "'");
    curves.push_back(*curve);
  }
  return curves;
}

int run(int argc, char** argv) {
  CLI::App app{"rate-loss bounds and QKD key rates for the pure-loss optical channel"};
  app.set_version_flag("--version", rateloss::kVersion);
  app.require_subcommand(1);

  // ---- bound ----
  auto* bound = app.add_subcommand("bound", "channel-level bounds at a single point");
  PointArgs bound_point;
  std::optional<double> bound_ns;
  std::optional<double> bound_epsilon;
  std::optional<std::uint64_t> bound_n_uses;
  add_point_options(bound, bound_point);
  bound->add_option("--ns", bound_ns, "mean photon number constraint N_S");
  bound->add_option("--epsilon", bound_epsilon, "security parameter for the finite-n bound");
  bound->add_option("--n-uses", bound_n_uses, "channel uses for the finite-n bound");
  bound->callback([&] {
    if (bound_epsilon.has_value() != bound_n_uses.has_value()) {
      throw std::invalid_argument("--epsilon and --n-uses must be given together");
    }
    const double eta = bound_point.resolve_eta();
    print_kv("eta", eta);
    print_kv("tgw", rateloss::tgw_bound(eta));
    print_kv("rci", rateloss::rci_lower_bound(eta));
    print_kv("bb84_ideal", rateloss::ideal_bb84_rate(eta));
    print_kv("two_way", rateloss::two_way_bound(eta));
    if (bound_ns) print_kv("tgw_finite_energy", rateloss::tgw_bound_finite_energy(eta, *bound_ns));
    if (bound_epsilon) {
      const rateloss::SecurityBudget budget{*bound_epsilon, *bound_n_uses};
      print_kv("finite_n", rateloss::finite_n_bound(eta, budget));
    }
  });

  // ---- rate ----
  auto* rate = app.add_subcommand("rate", "imperfect-device protocol key rate at a single point");
  PointArgs rate_point;
  std::string protocol;
  std::string preset = "methods";
  add_point_options(rate, rate_point);
  rate->add_option("--protocol", protocol, "one of decoy, cv-uncal, cv-cal")
      ->required()
      ->check(CLI::IsMember({"decoy", "cv-uncal", "cv-cal"}));
  rate->add_option("--preset", preset,
                   "'methods', or a key-value file overriding its values")
      ->capture_default_str();
  rate->callback([&] {
    const bool named = preset == "methods";
    const double eta = rate_point.resolve_eta();
    print_kv("protocol", protocol);
    print_kv("eta", eta);
    if (protocol == "decoy") {
      const rateloss::DecoyParams params =
          named ? rateloss::decoy_methods_preset() : decoy_params_from_file(preset);
      const auto opt = rateloss::decoy_optimal_rate(eta, params);
      print_kv("mu_opt", opt.mu_opt);
      print_kv("key_rate", opt.key_rate);
    } else {
      const auto scenario = protocol == "cv-cal" ? rateloss::CvScenario::calibrated
                                                 : rateloss::CvScenario::uncalibrated;
      const rateloss::CvParams params =
          named ? rateloss::cv_methods_preset(scenario) : cv_params_from_file(preset, scenario);
      const auto opt = rateloss::cv_optimal_rate(eta, params);
      print_kv("v_opt", opt.v_opt);
      print_kv("key_rate", opt.key_rate);
      print_kv("v_at_boundary", opt.at_boundary ? "true" : "false");
    }
  });

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "evaluate curves over a grid, emitting CSV");
  std::string config_path;
  std::string axis_name;
  std::optional<double> sw_start;
  std::optional<double> sw_stop;
  std::optional<std::uint64_t> sw_points;
  std::string spacing_name;
  std::vector<std::string> curve_names;
  std::optional<double> sw_ns;
  std::optional<double> sw_epsilon;
  std::optional<std::uint64_t> sw_n_uses;
  std::optional<double> sw_attenuation;
  unsigned sw_threads = 1;
  std::string out_path = "-";
  sweep->add_option("--config", config_path, "key-value sweep config file");
  sweep->add_option("--axis", axis_name, "eta or distance_km")
      ->check(CLI::IsMember({"eta", "distance_km"}));
  sweep->add_option("--start", sw_start, "grid start");
  sweep->add_option("--stop", sw_stop, "grid stop");
  sweep->add_option("--points", sw_points, "grid points (>= 2)");
  sweep->add_option("--spacing", spacing_name, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}));
  sweep->add_option("--curves", curve_names, "comma-separated curve list")->delimiter(',');
  sweep->add_option("--ns", sw_ns, "mean photon number for tgw_finite_energy");
  sweep->add_option("--epsilon", sw_epsilon, "security parameter for finite_n");
  sweep->add_option("--n-uses", sw_n_uses, "channel uses for finite_n");
  sweep->add_option("--attenuation-db-per-km", sw_attenuation, "fiber attenuation");
  sweep->add_option("--threads", sw_threads, "parallel evaluation threads")->capture_default_str();
  sweep->add_option("--out", out_path, "output file, '-' for stdout")->capture_default_str();
  sweep->callback([&] {
    rateloss::SweepSpec spec;
    if (!config_path.empty()) {
      spec = sweep_spec_from_config(config_path);
    } else {
      spec.attenuation_db_per_km = default_attenuation();
    }
    if (!axis_name.empty()) {
      spec.axis = axis_name == "eta" ? rateloss::SweepAxis::eta : rateloss::SweepAxis::distance_km;
    }
    if (sw_start) spec.start = *sw_start;
    if (sw_stop) spec.stop = *sw_stop;
    if (sw_points) spec.points = static_cast<std::size_t>(*sw_points);
    if (!spacing_name.empty()) {
      spec.spacing = spacing_name == "log" ? rateloss::GridSpacing::log
                                           : rateloss::GridSpacing::linear;
    }
    if (!curve_names.empty()) spec.curves = parse_curve_list(curve_names);
    if (sw_ns) spec.n_s = *sw_ns;
    if (sw_epsilon.has_value() != sw_n_uses.has_value()) {
      throw std::invalid_argument("--epsilon and --n-uses must be given together");
    }
    if (sw_epsilon) spec.budget = rateloss::SecurityBudget{*sw_epsilon, *sw_n_uses};
    if (sw_attenuation) spec.attenuation_db_per_km = *sw_attenuation;

    const rateloss::SweepTable table = rateloss::run_sweep(spec, sw_threads);
    if (out_path == "-") {
      rateloss::write_csv(table, std::cout);
    } else {
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      rateloss::write_csv(table, out);
      if (!out) throw std::runtime_error("failed writing " + out_path);
    }
  });

  // ---- figure3 ----
  auto* fig = app.add_subcommand("figure3", "emit the rate-vs-loss figure data (CSV + JSON)");
  std::string out_dir = ".";
  unsigned fig_threads = 1;
  fig->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  fig->add_option("--threads", fig_threads, "parallel evaluation threads")->capture_default_str();
  fig->callback([&] {
    const auto result = rateloss::figure3(out_dir, fig_threads);
    std::cerr << "wrote " << result.csv_path.string() << '\n'
              << "wrote " << result.json_path.string() << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
