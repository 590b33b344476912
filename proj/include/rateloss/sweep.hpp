#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rateloss/bounds.hpp"
#include "rateloss/cv.hpp"
#include "rateloss/decoy.hpp"
#include "rateloss/version.hpp"

namespace rateloss {

enum class SweepAxis { eta, distance_km };
enum class GridSpacing { linear, log };

enum class Curve {
  tgw,
  tgw_finite_energy,
  rci,
  bb84_ideal,
  decoy_bb84,
  cv_uncalibrated,
  cv_calibrated,
  two_way,
  finite_n,
};

inline constexpr std::array<Curve, 9> kAllCurves{
    Curve::tgw,           Curve::tgw_finite_energy, Curve::rci,
    Curve::bb84_ideal,    Curve::decoy_bb84,        Curve::cv_uncalibrated,
    Curve::cv_calibrated, Curve::two_way,           Curve::finite_n,
};

inline const char* curve_name(Curve c) {
  switch (c) {
    case Curve::tgw: return "tgw";
    case Curve::tgw_finite_energy: return "tgw_finite_energy";
    case Curve::rci: return "rci";
    case Curve::bb84_ideal: return "bb84_ideal";
    case Curve::decoy_bb84: return "decoy_bb84";
    case Curve::cv_uncalibrated: return "cv_uncalibrated";
    case Curve::cv_calibrated: return "cv_calibrated";
    case Curve::two_way: return "two_way";
    case Curve::finite_n: return "finite_n";
  }
  return "?";
}

inline std::optional<Curve> curve_from_name(std::string_view name) {
  for (const Curve c : kAllCurves) {
    if (name == curve_name(c)) return c;
  }
  return std::nullopt;
}

/// Fiber transmittance at distance km with attenuation alpha dB/km:
/// eta = 10^(-alpha km / 10).
inline double distance_to_eta(double km, double alpha_db_per_km) {
  if (!(km >= 0.0) || !std::isfinite(km)) {
    throw std::domain_error("distance_to_eta: distance must be finite and >= 0");
  }
  if (!(alpha_db_per_km >= 0.0) || !std::isfinite(alpha_db_per_km)) {
    throw std::domain_error("distance_to_eta: attenuation must be finite and >= 0");
  }
  return std::pow(10.0, -alpha_db_per_km * km / 10.0);
}

/// Inverse of distance_to_eta for eta in (0, 1].
inline double eta_to_distance(double eta, double alpha_db_per_km) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error("eta_to_distance: eta must lie in (0,1]");
  }
  if (!(alpha_db_per_km > 0.0) || !std::isfinite(alpha_db_per_km)) {
    throw std::domain_error("eta_to_distance: attenuation must be finite and > 0");
  }
  return -10.0 * std::log10(eta) / alpha_db_per_km;
}

inline constexpr double kDefaultAttenuationDbPerKm = 0.2;

/// A grid over transmittance or fiber distance plus the set of curves to
/// evaluate on it.
struct SweepSpec {
  SweepAxis axis = SweepAxis::eta;
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
  GridSpacing spacing = GridSpacing::linear;
  std::vector<Curve> curves;
  std::optional<double> n_s{};
  std::optional<SecurityBudget> budget{};
  double attenuation_db_per_km = kDefaultAttenuationDbPerKm;

  bool has_curve(Curve c) const {
    for (const Curve k : curves) {
      if (k == c) return true;
    }
    return false;
  }

  void validate() const {
    if (curves.empty()) throw std::invalid_argument("sweep.curves: at least one curve required");
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop)) {
      throw std::invalid_argument("sweep.grid: start must be finite and < stop");
    }
    if (points < 2) throw std::invalid_argument("sweep.grid: points must be >= 2");
    if (axis == SweepAxis::eta) {
      if (start < 0.0 || stop > 1.0) {
        throw std::invalid_argument("sweep.grid: eta grid must lie within [0,1]");
      }
    } else {
      if (start < 0.0) throw std::invalid_argument("sweep.grid: distance grid must be >= 0");
    }
    if (spacing == GridSpacing::log && !(start > 0.0)) {
      throw std::invalid_argument("sweep.grid: log spacing requires start > 0");
    }
    if (n_s && (!std::isfinite(*n_s) || *n_s < 0.0)) {
      throw std::invalid_argument("sweep.n_s: must be finite and >= 0");
    }
    if (has_curve(Curve::tgw_finite_energy) && !n_s) {
      throw std::invalid_argument("sweep.curves: tgw_finite_energy requires n_s");
    }
    if (has_curve(Curve::finite_n)) {
      if (!budget) throw std::invalid_argument("sweep.curves: finite_n requires a budget");
      budget->validate();
    }
    if (!(attenuation_db_per_km >= 0.0) || !std::isfinite(attenuation_db_per_km)) {
      throw std::invalid_argument("sweep.attenuation_db_per_km: must be finite and >= 0");
    }
  }
};

/// Result rows: axis value, eta, then one value per requested curve.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Evaluates one curve at one transmittance. This is the single arithmetic
/// path behind sweeps and figure3; the CSV layer adds no arithmetic of its
/// own. Divergent points (eta = 1) come back as +inf; the CV rates at
/// eta = 0 are 0, their zero-transmission limit.
inline double evaluate_curve(Curve curve, double eta, const SweepSpec& spec) {
  switch (curve) {
    case Curve::tgw: return tgw_bound(eta);
    case Curve::tgw_finite_energy: return tgw_bound_finite_energy(eta, spec.n_s.value());
    case Curve::rci: return rci_lower_bound(eta);
    case Curve::bb84_ideal: return ideal_bb84_rate(eta);
    case Curve::two_way: return two_way_bound(eta);
    case Curve::finite_n: return finite_n_bound(eta, spec.budget.value());
    case Curve::decoy_bb84: return decoy_optimal_rate(eta, decoy_methods_preset()).key_rate;
    case Curve::cv_uncalibrated:
      return eta == 0.0
                 ? 0.0
                 : cv_optimal_rate(eta, cv_methods_preset(CvScenario::uncalibrated)).key_rate;
    case Curve::cv_calibrated:
      return eta == 0.0
                 ? 0.0
                 : cv_optimal_rate(eta, cv_methods_preset(CvScenario::calibrated)).key_rate;
  }
  throw std::logic_error("evaluate_curve: unknown curve");
}

namespace detail {

inline std::vector<double> make_grid(double start, double stop, std::size_t points,
                                     GridSpacing spacing) {
  std::vector<double> grid(points);
  const auto steps = static_cast<double>(points - 1);
  if (spacing == GridSpacing::linear) {
    for (std::size_t i = 0; i < points; ++i) {
      grid[i] = start + (stop - start) * static_cast<double>(i) / steps;
    }
  } else {
    const double e0 = std::log10(start);
    const double e1 = std::log10(stop);
    for (std::size_t i = 0; i < points; ++i) {
      grid[i] = std::pow(10.0, e0 + (e1 - e0) * static_cast<double>(i) / steps);
    }
  }
  grid.front() = start;
  grid.back() = stop;
  return grid;
}

// fills rows in place; rows are independent, so any chunking of the index
// range yields the same table
inline void fill_rows(SweepTable& table, const std::vector<double>& axis_values,
                      const std::vector<double>& etas, const SweepSpec& spec, unsigned threads) {
  const std::size_t n = axis_values.size();
  table.rows.assign(n, {});
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::vector<double> row;
      row.reserve(2 + spec.curves.size());
      row.push_back(axis_values[r]);
      row.push_back(etas[r]);
      for (const Curve c : spec.curves) row.push_back(evaluate_curve(c, etas[r], spec));
      table.rows[r] = std::move(row);
    }
  };
  if (threads <= 1 || n < 2) {
    worker(0, n);
    return;
  }
  const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(used);
  const std::size_t chunk = (n + used - 1) / used;
  for (unsigned t = 0; t < used; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        worker(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

inline void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// Evaluates the sweep. Rows are sorted by the axis value; parallel
/// evaluation (threads > 1) produces the identical table.
inline SweepTable run_sweep(const SweepSpec& spec, unsigned threads = 1) {
  spec.validate();
  const std::vector<double> axis_values =
      detail::make_grid(spec.start, spec.stop, spec.points, spec.spacing);
  std::vector<double> etas(axis_values.size());
  for (std::size_t i = 0; i < axis_values.size(); ++i) {
    etas[i] = spec.axis == SweepAxis::eta
                  ? axis_values[i]
                  : distance_to_eta(axis_values[i], spec.attenuation_db_per_km);
  }
  SweepTable table;
  table.columns = {"axis", "eta"};
  for (const Curve c : spec.curves) table.columns.emplace_back(curve_name(c));
  detail::fill_rows(table, axis_values, etas, spec, threads);
  return table;
}

/// CSV with header `axis,eta,<curve>...`; numbers in shortest round-trip
/// decimal form, infinities as `inf`.
inline std::string to_csv(const SweepTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += table.columns[i];
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(',');
      detail::append_double(out, row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_csv(const SweepTable& table, std::ostream& os) { os << to_csv(table); }

// figure3 defaults: 400 log-spaced points starting at 1e-6, spaced 1/67 of a
// decade so that every decade point (1e-5 ... 1e-1, in particular 1e-4) lies
// exactly on the grid; the last point is ~0.902, keeping the grid inside
// [1e-6, 1).
inline constexpr std::size_t kFigure3Points = 400;
inline constexpr double kFigure3ExponentStart = -6.0;
inline constexpr double kFigure3StepsPerDecade = 67.0;

inline std::vector<double> figure3_grid() {
  std::vector<double> etas(kFigure3Points);
  for (std::size_t k = 0; k < kFigure3Points; ++k) {
    etas[k] =
        std::pow(10.0, kFigure3ExponentStart + static_cast<double>(k) / kFigure3StepsPerDecade);
  }
  return etas;
}

struct Figure3Result {
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
};

/// Zero-config reproduction of the rate-vs-loss figure: one CSV with the six
/// curve families (tgw, rci, bb84_ideal, decoy_bb84, cv_uncalibrated,
/// cv_calibrated) over the default grid, plus a JSON sidecar recording the
/// grid, the device presets and the tool version.
inline Figure3Result figure3(const std::filesystem::path& out_dir, unsigned threads = 1) {
  SweepSpec spec;
  spec.axis = SweepAxis::eta;
  spec.spacing = GridSpacing::log;
  spec.curves = {Curve::tgw,        Curve::rci,
                 Curve::bb84_ideal, Curve::decoy_bb84,
                 Curve::cv_uncalibrated, Curve::cv_calibrated};
  const std::vector<double> etas = figure3_grid();
  spec.start = etas.front();
  spec.stop = etas.back();
  spec.points = etas.size();
  spec.validate();

  SweepTable table;
  table.columns = {"axis", "eta"};
  for (const Curve c : spec.curves) table.columns.emplace_back(curve_name(c));
  detail::fill_rows(table, etas, etas, spec, threads);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  Figure3Result result{out_dir / "figure3.csv", out_dir / "figure3.json"};
  {
    std::ofstream csv(result.csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("figure3: cannot open " + result.csv_path.string());
    csv << to_csv(table);
    if (!csv) throw std::runtime_error("figure3: failed writing " + result.csv_path.string());
  }

  const DecoyParams decoy = decoy_methods_preset();
  const CvParams cv = cv_methods_preset(CvScenario::uncalibrated);
  nlohmann::json sidecar{
      {"tool", "rateloss"},
      {"version", kVersion},
      {"output", "figure3.csv"},
      {"grid",
       {{"axis", "eta"},
        {"spacing", "log"},
        {"points", kFigure3Points},
        {"eta_min", etas.front()},
        {"eta_max", etas.back()},
        {"steps_per_decade", kFigure3StepsPerDecade}}},
      {"curves", nlohmann::json::array()},
      {"presets",
       {{"decoy_bb84",
         {{"visibility", decoy.visibility},
          {"bob_transmittance", decoy.bob_transmittance},
          {"detector_efficiency", decoy.detector_efficiency},
          {"dark_count", decoy.dark_count},
          {"ec_inefficiency", decoy.ec_inefficiency}}},
        {"cv_gg02",
         {{"reconciliation_efficiency", cv.reconciliation_efficiency},
          {"excess_noise", cv.excess_noise},
          {"detector_efficiency", cv.detector_efficiency},
          {"electronic_noise", cv.electronic_noise},
          {"scenarios", {"uncalibrated", "calibrated"}}}}}},
  };
  for (const Curve c : spec.curves) sidecar["curves"].push_back(curve_name(c));

  {
    std::ofstream js(result.json_path, std::ios::binary | std::ios::trunc);
    if (!js) throw std::runtime_error("figure3: cannot open " + result.json_path.string());
    js << sidecar.dump(2) << '\n';
    if (!js) throw std::runtime_error("figure3: failed writing " + result.json_path.string());
  }
  return result;
}

}  // namespace rateloss
