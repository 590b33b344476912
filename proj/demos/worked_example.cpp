// Recomputes the headline numbers for a 200 km fiber at 0.2 dB/km
// (eta = 1e-4) and prints a small rate table around that distance.

#include <cstdio>

#include "rateloss/rateloss.hpp"

int main() {
  using namespace rateloss;

  const double eta = distance_to_eta(200.0, 0.2);
  std::printf("200 km fiber at 0.2 dB/km: eta = %.6g\n", eta);
  std::printf("  upper bound (tgw)        : %.6g bits/mode\n", tgw_bound(eta));
  std::printf("  lower bound (rci)        : %.6g bits/mode\n", rci_lower_bound(eta));
  std::printf("  ideal BB84               : %.6g bits/mode\n", ideal_bb84_rate(eta));

  const SecurityBudget budget{1e-10, 10000};
  std::printf("  finite-n (eps=1e-10, n=1e4): %.6g bits/use\n", finite_n_bound(eta, budget));

  std::printf("\n%-10s %-12s %-12s %-12s %-12s\n", "L (km)", "eta", "tgw", "decoy_bb84",
              "cv_cal");
  for (const double km : {50.0, 100.0, 150.0, 200.0, 250.0}) {
    const double e = distance_to_eta(km, 0.2);
    std::printf("%-10g %-12.4g %-12.4g %-12.4g %-12.4g\n", km, e, tgw_bound(e),
                decoy_optimal_rate(e, decoy_methods_preset()).key_rate,
                cv_optimal_rate(e, cv_methods_preset(CvScenario::calibrated)).key_rate);
  }
  return 0;
}
