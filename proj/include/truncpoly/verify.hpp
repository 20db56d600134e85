#pragma once

#include <string>
#include <utility>
#include <vector>

#include "truncpoly/density.hpp"

namespace truncpoly {

// One executable inequality check. `passed` means observed <= bound;
// margin = bound - observed. Reports are reproducible from
// (name, config_digest): every randomized input uses a fixed committed seed.
struct CheckReport {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  std::string config_digest;
  std::string note;
};

// max over a grid of |f - taylor_k f| against the remainder bound
// (15 d / k)^{k+1} * M^{k+1}. Requires f's derivative oracle.
CheckReport check_taylor_remainder(const LogDensity& f, int k, int grid_n);

// exhaustive sum of 1/beta! over |beta| = k+1 against (15 d / k)^{k+1}
CheckReport check_multiindex_sum(int d, int k);

// anti-concentration check: the empirical constant
// vol{|p| <= gamma} * (int p^2)^{1/(2k)} / gamma^{1/k} must stay below 10 k
// uniformly over the gammas, i.e. small thresholds carry no excess mass.
CheckReport check_carbery_wright_scaling(const PolyCoeffs& p, const std::vector<double>& gammas,
                                         const QuadratureSpec& spec);

// TV ratio between the full cube and the conditioning set is at least
// exp(-2B) * vol(S) (minus quadrature tolerance). Degenerate pairs with
// vanishing TV on S are skipped with a note.
CheckReport check_distortion_lower(const PolyCoeffs& p, const PolyCoeffs& q, const SurvivalSet& S,
                                   double B, const QuadratureSpec& spec);

using DensityPair = std::pair<TruncatedDensity, TruncatedDensity>;

// TV <= sqrt(KL) for every pair (shared conditioning set), tolerance 1e-6
CheckReport check_pinsker_suite(const std::vector<DensityPair>& pairs,
                                const QuadratureSpec& spec);

// KL(P(f,S) || P(g,S)) <= 2 sup_S |f - g| for every pair
CheckReport check_kl_supnorm(const std::vector<std::pair<LogDensity, LogDensity>>& pairs,
                             const SurvivalSet& S, const QuadratureSpec& spec);

std::vector<std::string> suite_names();

// Runs the named suite, or all suites when `filter` is empty. Unknown names
// raise std::invalid_argument listing the available suites.
std::vector<CheckReport> run_suite(const std::string& filter);

}  // namespace truncpoly
