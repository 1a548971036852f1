#pragma once

#include <cstdint>
#include <vector>

#include "isac/array.hpp"
#include "isac/contour.hpp"
#include "isac/crb.hpp"
#include "isac/rng.hpp"

namespace isac {

enum class SymbolKind { Gaussian, Qpsk };

/// N_c x T unit-power, zero-mean, cross-uncorrelated symbol streams.
MatC gen_symbols(int n_c, int t, SymbolKind kind, std::uint64_t seed);

/// One echo realization Y = g sum_k sqrt(l_k) alpha_k b_k a_k^H (W C) + Z with
/// alpha_k ~ CN(0,1) and Z entries CN(0, sigma_s2). Narrowband model:
/// propagation delays are folded into the alpha_k phases.
MatC gen_echo(const MatC& w, const MatC& c, const ContourPartition& partition,
              const std::vector<SteeringBundle>& bundles, const SensingParams& sp,
              std::uint64_t seed);

/// Matched-filter direction estimate: grid point maximizing ||b(phi)^H Y||,
/// ties broken toward smaller |phi|, then smaller phi.
double mf_estimate(const MatC& y, const ArrayConfig& cfg, const Eigen::VectorXd& grid);

/// Uniform search grid over [-90 deg, 90 deg] with the given step.
Eigen::VectorXd mf_grid(double step_deg);

struct TrialResult {
  double phi_hat;
  double phi_true;
  double squared_error;
};

struct MseResult {
  double rmse = 0.0;
  std::vector<TrialResult> trials;
};

/// Monte-Carlo matched-filter RMSE with fresh symbols, RCS draws and noise per
/// trial (per-trial derived substreams; bit-reproducible under a fixed seed).
MseResult monte_carlo_mse(const MatC& w, const ContourPartition& partition,
                          const std::vector<SteeringBundle>& bundles, const ArrayConfig& cfg,
                          const SensingParams& sp, double phi_true,
                          const Eigen::VectorXd& grid, int n_trials, int n_symbols,
                          SymbolKind kind, std::uint64_t seed);

}  // namespace isac
