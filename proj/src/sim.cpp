#include "isac/sim.hpp"

#include <cmath>
#include <numbers>

namespace isac {

MatC gen_symbols(int n_c, int t, SymbolKind kind, std::uint64_t seed) {
  if (n_c < 1 || t < 1) throw BadScenario("symbol matrix needs N_c >= 1, T >= 1");
  Rng rng(seed);
  MatC c(n_c, t);
  for (int i = 0; i < n_c; ++i) {
    for (int j = 0; j < t; ++j) {
      if (kind == SymbolKind::Gaussian) {
        c(i, j) = rng.cnormal();
      } else {
        const double re = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double im = rng.uniform() < 0.5 ? -1.0 : 1.0;
        c(i, j) = cd(re, im) * std::numbers::sqrt2 / 2.0;
      }
    }
  }
  return c;
}

MatC gen_echo(const MatC& w, const MatC& c, const ContourPartition& partition,
              const std::vector<SteeringBundle>& bundles, const SensingParams& sp,
              std::uint64_t seed) {
  if (w.cols() != c.rows()) throw BadScenario("beamformer/symbol dimensions disagree");
  if (bundles.size() != partition.subsections.size())
    throw BadScenario("bundle count does not match partition size");
  Rng rng(seed);
  const MatC x = w * c;  // N_t x T transmit signal
  const int n_r = static_cast<int>(bundles.front().b_k.size());
  MatC y = MatC::Zero(n_r, x.cols());
  for (size_t k = 0; k < bundles.size(); ++k) {
    const cd alpha = rng.cnormal();
    const double amp = sp.g() * std::sqrt(partition.subsections[k].l_k);
    y.noalias() += (amp * alpha) * bundles[k].b_k * (bundles[k].a_k.adjoint() * x);
  }
  const double sigma = std::sqrt(sp.sigma_s2);
  for (int i = 0; i < y.rows(); ++i)
    for (int j = 0; j < y.cols(); ++j) y(i, j) += sigma * rng.cnormal();
  return y;
}

double mf_estimate(const MatC& y, const ArrayConfig& cfg, const Eigen::VectorXd& grid) {
  if (grid.size() == 0) throw BadScenario("search grid is empty");
  // ||b^H Y||^2 = b^H (Y Y^H) b; the Gram matrix makes the scan O(N_r^2) per
  // grid point independent of T.
  const MatC gram = y * y.adjoint();
  double best_val = -1.0;
  double best_phi = grid[0];
  for (int i = 0; i < grid.size(); ++i) {
    const VecC b = steering_rx(cfg, grid[i]);
    const double val = std::real((b.adjoint() * gram * b)(0));
    const bool better =
        val > best_val ||
        (val == best_val && (std::abs(grid[i]) < std::abs(best_phi) ||
                             (std::abs(grid[i]) == std::abs(best_phi) && grid[i] < best_phi)));
    if (better) {
      best_val = val;
      best_phi = grid[i];
    }
  }
  return best_phi;
}

Eigen::VectorXd mf_grid(double step_deg) {
  if (!(step_deg > 0.0)) throw BadScenario("grid step must be positive");
  const int n = static_cast<int>(std::lround(180.0 / step_deg)) + 1;
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i)
    g[i] = (-90.0 + i * step_deg) * std::numbers::pi / 180.0;
  return g;
}

MseResult monte_carlo_mse(const MatC& w, const ContourPartition& partition,
                          const std::vector<SteeringBundle>& bundles, const ArrayConfig& cfg,
                          const SensingParams& sp, double phi_true,
                          const Eigen::VectorXd& grid, int n_trials, int n_symbols,
                          SymbolKind kind, std::uint64_t seed) {
  if (n_trials < 1) throw BadScenario("need at least one trial");
  MseResult out;
  out.trials.reserve(n_trials);
  double acc = 0.0;
  const int n_c = static_cast<int>(w.cols());
  for (int trial = 0; trial < n_trials; ++trial) {
    const std::uint64_t sub = Rng::derive_seed(seed, static_cast<std::uint64_t>(trial));
    const MatC c = gen_symbols(n_c, n_symbols, kind, Rng::derive_seed(sub, 0));
    const MatC y = gen_echo(w, c, partition, bundles, sp, Rng::derive_seed(sub, 1));
    const double phi_hat = mf_estimate(y, cfg, grid);
    const double err = phi_hat - phi_true;
    out.trials.push_back({phi_hat, phi_true, err * err});
    acc += err * err;
  }
  out.rmse = std::sqrt(acc / n_trials);
  return out;
}

}  // namespace isac
