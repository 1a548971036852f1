#include "isac/array.hpp"

#include <cmath>
#include <numbers>

#include "isac/rng.hpp"

namespace isac {

namespace {
constexpr cd kJ{0.0, 1.0};
}

VecC steering(int n_elements, double phi, double spacing) {
  VecC a(n_elements);
  const double k = 2.0 * std::numbers::pi * spacing * std::sin(phi);
  const double center = 0.5 * (n_elements - 1);
  for (int i = 0; i < n_elements; ++i) a[i] = std::exp(kJ * (k * (center - i)));
  return a;
}

VecC steering_tx(const ArrayConfig& cfg, double phi) { return steering(cfg.n_tx, phi, cfg.spacing); }
VecC steering_rx(const ArrayConfig& cfg, double phi) { return steering(cfg.n_rx, phi, cfg.spacing); }

VecC steering_derivative(const ArrayConfig& cfg, double phi, Side side) {
  const int n = side == Side::Tx ? cfg.n_tx : cfg.n_rx;
  VecC a = steering(n, phi, cfg.spacing);
  const double scale = 2.0 * std::numbers::pi * cfg.spacing * std::cos(phi);
  const double center = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i) a[i] *= kJ * (scale * (center - i));
  return a;
}

SteeringBundle steering_bundle(const ArrayConfig& cfg, double phi) {
  SteeringBundle b;
  b.a_k = steering_tx(cfg, phi);
  b.a_dot_k = steering_derivative(cfg, phi, Side::Tx);
  b.b_k = steering_rx(cfg, phi);
  b.b_dot_k = steering_derivative(cfg, phi, Side::Rx);
  const double w = 2.0 * std::numbers::pi * cfg.spacing;
  const double c = std::cos(phi);
  b.z1_k = w * w * (cfg.n_rx * cfg.n_rx - 1) * c * c / 12.0;
  return b;
}

std::vector<SteeringBundle> steering_bundles(const ArrayConfig& cfg,
                                             const ContourPartition& part) {
  std::vector<SteeringBundle> out;
  out.reserve(part.subsections.size());
  for (const auto& sub : part.subsections) out.push_back(steering_bundle(cfg, sub.phi_k));
  return out;
}

CommChannel gen_channel(const ArrayConfig& cfg, const std::vector<double>& user_dirs,
                        const std::vector<double>& path_loss_db, int n_paths,
                        double los_fraction, std::uint64_t seed) {
  if (n_paths < 1) throw BadScenario("channel requires at least one path");
  if (user_dirs.size() != path_loss_db.size())
    throw BadScenario("user_dirs and path_loss_db must have equal length");
  const int n_users = static_cast<int>(user_dirs.size());
  if (n_users > cfg.n_tx) throw BadScenario("scenario requires N_c <= N_t");

  CommChannel ch;
  ch.h.resize(n_users, cfg.n_tx);
  ch.g.resize(n_users);
  ch.n_paths = n_paths;
  ch.los_fraction = los_fraction;

  Rng rng(seed);
  const bool has_los = los_fraction > 0.0;
  for (int n = 0; n < n_users; ++n) {
    ch.g[n] = std::pow(10.0, -path_loss_db[n] / 10.0);
    VecC h_n = VecC::Zero(cfg.n_tx);
    const int n_random = has_los ? n_paths - 1 : n_paths;
    const double random_power =
        n_random > 0 ? (has_los ? (1.0 - los_fraction) / n_random : 1.0 / n_paths) : 0.0;
    if (has_los) {
      const cd beta = std::sqrt(los_fraction) * rng.cnormal();
      h_n += beta * steering_tx(cfg, user_dirs[n]);
    }
    for (int l = 0; l < n_random; ++l) {
      const double dir = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
      const cd beta = std::sqrt(random_power) * rng.cnormal();
      h_n += beta * steering_tx(cfg, dir);
    }
    ch.h.row(n) = (std::sqrt(ch.g[n]) * h_n).adjoint();
  }
  return ch;
}

double sinr(const CommChannel& channel, const MatC& w, int n, double sigma_n2) {
  const VecC h_n = channel.user_channel(n);
  double signal = 0.0, interference = 0.0;
  for (int i = 0; i < w.cols(); ++i) {
    const double p = std::norm((h_n.adjoint() * w.col(i))(0));
    if (i == n)
      signal = p;
    else
      interference += p;
  }
  return signal / (interference + sigma_n2);
}

double sum_rate(const CommChannel& channel, const MatC& w, double sigma_n2) {
  double rate = 0.0;
  for (int n = 0; n < channel.n_users(); ++n)
    rate += std::log2(1.0 + sinr(channel, w, n, sigma_n2));
  return rate;
}

void check_psd(const MatC& r, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatC> es(r, Eigen::EigenvaluesOnly);
  const double tr = r.real().trace();
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(tr, 1e-300))
    throw NotPSD(std::string(what) + ": matrix is not positive semidefinite");
}

Eigen::VectorXd beampattern(const ArrayConfig& cfg, const MatC& r_x,
                            const Eigen::VectorXd& phi_grid) {
  check_psd(r_x, "beampattern");
  Eigen::VectorXd out(phi_grid.size());
  for (int i = 0; i < phi_grid.size(); ++i) {
    const VecC a = steering_tx(cfg, phi_grid[i]);
    out[i] = std::real((a.adjoint() * r_x * a)(0));
  }
  return out;
}

}  // namespace isac
