#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "isac/contour.hpp"
#include "isac/errors.hpp"

namespace isac {

using cd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

struct ArrayConfig {
  int n_tx = 16;
  int n_rx = 16;
  double spacing = 0.5;  // element spacing in wavelengths
};

enum class Side { Tx, Rx };

/// Center-referenced ULA steering vector, element i carries phase
/// pi * sin(phi) * ((N-1)/2 - i) at half-wavelength spacing.
VecC steering(int n_elements, double phi, double spacing = 0.5);
VecC steering_tx(const ArrayConfig& cfg, double phi);
VecC steering_rx(const ArrayConfig& cfg, double phi);

/// Angular derivative, j*pi*cos(phi)*diag((N-1)/2, ..., -(N-1)/2) * a(phi).
VecC steering_derivative(const ArrayConfig& cfg, double phi, Side side);

/// Steering quantities of one contour subsection.
struct SteeringBundle {
  VecC a_k;      // transmit steering
  VecC a_dot_k;  // its angular derivative
  VecC b_k;      // receive steering
  VecC b_dot_k;  // its derivative
  double z1_k;   // pi^2 (N_r^2 - 1) cos^2(phi_k) / 12
};

SteeringBundle steering_bundle(const ArrayConfig& cfg, double phi);
std::vector<SteeringBundle> steering_bundles(const ArrayConfig& cfg,
                                             const ContourPartition& part);

/// Multipath downlink channel (Saleh-Valenzuela style, one row per user).
struct CommChannel {
  MatC h;                       // N_c x N_t, n-th row is h_n^H
  Eigen::VectorXd g;            // per-user large-scale path loss (linear)
  int n_paths = 1;
  double los_fraction = 1.0;    // 0 disables the deterministic LoS path

  int n_users() const { return static_cast<int>(h.rows()); }
  VecC user_channel(int n) const { return h.row(n).adjoint(); }  // h_n
};

/// Draws one channel realization. Path 1 points at the user's direction and
/// carries los_fraction of the power budget; the remaining n_paths-1 (or all
/// n_paths when los_fraction == 0, the blocked-LoS case) have uniform random
/// directions in (-pi/2, pi/2) and equal power shares.
CommChannel gen_channel(const ArrayConfig& cfg, const std::vector<double>& user_dirs,
                        const std::vector<double>& path_loss_db, int n_paths,
                        double los_fraction, std::uint64_t seed);

/// SINR of user n under beamforming matrix W (columns w_i).
double sinr(const CommChannel& channel, const MatC& w, int n, double sigma_n2);

double sum_rate(const CommChannel& channel, const MatC& w, double sigma_n2);

/// Transmit beampattern a(phi)^H R_x a(phi) on a grid.
Eigen::VectorXd beampattern(const ArrayConfig& cfg, const MatC& r_x,
                            const Eigen::VectorXd& phi_grid);

/// Throws NotPSD when the smallest eigenvalue is below -1e-9 * trace.
void check_psd(const MatC& r, const char* what);

}  // namespace isac
