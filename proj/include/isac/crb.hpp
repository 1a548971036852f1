#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "isac/array.hpp"
#include "isac/contour.hpp"

namespace isac {

/// Sensing-side constants. The delay-block spectral identity is carried with
/// a uniform t_s factor, so z2() below equals t_s * (4 pi B / c0)^2; the
/// default t_s = 1 s makes this numerically identical to the printed bound.
struct SensingParams {
  double d_o;              // target center range [m]
  double sigma_s2;         // sensing noise power [W]
  double t_s = 1.0;        // observation period [s]
  double bandwidth = 1e7;  // effective bandwidth B [Hz]
  double c0 = 299792458.0;

  double g() const { return 1.0 / (d_o * d_o); }  // sensing path loss
  double z2() const {
    const double z = 4.0 * std::numbers::pi * bandwidth / c0;
    return t_s * z * z;
  }
};

struct FimBlocks {
  Eigen::Matrix3d f_kappa1;   // FIM of (d_o, phi_o, varphi)
  double f_g = 0.0;           // Fisher scalar of the path loss
  Eigen::Vector3d f_kappa1_g; // coupling vector
  Eigen::Matrix3d j_kappa1;   // EFIM after Schur elimination of g
};

struct SubsectionDiagnostics {
  double a_rx_a;       // a_k^H R_x a_k
  double adot_rx_adot; // a_dot_k^H R_x a_dot_k
  double re_adot_rx_a; // Re(a_dot_k^H R_x a_k)
  double x_k;
  double z1_k;
  double l_k;
};

struct CrbReport {
  double crb_d = 0.0;       // [m^2]
  double crb_phi = 0.0;     // [rad^2]
  double crb_varphi = 0.0;  // [rad^2]
  FimBlocks blocks;
  std::vector<SubsectionDiagnostics> per_subsection;
};

/// Closed-form extended-target CRBs. Needs K >= 2 for crb_d / crb_varphi;
/// with phi_only set, a degenerate Schur term yields infinite crb_d and
/// crb_varphi instead of DegenerateFim.
CrbReport crb_et(const ContourPartition& partition, const std::vector<SteeringBundle>& bundles,
                 const MatC& r_x, const SensingParams& sp, bool phi_only = false);

struct PtCrb {
  double crb_d;
  double crb_phi;
};

/// Point-target bounds at direction phi_o.
PtCrb crb_pt(double phi_o, const SteeringBundle& bundle, const MatC& r_x,
             const SensingParams& sp);

enum class OracleMode {
  Approx,  // mu_k = [1, X_k, X_k], eta_k = [0, 1, 0] (the 1/d_o -> 0 limit)
  Exact,   // mu_k, eta_k by central differences of (d_k, phi_k) w.r.t. kappa1
};

/// Independent FIM assembly from the per-subsection building blocks. With
/// OracleMode::Exact the contour/pose are required to differentiate the
/// geometry numerically.
FimBlocks fim_numeric_oracle(const ContourPartition& partition,
                             const std::vector<SteeringBundle>& bundles, const MatC& r_x,
                             const SensingParams& sp, OracleMode mode,
                             const TfsContour* contour = nullptr,
                             const TargetPose* pose = nullptr);

/// Inverse of the EFIM; diagonal is (crb_d, crb_phi, crb_varphi).
Eigen::Matrix3d efim_schur(const FimBlocks& blocks);

}  // namespace isac
