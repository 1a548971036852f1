#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "isac/errors.hpp"

namespace isac {

using Vec2 = Eigen::Vector2d;

/// Truncated-Fourier-series contour: local x uses cosine harmonics with
/// coefficients m, local y uses sine harmonics with coefficients n.
struct TfsContour {
  Eigen::VectorXd m;  // cosine coefficients a_q [m]
  Eigen::VectorXd n;  // sine coefficients b_q [m]

  TfsContour(Eigen::VectorXd m_in, Eigen::VectorXd n_in);

  int harmonics() const { return static_cast<int>(m.size()); }
};

// §V presets, loadable by name ("vehicle" or "uav").
TfsContour contour_preset(const std::string& name);

/// Target placement in the global frame.
struct TargetPose {
  double d_o;     // BS-to-center range [m], > 0
  double phi_o;   // direction [rad], in (-pi/2, pi/2)
  double varphi;  // orientation [rad]

  TargetPose(double d_o_in, double phi_o_in, double varphi_in);

  Vec2 center() const { return {d_o * std::cos(phi_o), d_o * std::sin(phi_o)}; }
  Eigen::Matrix2d spin() const {
    Eigen::Matrix2d v;
    v << std::cos(varphi), -std::sin(varphi), std::sin(varphi), std::cos(varphi);
    return v;
  }
};

// Two printed conventions for the contour intermediate X_k; they disagree in
// argument and trig assignment (see contour_intermediate).
enum class XConvention { Printed, Geometric };

struct SubsectionGeometry {
  double u_k;               // local direction [rad]
  Vec2 rho_k;               // local position [m]
  Vec2 p_k;                 // global position [m]
  double d_k;               // range to subsection [m]
  double phi_k;             // global direction [rad]
  double l_k;               // arc length [m] (or normalized share)
  double x_k;               // contour intermediate [m]
  Eigen::VectorXd nu_k;     // cos(q u_k), q = 1..Q
  Eigen::VectorXd sigma_k;  // sin(q u_k), q = 1..Q
};

struct ContourPartition {
  std::vector<SubsectionGeometry> subsections;
  double u_lower = 0.0;
  double u_upper = 0.0;

  int size() const { return static_cast<int>(subsections.size()); }
  double total_length() const;
};

/// Local contour point rho(u) = [sum a_q cos(qu), sum b_q sin(qu)].
Vec2 contour_point(const TfsContour& c, double u);

/// d rho / du, analytic.
Vec2 contour_tangent(const TfsContour& c, double u);

/// Global contour point p(u) = p_o + V rho(u).
Vec2 global_point(const TfsContour& c, const TargetPose& pose, double u);

/// Contour intermediate X_k.
///   Printed:   -nu^T m cos(phi_o + varphi) + sigma^T n sin(phi_o + varphi)
///   Geometric: -nu^T m sin(phi_o - varphi) + sigma^T n cos(phi_o - varphi)
/// The geometric form equals rho_k^T V^T p_perp with p_perp = (-sin phi_o, cos phi_o).
double contour_intermediate(const TfsContour& c, const TargetPose& pose, double u_k,
                            XConvention conv = XConvention::Printed);

/// LoS interval [u_lower, u_upper] found by the outward-normal visibility test
/// (largest contiguous arc whose outward normal points toward the BS).
std::pair<double, double> los_interval(const TfsContour& c, const TargetPose& pose,
                                       const Vec2& bs_position);

/// Splits the LoS contour into K equal-angular subsections with midpoint
/// representatives; l_k by 64-point composite trapezoid arc length per bin.
ContourPartition partition_los(const TfsContour& c, const TargetPose& pose,
                               const Vec2& bs_position, int K, bool normalize,
                               XConvention conv = XConvention::Printed);

}  // namespace isac
