#include "isac/crb.hpp"

#include <cmath>
#include <limits>

namespace isac {

namespace {

struct SumTerms {
  double s0 = 0.0;  // sum l_k a^H R a
  double s1 = 0.0;  // sum l_k X_k a^H R a
  double s2 = 0.0;  // sum l_k X_k^2 a^H R a
  double t = 0.0;   // sum l_k (Z1_k a^H R a + adot^H R adot)
  double g = 0.0;   // sum l_k Re(adot^H R a)
};

std::vector<SubsectionDiagnostics> diagnostics(const ContourPartition& partition,
                                               const std::vector<SteeringBundle>& bundles,
                                               const MatC& r_x) {
  if (bundles.size() != partition.subsections.size())
    throw BadScenario("bundle count does not match partition size");
  check_psd(r_x, "crb");
  std::vector<SubsectionDiagnostics> diag;
  diag.reserve(bundles.size());
  const double scale = std::max(r_x.real().trace(), 1e-300);
  for (size_t k = 0; k < bundles.size(); ++k) {
    const auto& b = bundles[k];
    SubsectionDiagnostics d;
    d.a_rx_a = std::real((b.a_k.adjoint() * r_x * b.a_k)(0));
    d.adot_rx_adot = std::real((b.a_dot_k.adjoint() * r_x * b.a_dot_k)(0));
    d.re_adot_rx_a = std::real((b.a_dot_k.adjoint() * r_x * b.a_k)(0));
    d.x_k = partition.subsections[k].x_k;
    d.z1_k = b.z1_k;
    d.l_k = partition.subsections[k].l_k;
    if (d.a_rx_a <= 1e-14 * scale)
      throw ZeroIllumination("subsection receives no transmit energy");
    diag.push_back(d);
  }
  return diag;
}

SumTerms accumulate(const std::vector<SubsectionDiagnostics>& diag) {
  SumTerms s;
  for (const auto& d : diag) {
    s.s0 += d.l_k * d.a_rx_a;
    s.s1 += d.l_k * d.x_k * d.a_rx_a;
    s.s2 += d.l_k * d.x_k * d.x_k * d.a_rx_a;
    s.t += d.l_k * (d.z1_k * d.a_rx_a + d.adot_rx_adot);
    s.g += d.l_k * d.re_adot_rx_a;
  }
  return s;
}

FimBlocks assemble_blocks(const std::vector<SubsectionDiagnostics>& diag,
                          const std::vector<Eigen::Vector3d>& mu,
                          const std::vector<Eigen::Vector3d>& eta, int n_rx,
                          const SensingParams& sp) {
  FimBlocks blocks;
  const double g = sp.g();
  const double c1 = 2.0 * g * g * n_rx / sp.sigma_s2;
  Eigen::Matrix3d f = Eigen::Matrix3d::Zero();
  Eigen::Vector3d fg_vec = Eigen::Vector3d::Zero();
  double f_g = 0.0;
  for (size_t k = 0; k < diag.size(); ++k) {
    const auto& d = diag[k];
    const double ratio = d.adot_rx_adot / d.a_rx_a;
    f += c1 * d.l_k * d.a_rx_a *
         (sp.z2() * mu[k] * mu[k].transpose() +
          sp.t_s * (d.z1_k + ratio) * eta[k] * eta[k].transpose());
    fg_vec += (2.0 * g * n_rx * sp.t_s / sp.sigma_s2) * d.l_k * d.re_adot_rx_a * eta[k];
    f_g += (2.0 * n_rx * sp.t_s / sp.sigma_s2) * d.l_k * d.a_rx_a;
  }
  blocks.f_kappa1 = f;
  blocks.f_g = f_g;
  blocks.f_kappa1_g = fg_vec;
  blocks.j_kappa1 = f - fg_vec * fg_vec.transpose() / f_g;
  return blocks;
}

}  // namespace

Eigen::Matrix3d efim_schur(const FimBlocks& blocks) {
  if (blocks.f_g <= 0.0) throw SingularEfim("f_g must be positive", blocks.f_g);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(blocks.j_kappa1);
  const Eigen::Vector3d ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0 || ev.maxCoeff() / ev.minCoeff() > 1e12)
    throw SingularEfim("EFIM is singular or badly conditioned", ev.minCoeff());
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

CrbReport crb_et(const ContourPartition& partition, const std::vector<SteeringBundle>& bundles,
                 const MatC& r_x, const SensingParams& sp, bool phi_only) {
  const int n_rx = bundles.empty() ? 0 : static_cast<int>(bundles.front().b_k.size());
  auto diag = diagnostics(partition, bundles, r_x);
  const SumTerms s = accumulate(diag);

  const double g = sp.g();
  const double pref_d = 2.0 * g * g * n_rx * sp.z2() / sp.sigma_s2;
  const double pref_phi = 2.0 * g * g * n_rx * sp.t_s / sp.sigma_s2;

  const double bracket_d = s.s0 - s.s1 * s.s1 / s.s2;
  const double bracket_phi = s.t - s.g * s.g / s.s0;
  const double bracket_varphi = s.s2 - s.s1 * s.s1 / s.s0;

  CrbReport report;
  report.per_subsection = diag;
  report.crb_phi = 1.0 / (pref_phi * bracket_phi);

  const double degeneracy_tol = 1e-12;
  const bool degenerate =
      bracket_d <= degeneracy_tol * s.s0 || bracket_varphi <= degeneracy_tol * s.s2;
  if (degenerate) {
    if (!phi_only)
      throw DegenerateFim(
          "Schur-reduced information for d_o/varphi vanished (all X_k equal; K >= 2 with "
          "distinct X_k required)");
    report.crb_d = std::numeric_limits<double>::infinity();
    report.crb_varphi = std::numeric_limits<double>::infinity();
  } else {
    report.crb_d = 1.0 / (pref_d * bracket_d);
    report.crb_varphi = report.crb_phi + 1.0 / (pref_d * bracket_varphi);
  }

  std::vector<Eigen::Vector3d> mu(diag.size()), eta(diag.size());
  for (size_t k = 0; k < diag.size(); ++k) {
    mu[k] = {1.0, diag[k].x_k, diag[k].x_k};
    eta[k] = {0.0, 1.0, 0.0};
  }
  report.blocks = assemble_blocks(diag, mu, eta, n_rx, sp);

  if (!degenerate) {
    // The closed forms must agree with the EFIM inversion; treat disagreement
    // beyond 1e-8 relative as an internal numerical failure.
    const Eigen::Matrix3d crb = efim_schur(report.blocks);
    const double rel_d = std::abs(crb(0, 0) - report.crb_d) / report.crb_d;
    const double rel_phi = std::abs(crb(1, 1) - report.crb_phi) / report.crb_phi;
    const double rel_varphi = std::abs(crb(2, 2) - report.crb_varphi) / report.crb_varphi;
    if (rel_d > 1e-8 || rel_phi > 1e-8 || rel_varphi > 1e-8)
      throw SolverFailure("closed-form CRB disagrees with EFIM inversion");
  }
  return report;
}

PtCrb crb_pt(double phi_o, const SteeringBundle& bundle, const MatC& r_x,
             const SensingParams& sp) {
  check_psd(r_x, "crb_pt");
  const int n_rx = static_cast<int>(bundle.b_k.size());
  const double a_rx_a = std::real((bundle.a_k.adjoint() * r_x * bundle.a_k)(0));
  if (a_rx_a <= 1e-14 * std::max(r_x.real().trace(), 1e-300))
    throw ZeroIllumination("target direction receives no transmit energy");
  const double adot_rx_adot = std::real((bundle.a_dot_k.adjoint() * r_x * bundle.a_dot_k)(0));
  const double re_cross = std::real((bundle.a_dot_k.adjoint() * r_x * bundle.a_k)(0));

  const double g = sp.g();
  PtCrb out;
  out.crb_d = sp.sigma_s2 / (2.0 * g * g * n_rx * sp.z2()) / a_rx_a;
  const double denom =
      bundle.z1_k * a_rx_a + adot_rx_adot - (2.0 * re_cross) * (2.0 * re_cross) / (4.0 * a_rx_a);
  out.crb_phi = sp.sigma_s2 / (2.0 * g * g * n_rx * sp.t_s) / denom;
  return out;
}

FimBlocks fim_numeric_oracle(const ContourPartition& partition,
                             const std::vector<SteeringBundle>& bundles, const MatC& r_x,
                             const SensingParams& sp, OracleMode mode,
                             const TfsContour* contour, const TargetPose* pose) {
  const int n_rx = bundles.empty() ? 0 : static_cast<int>(bundles.front().b_k.size());
  auto diag = diagnostics(partition, bundles, r_x);

  std::vector<Eigen::Vector3d> mu(diag.size()), eta(diag.size());
  if (mode == OracleMode::Approx) {
    for (size_t k = 0; k < diag.size(); ++k) {
      mu[k] = {1.0, diag[k].x_k, diag[k].x_k};
      eta[k] = {0.0, 1.0, 0.0};
    }
  } else {
    if (contour == nullptr || pose == nullptr)
      throw BadScenario("exact oracle needs the contour and pose");
    for (size_t k = 0; k < diag.size(); ++k) {
      const double u_k = partition.subsections[k].u_k;
      const auto geometry = [&](double d_o, double phi_o, double varphi) {
        const TargetPose p(d_o, phi_o, varphi);
        const Vec2 pt = p.center() + p.spin() * contour_point(*contour, u_k);
        return std::pair{pt.norm(), std::atan2(pt.y(), pt.x())};
      };
      const double hd = 1e-6 * pose->d_o;
      const double ha = 1e-7;
      const auto diff = [&](int axis) {
        double dp[3] = {pose->d_o, pose->phi_o, pose->varphi};
        double dm[3] = {pose->d_o, pose->phi_o, pose->varphi};
        const double h = axis == 0 ? hd : ha;
        dp[axis] += h;
        dm[axis] -= h;
        const auto [d_p, phi_p] = geometry(dp[0], dp[1], dp[2]);
        const auto [d_m, phi_m] = geometry(dm[0], dm[1], dm[2]);
        return std::pair{(d_p - d_m) / (2.0 * h), (phi_p - phi_m) / (2.0 * h)};
      };
      for (int axis = 0; axis < 3; ++axis) {
        const auto [dmu, deta] = diff(axis);
        mu[k][axis] = dmu;
        eta[k][axis] = deta;
      }
    }
  }
  return assemble_blocks(diag, mu, eta, n_rx, sp);
}

}  // namespace isac
