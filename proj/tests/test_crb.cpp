#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isac/crb.hpp"
#include "isac/rng.hpp"
#include "test_util.hpp"

using namespace isac;
using testutil::random_psd;
using testutil::random_scene;
constexpr double kPi = std::numbers::pi;

TEST_CASE("closed forms match the EFIM-inversion oracle (approximate mu/eta)") {
  Rng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const auto s = random_scene(rng);
    const CrbReport rep = crb_et(s.partition, s.bundles, s.r_x, s.sp);
    const Eigen::Matrix3d crb =
        efim_schur(fim_numeric_oracle(s.partition, s.bundles, s.r_x, s.sp, OracleMode::Approx));
    CHECK(crb(0, 0) == doctest::Approx(rep.crb_d).epsilon(1e-8));
    CHECK(crb(1, 1) == doctest::Approx(rep.crb_phi).epsilon(1e-8));
    CHECK(crb(2, 2) == doctest::Approx(rep.crb_varphi).epsilon(1e-8));
  }
}

TEST_CASE("ordering and scaling invariants") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_scene(rng, 10, 6);
    const CrbReport rep = crb_et(s.partition, s.bundles, s.r_x, s.sp);
    CHECK(rep.crb_varphi >= rep.crb_phi);
    CHECK(rep.crb_d > 0.0);

    const double scale = rng.uniform(0.1, 10.0);
    const CrbReport scaled = crb_et(s.partition, s.bundles, scale * s.r_x, s.sp);
    CHECK(scaled.crb_d * scale == doctest::Approx(rep.crb_d).epsilon(1e-12));
    CHECK(scaled.crb_phi * scale == doctest::Approx(rep.crb_phi).epsilon(1e-12));
    CHECK(scaled.crb_varphi * scale == doctest::Approx(rep.crb_varphi).epsilon(1e-12));

    // Noise power enters every bound linearly.
    SensingParams noisy = s.sp;
    noisy.sigma_s2 *= 3.0;
    const CrbReport n3 = crb_et(s.partition, s.bundles, s.r_x, noisy);
    CHECK(n3.crb_phi == doctest::Approx(3.0 * rep.crb_phi).epsilon(1e-12));
  }
}

TEST_CASE("information monotonicity") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_scene(rng, 8, 5);
    const MatC extra = random_psd(rng, s.cfg.n_tx, 0.5);
    const auto base = fim_numeric_oracle(s.partition, s.bundles, s.r_x, s.sp, OracleMode::Approx);
    const auto more =
        fim_numeric_oracle(s.partition, s.bundles, s.r_x + extra, s.sp, OracleMode::Approx);
    const Eigen::Matrix3d crb_base = efim_schur(base);
    const Eigen::Matrix3d crb_more = efim_schur(more);
    for (int i = 0; i < 3; ++i)
      CHECK(crb_more(i, i) <= crb_base(i, i) * (1.0 + 1e-10));
  }
}

TEST_CASE("point-target bounds") {
  ArrayConfig cfg;
  cfg.n_tx = 8;
  cfg.n_rx = 8;
  SensingParams sp;
  sp.d_o = 40.0;
  sp.sigma_s2 = 1e-10;

  SUBCASE("isotropic covariance at boresight has the closed split") {
    const double p_t = 1.0;
    const MatC r = (p_t / cfg.n_tx) * MatC::Identity(cfg.n_tx, cfg.n_tx);
    const SteeringBundle b = steering_bundle(cfg, 0.0);
    const PtCrb pt = crb_pt(0.0, b, r, sp);
    const double g = sp.g();
    const double z1_tx = kPi * kPi * (cfg.n_tx * cfg.n_tx - 1) / 12.0;
    const double expect_phi =
        sp.sigma_s2 / (2.0 * g * g * cfg.n_rx * sp.t_s * p_t * (b.z1_k + z1_tx));
    CHECK(pt.crb_phi == doctest::Approx(expect_phi).epsilon(1e-12));
    CHECK(pt.crb_d ==
          doctest::Approx(sp.sigma_s2 / (2.0 * g * g * cfg.n_rx * sp.z2() * p_t)).epsilon(1e-12));
  }

  SUBCASE("range bound is direction independent under isotropic illumination") {
    const MatC r = (1.0 / cfg.n_tx) * MatC::Identity(cfg.n_tx, cfg.n_tx);
    const double d0 = crb_pt(0.0, steering_bundle(cfg, 0.0), r, sp).crb_d;
    const double d1 = crb_pt(0.7, steering_bundle(cfg, 0.7), r, sp).crb_d;
    CHECK(d0 == doctest::Approx(d1).epsilon(1e-12));
  }

  SUBCASE("single-subsection extended target reduces to the point target") {
    Rng rng(13);
    const auto contour = testutil::random_contour(rng);
    const TargetPose pose(60.0, 0.2, 0.1);
    const ContourPartition part = partition_los(contour, pose, Vec2::Zero(), 1, true);
    const auto bundles = steering_bundles(cfg, part);
    const MatC r = random_psd(rng, cfg.n_tx);
    SensingParams spx = sp;
    spx.d_o = pose.d_o;
    const CrbReport et = crb_et(part, bundles, r, spx, /*phi_only=*/true);
    const PtCrb pt = crb_pt(part.subsections[0].phi_k, bundles[0], r, spx);
    CHECK(et.crb_phi == doctest::Approx(pt.crb_phi).epsilon(1e-10));
    CHECK(std::isinf(et.crb_d));
    CHECK(std::isinf(et.crb_varphi));
  }
}

TEST_CASE("degenerate and invalid inputs") {
  Rng rng(29);
  const auto contour = testutil::random_contour(rng);
  const TargetPose pose(50.0, 0.0, 0.0);
  ArrayConfig cfg;
  cfg.n_tx = 6;
  cfg.n_rx = 6;
  SensingParams sp;
  sp.d_o = 50.0;
  sp.sigma_s2 = 1e-10;

  SUBCASE("K = 1 cannot resolve range and orientation") {
    const ContourPartition part = partition_los(contour, pose, Vec2::Zero(), 1, false);
    const auto bundles = steering_bundles(cfg, part);
    CHECK_THROWS_AS(crb_et(part, bundles, MatC::Identity(6, 6), sp), DegenerateFim);
  }

  SUBCASE("a dark subsection is rejected") {
    const ContourPartition part = partition_los(contour, pose, Vec2::Zero(), 1, false);
    const auto bundles = steering_bundles(cfg, part);
    // Rank-one covariance orthogonal to the only steering vector.
    VecC v = steering_tx(cfg, 0.9);
    const VecC a = bundles[0].a_k;
    v -= a * ((a.adjoint() * v)(0) / a.squaredNorm());
    const MatC r = v * v.adjoint();
    CHECK_THROWS_AS(crb_et(part, bundles, r, sp, true), ZeroIllumination);
  }

  SUBCASE("non-PSD covariance is rejected") {
    const ContourPartition part = partition_los(contour, pose, Vec2::Zero(), 3, false);
    const auto bundles = steering_bundles(cfg, part);
    MatC r = MatC::Identity(6, 6);
    r(2, 2) = -0.5;
    CHECK_THROWS_AS(crb_et(part, bundles, r, sp), NotPSD);
  }
}

TEST_CASE("Fisher blocks match the printed Appendix forms") {
  Rng rng(211);
  const auto s = random_scene(rng, 8, 5);
  const auto blocks =
      fim_numeric_oracle(s.partition, s.bundles, s.r_x, s.sp, OracleMode::Approx);

  double f_g = 0.0, cross = 0.0;
  for (size_t k = 0; k < s.bundles.size(); ++k) {
    const double l = s.partition.subsections[k].l_k;
    f_g += l * std::real((s.bundles[k].a_k.adjoint() * s.r_x * s.bundles[k].a_k)(0));
    cross += l * std::real((s.bundles[k].a_dot_k.adjoint() * s.r_x * s.bundles[k].a_k)(0));
  }
  const double c_g = 2.0 * s.cfg.n_rx * s.sp.t_s / s.sp.sigma_s2;
  CHECK(blocks.f_g == doctest::Approx(c_g * f_g).epsilon(1e-12));
  CHECK(blocks.f_kappa1_g[0] == doctest::Approx(0.0));
  CHECK(blocks.f_kappa1_g[2] == doctest::Approx(0.0));
  CHECK(blocks.f_kappa1_g[1] == doctest::Approx(c_g * s.sp.g() * cross).epsilon(1e-12));
}

TEST_CASE("efim_schur") {
  SUBCASE("no nuisance coupling leaves the plain inverse") {
    FimBlocks b;
    b.f_kappa1 << 4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0;
    b.f_g = 1.0;
    b.f_kappa1_g.setZero();
    b.j_kappa1 = b.f_kappa1;
    const Eigen::Matrix3d crb = efim_schur(b);
    CHECK((crb - b.f_kappa1.inverse()).norm() < 1e-12);
  }

  SUBCASE("inverse matches the adjugate formula on random SPD inputs") {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
      Eigen::Matrix3d a;
      for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = rng.normal();
      FimBlocks b;
      b.j_kappa1 = a * a.transpose() + Eigen::Matrix3d::Identity();
      b.f_g = 1.0;
      b.f_kappa1_g.setZero();
      b.f_kappa1 = b.j_kappa1;
      const Eigen::Matrix3d inv = efim_schur(b);
      const double det = b.j_kappa1.determinant();
      // Adjugate oracle for the (0,0) entry.
      const double adj00 = (b.j_kappa1(1, 1) * b.j_kappa1(2, 2) -
                            b.j_kappa1(1, 2) * b.j_kappa1(2, 1)) /
                           det;
      CHECK(inv(0, 0) == doctest::Approx(adj00).epsilon(1e-12));
    }
  }

  SUBCASE("singular information is reported with the eigenvalue") {
    FimBlocks b;
    b.j_kappa1.setZero();
    b.f_g = 1.0;
    b.f_kappa1_g.setZero();
    b.f_kappa1.setZero();
    CHECK_THROWS_AS(efim_schur(b), SingularEfim);
  }
}

TEST_CASE("exact-derivative oracle converges to the closed form as d_o grows") {
  // The closed forms use the small-contour approximation; against exact
  // numerical derivatives of (d_k, phi_k) the gap shrinks like 1/d_o.
  const TfsContour contour = contour_preset("vehicle");
  ArrayConfig cfg;
  cfg.n_tx = 8;
  cfg.n_rx = 8;
  double prev_gap = 1e9;
  for (double d_o : {250.0, 500.0, 1000.0}) {
    const TargetPose pose(d_o, 0.1, 0.2);
    const ContourPartition part =
        partition_los(contour, pose, Vec2::Zero(), 6, true, XConvention::Geometric);
    const auto bundles = steering_bundles(cfg, part);
    const MatC r = MatC::Identity(cfg.n_tx, cfg.n_tx);
    SensingParams sp;
    sp.d_o = d_o;
    sp.sigma_s2 = 1e-10;
    const CrbReport rep = crb_et(part, bundles, r, sp);
    const Eigen::Matrix3d exact = efim_schur(fim_numeric_oracle(
        part, bundles, r, sp, OracleMode::Exact, &contour, &pose));
    const double gap = std::abs(exact(1, 1) / rep.crb_phi - 1.0) +
                       std::abs(exact(0, 0) / rep.crb_d - 1.0);
    CHECK(gap < prev_gap * 1.01);
    prev_gap = gap;
    if (d_o == 1000.0) CHECK(gap < 0.01);
  }
}

TEST_CASE("report serializes its per-subsection diagnostics") {
  Rng rng(404);
  const auto s = random_scene(rng, 8, 5);
  const CrbReport rep = crb_et(s.partition, s.bundles, s.r_x, s.sp);
  REQUIRE(rep.per_subsection.size() == s.bundles.size());
  for (const auto& d : rep.per_subsection) {
    CHECK(d.a_rx_a > 0.0);
    CHECK(d.l_k > 0.0);
  }
}
