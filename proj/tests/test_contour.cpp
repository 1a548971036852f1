#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isac/contour.hpp"
#include "isac/rng.hpp"
#include "test_util.hpp"

using namespace isac;
constexpr double kPi = std::numbers::pi;

namespace {

TfsContour circle(double r) {
  Eigen::VectorXd m(1), n(1);
  m << r;
  n << r;
  return TfsContour(m, n);
}

}  // namespace

TEST_CASE("contour_point on elementary shapes") {
  const TfsContour c = circle(2.0);
  CHECK(contour_point(c, 0.0).isApprox(Vec2(2.0, 0.0), 1e-14));

  const TfsContour vehicle = contour_preset("vehicle");
  const Vec2 nose = contour_point(vehicle, 0.0);
  CHECK(nose.x() == doctest::Approx(2.483).epsilon(1e-12));  // sum of cosine coefficients
  CHECK(nose.y() == doctest::Approx(0.0));

  // Even harmonics zero: at u = pi/2 the x part cancels and only odd sine
  // harmonics survive with alternating signs.
  Eigen::VectorXd m(4), n(4);
  m << 1.0, 0.0, 0.3, 0.0;
  n << 1.0, 0.0, 0.2, 0.0;
  const TfsContour odd(m, n);
  const Vec2 p = contour_point(odd, kPi / 2.0);
  CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(1.0 - 0.2).epsilon(1e-12));
}

TEST_CASE("contour construction guards") {
  Eigen::VectorXd m(2), n(2);
  m << -1.0, 0.0;
  n << 1.0, 0.0;
  CHECK_THROWS_AS(TfsContour(m, n), BadScenario);
  Eigen::VectorXd n3(3);
  n3 << 1.0, 0.0, 0.0;
  m << 1.0, 0.0;
  CHECK_THROWS_AS(TfsContour(m, n3), BadScenario);
  CHECK_THROWS_AS(contour_preset("boat"), BadScenario);
}

TEST_CASE("global_point applies translation and spin") {
  const TfsContour c = circle(1.0);
  const TargetPose straight(10.0, 0.0, 0.0);
  CHECK(global_point(c, straight, 0.0).isApprox(Vec2(11.0, 0.0), 1e-14));

  const TargetPose quarter(1.0, 0.0, kPi / 2.0);
  CHECK(quarter.spin().col(0).isApprox(Vec2(0.0, 1.0), 1e-14));
  CHECK(global_point(c, quarter, 0.0).isApprox(Vec2(1.0, 1.0), 1e-14));

  const TargetPose vpose(27.0, 0.0, 0.0);
  CHECK(global_point(contour_preset("vehicle"), vpose, 0.0)
            .isApprox(Vec2(29.483, 0.0), 1e-12));
}

TEST_CASE("partition_los recovers the far-field half circle") {
  const double r = 1.0;
  const TfsContour c = circle(r);
  const TargetPose pose(1000.0, 0.0, 0.0);
  const ContourPartition part = partition_los(c, pose, Vec2::Zero(), 2, false);
  CHECK(part.u_lower == doctest::Approx(kPi / 2.0).epsilon(5e-3));
  CHECK(part.u_upper == doctest::Approx(3.0 * kPi / 2.0).epsilon(5e-3));
  REQUIRE(part.size() == 2);
  CHECK(part.subsections[0].l_k == doctest::Approx(kPi * r / 2.0).epsilon(1e-2));
  CHECK(part.subsections[1].l_k == doctest::Approx(kPi * r / 2.0).epsilon(1e-2));
}

TEST_CASE("partition_los normalization and single-bin cases") {
  const TfsContour c = contour_preset("vehicle");
  const TargetPose pose(27.0, 0.0, 0.3);
  const ContourPartition norm = partition_los(c, pose, Vec2::Zero(), 5, true);
  CHECK(norm.total_length() == doctest::Approx(1.0).epsilon(1e-12));

  const ContourPartition full = partition_los(c, pose, Vec2::Zero(), 7, false);
  const ContourPartition single = partition_los(c, pose, Vec2::Zero(), 1, false);
  REQUIRE(single.size() == 1);
  // Same arc integrated with 64 panels instead of 7 x 64; quadrature-level gap.
  CHECK(single.subsections[0].l_k == doctest::Approx(full.total_length()).epsilon(1e-4));
}

TEST_CASE("subsection geometry satisfies the frame identities") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const TfsContour c = testutil::random_contour(rng);
    const TargetPose pose = testutil::random_pose(rng);
    const ContourPartition part = partition_los(c, pose, Vec2::Zero(), 6, false);
    double prev_u = part.u_lower - 1.0;
    for (const auto& s : part.subsections) {
      CHECK(s.u_k > prev_u);
      CHECK(s.u_k >= part.u_lower);
      CHECK(s.u_k <= part.u_upper);
      prev_u = s.u_k;
      CHECK(s.p_k.isApprox(pose.center() + pose.spin() * s.rho_k, 1e-12));
      CHECK(s.d_k == doctest::Approx(s.p_k.norm()).epsilon(1e-12));
      CHECK(s.phi_k == doctest::Approx(std::atan2(s.p_k.y(), s.p_k.x())).epsilon(1e-12));
      // Round trip back to the local frame.
      const Vec2 local = pose.spin().transpose() * (s.p_k - pose.center());
      CHECK(local.isApprox(s.rho_k, 1e-10));
    }
  }
}

TEST_CASE("arc length is stable under partition refinement") {
  const TfsContour c = contour_preset("uav");
  const TargetPose pose(40.0, 0.2, -0.4);
  const double l_k = partition_los(c, pose, Vec2::Zero(), 4, false).total_length();
  const double l_2k = partition_los(c, pose, Vec2::Zero(), 8, false).total_length();
  CHECK(l_k == doctest::Approx(l_2k).epsilon(1e-6));
}

TEST_CASE("visibility is invariant under a global rotation") {
  const TfsContour c = contour_preset("vehicle");
  const double theta = 0.25;
  const TargetPose pose(30.0, -0.1, 0.5);
  const TargetPose rotated(30.0, -0.1 + theta, 0.5 + theta);
  const ContourPartition a = partition_los(c, pose, Vec2::Zero(), 4, false);
  const ContourPartition b = partition_los(c, rotated, Vec2::Zero(), 4, false);
  CHECK(a.u_lower == doctest::Approx(b.u_lower).epsilon(1e-6));
  CHECK(a.u_upper == doctest::Approx(b.u_upper).epsilon(1e-6));
  for (int k = 0; k < a.size(); ++k)
    CHECK(b.subsections[k].phi_k ==
          doctest::Approx(a.subsections[k].phi_k + theta).epsilon(1e-6));
}

TEST_CASE("empty line of sight is reported") {
  // BS inside the contour: every outward normal points away from it.
  const TfsContour c = circle(5.0);
  const TargetPose pose(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(partition_los(c, pose, Vec2::Zero(), 3, false), EmptyLoS);
}

TEST_CASE("contour intermediate, printed convention") {
  const TfsContour c = circle(1.5);
  const TargetPose pose(25.0, 0.0, 0.0);
  for (double u : {0.3, 1.2, 2.9})
    CHECK(contour_intermediate(c, pose, u) == doctest::Approx(-1.5 * std::cos(u)));
  CHECK(contour_intermediate(c, pose, kPi / 2.0) == doctest::Approx(0.0));

  const TfsContour vehicle = contour_preset("vehicle");
  CHECK(contour_intermediate(vehicle, pose, 0.0) == doctest::Approx(-2.483).epsilon(1e-12));
}

TEST_CASE("geometric convention matches the projection formula") {
  // The geometric form equals rho^T V^T p_perp / d_o with p_perp the unit
  // vector orthogonal to the center direction.
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const TfsContour c = testutil::random_contour(rng);
    const TargetPose pose = testutil::random_pose(rng);
    const double u = rng.uniform(0.0, 2.0 * kPi);
    const Vec2 p_perp(-std::sin(pose.phi_o), std::cos(pose.phi_o));
    const Vec2 rho = contour_point(c, u);
    const double expected = rho.dot(pose.spin().transpose() * p_perp);
    CHECK(contour_intermediate(c, pose, u, XConvention::Geometric) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("printed and geometric conventions differ in general") {
  // The two published forms of X_k disagree away from special angles; both
  // are exposed and this records the discrepancy.
  const TfsContour c = contour_preset("vehicle");
  const TargetPose pose(27.0, 0.3, 0.4);
  const double printed = contour_intermediate(c, pose, 0.7, XConvention::Printed);
  const double geometric = contour_intermediate(c, pose, 0.7, XConvention::Geometric);
  CHECK(std::abs(printed - geometric) > 1e-6);
}
