#pragma once

// Shared generators for randomized suites: smooth random contours, random
// poses in front of the BS at the origin, and random PSD covariances.

#include <vector>

#include "isac/array.hpp"
#include "isac/contour.hpp"
#include "isac/crb.hpp"
#include "isac/rng.hpp"

namespace testutil {

using namespace isac;

inline TfsContour random_contour(Rng& rng) {
  const int q = 2 + static_cast<int>(rng.uniform() * 4);
  Eigen::VectorXd m(q), n(q);
  m[0] = rng.uniform(0.5, 2.5);
  n[0] = rng.uniform(0.5, 2.5);
  for (int i = 1; i < q; ++i) {
    // Higher harmonics small enough to keep the contour star-shaped/convex.
    m[i] = rng.uniform(-0.05, 0.05) * m[0];
    n[i] = rng.uniform(-0.05, 0.05) * n[0];
  }
  return TfsContour(m, n);
}

inline TargetPose random_pose(Rng& rng) {
  return TargetPose(rng.uniform(20.0, 80.0), rng.uniform(-0.9, 0.9), rng.uniform(-1.0, 1.0));
}

inline MatC random_psd(Rng& rng, int n, double trace = 1.0) {
  MatC a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.cnormal();
  MatC r = a * a.adjoint();
  return r * (trace / r.real().trace());
}

struct RandomScene {
  TfsContour contour;
  TargetPose pose;
  ContourPartition partition;
  std::vector<SteeringBundle> bundles;
  MatC r_x;
  SensingParams sp;
  ArrayConfig cfg;
};

inline RandomScene random_scene(Rng& rng, int n_t_max = 16, int k_max = 8,
                                XConvention conv = XConvention::Printed) {
  RandomScene s{random_contour(rng), random_pose(rng), {}, {}, {}, {}, {}};
  s.cfg.n_tx = 4 + static_cast<int>(rng.uniform() * (n_t_max - 3));
  s.cfg.n_rx = s.cfg.n_tx + static_cast<int>(rng.uniform() * 3);
  const int k = 2 + static_cast<int>(rng.uniform() * (k_max - 1));
  s.partition = partition_los(s.contour, s.pose, Vec2::Zero(), k, rng.uniform() < 0.5, conv);
  s.bundles = steering_bundles(s.cfg, s.partition);
  s.r_x = random_psd(rng, s.cfg.n_tx, rng.uniform(0.5, 4.0));
  s.sp.d_o = s.pose.d_o;
  s.sp.sigma_s2 = rng.uniform(1e-11, 1e-9);
  s.sp.t_s = 1.0;
  s.sp.bandwidth = 1e7;
  return s;
}

}  // namespace testutil
