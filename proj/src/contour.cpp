#include "isac/contour.hpp"

#include <cmath>
#include <numbers>

namespace isac {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double u) {
  u = std::fmod(u, kTwoPi);
  if (u < 0.0) u += kTwoPi;
  return u;
}
}  // namespace

TfsContour::TfsContour(Eigen::VectorXd m_in, Eigen::VectorXd n_in)
    : m(std::move(m_in)), n(std::move(n_in)) {
  if (m.size() != n.size() || m.size() == 0)
    throw BadScenario("TFS coefficient vectors m and n must have equal, positive length");
  if (m[0] <= 0.0 || n[0] <= 0.0)
    throw BadScenario("first-harmonic coefficients must satisfy a_1 > 0 and b_1 > 0");
}

TfsContour contour_preset(const std::string& name) {
  if (name == "vehicle") {
    Eigen::VectorXd m(8), n(8);
    m << 2.05, -0.002, 0.5, 0, 0.056, 0.001, -0.125, 0.003;
    n << 1.24, -0.001, 0.335, -0.001, 0.124, -0.001, 0.018, 0;
    return {m, n};
  }
  if (name == "uav") {
    Eigen::VectorXd m(9), n(9);
    m << 0.797, 0, -0.153, 0, -0.272, 0, -0.12, 0, 0.045;
    n << 0.797, 0, 0.153, 0, -0.272, 0, 0.12, 0, 0.045;
    return {m, n};
  }
  throw BadScenario("unknown contour preset: " + name);
}

TargetPose::TargetPose(double d_o_in, double phi_o_in, double varphi_in)
    : d_o(d_o_in), phi_o(phi_o_in), varphi(varphi_in) {
  if (d_o <= 0.0) throw BadScenario("target range d_o must be positive");
}

Vec2 contour_point(const TfsContour& c, double u) {
  double x = 0.0, y = 0.0;
  for (int q = 1; q <= c.harmonics(); ++q) {
    x += c.m[q - 1] * std::cos(q * u);
    y += c.n[q - 1] * std::sin(q * u);
  }
  return {x, y};
}

Vec2 contour_tangent(const TfsContour& c, double u) {
  double x = 0.0, y = 0.0;
  for (int q = 1; q <= c.harmonics(); ++q) {
    x += -q * c.m[q - 1] * std::sin(q * u);
    y += q * c.n[q - 1] * std::cos(q * u);
  }
  return {x, y};
}

Vec2 global_point(const TfsContour& c, const TargetPose& pose, double u) {
  return pose.center() + pose.spin() * contour_point(c, u);
}

double contour_intermediate(const TfsContour& c, const TargetPose& pose, double u_k,
                            XConvention conv) {
  const int q_max = c.harmonics();
  double num = 0.0, snm = 0.0;
  for (int q = 1; q <= q_max; ++q) {
    num += std::cos(q * u_k) * c.m[q - 1];
    snm += std::sin(q * u_k) * c.n[q - 1];
  }
  if (conv == XConvention::Printed)
    return -num * std::cos(pose.phi_o + pose.varphi) + snm * std::sin(pose.phi_o + pose.varphi);
  return -num * std::sin(pose.phi_o - pose.varphi) + snm * std::cos(pose.phi_o - pose.varphi);
}

double ContourPartition::total_length() const {
  double s = 0.0;
  for (const auto& sub : subsections) s += sub.l_k;
  return s;
}

namespace {

// Visibility of the element at local direction u from the BS: the outward
// normal (tangent rotated by -90 deg, anti-clockwise cycling assumed) must
// have positive inner product with the direction toward the BS.
bool visible(const TfsContour& c, const TargetPose& pose, const Vec2& bs, double u) {
  const Eigen::Matrix2d v = pose.spin();
  const double h = 1e-6;
  // Tangent by central differences in the global frame.
  const Vec2 t = (v * (contour_point(c, u + h) - contour_point(c, u - h))) / (2.0 * h);
  const Vec2 outward{t.y(), -t.x()};
  const Vec2 p = pose.center() + v * contour_point(c, u);
  const Vec2 to_bs = bs - p;
  return outward.dot(to_bs) > 0.0;
}

double bisect_edge(const TfsContour& c, const TargetPose& pose, const Vec2& bs,
                   double u_vis, double u_hid) {
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (u_vis + u_hid);
    if (visible(c, pose, bs, mid))
      u_vis = mid;
    else
      u_hid = mid;
  }
  return u_vis;
}

}  // namespace

std::pair<double, double> los_interval(const TfsContour& c, const TargetPose& pose,
                                       const Vec2& bs_position) {
  constexpr int n_samples = 4096;
  std::vector<bool> vis(n_samples);
  int n_visible = 0;
  for (int i = 0; i < n_samples; ++i) {
    vis[i] = visible(c, pose, bs_position, kTwoPi * i / n_samples);
    n_visible += vis[i];
  }
  if (n_visible == 0) throw EmptyLoS("no contour element has line of sight to the BS");
  if (n_visible == n_samples)
    throw EmptyLoS("BS appears to lie inside the contour (everything visible)");

  // Largest contiguous visible run, with wraparound.
  int best_start = -1, best_len = 0;
  int i = 0;
  while (i < n_samples && vis[i]) ++i;  // align to a hidden sample
  const int offset = i % n_samples;
  int run_start = -1;
  for (int j = 0; j <= n_samples; ++j) {
    const int idx = (offset + j) % n_samples;
    if (j < n_samples && vis[idx]) {
      if (run_start < 0) run_start = j;
    } else if (run_start >= 0) {
      const int len = j - run_start;
      if (len > best_len) {
        best_len = len;
        best_start = (offset + run_start) % n_samples;
      }
      run_start = -1;
    }
  }

  const double du = kTwoPi / n_samples;
  double lo = best_start * du;
  double hi = (best_start + best_len - 1) * du;
  // Refine both edges against the adjacent hidden samples.
  lo = wrap_2pi(bisect_edge(c, pose, bs_position, lo, lo - du));
  double hi_ref = bisect_edge(c, pose, bs_position, hi, hi + du);
  if (hi_ref < lo) hi_ref += kTwoPi;
  return {lo, hi_ref};
}

ContourPartition partition_los(const TfsContour& c, const TargetPose& pose,
                               const Vec2& bs_position, int K, bool normalize,
                               XConvention conv) {
  if (K < 1) throw BadScenario("partition requires K >= 1");
  auto [u_lower, u_upper] = los_interval(c, pose, bs_position);

  ContourPartition part;
  part.u_lower = u_lower;
  part.u_upper = u_upper;
  const double delta_u = (u_upper - u_lower) / K;
  const int q_max = c.harmonics();
  const Eigen::Matrix2d v = pose.spin();
  const Vec2 p_o = pose.center();

  for (int k = 0; k < K; ++k) {
    SubsectionGeometry sub;
    const double a = u_lower + k * delta_u;
    const double b = a + delta_u;
    sub.u_k = 0.5 * (a + b);
    sub.rho_k = contour_point(c, sub.u_k);
    sub.p_k = p_o + v * sub.rho_k;
    sub.d_k = sub.p_k.norm();
    sub.phi_k = std::atan2(sub.p_k.y(), sub.p_k.x());
    // Composite trapezoid on |d rho/du| with 64 panels per bin.
    constexpr int panels = 64;
    double len = 0.0;
    double prev = contour_tangent(c, a).norm();
    for (int j = 1; j <= panels; ++j) {
      const double cur = contour_tangent(c, a + delta_u * j / panels).norm();
      len += 0.5 * (prev + cur);
      prev = cur;
    }
    sub.l_k = len * delta_u / panels;
    sub.x_k = contour_intermediate(c, pose, sub.u_k, conv);
    sub.nu_k.resize(q_max);
    sub.sigma_k.resize(q_max);
    for (int q = 1; q <= q_max; ++q) {
      sub.nu_k[q - 1] = std::cos(q * sub.u_k);
      sub.sigma_k[q - 1] = std::sin(q * sub.u_k);
    }
    part.subsections.push_back(std::move(sub));
  }

  if (normalize) {
    const double total = part.total_length();
    if (total <= 0.0) throw EmptyLoS("LoS contour has zero arc length");
    for (auto& sub : part.subsections) sub.l_k /= total;
  }
  return part;
}

}  // namespace isac
