#include "isac/design.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace isac {

void DesignConstraints::validate() const {
  if (!(p_t > 0.0)) throw BadScenario("transmit power must be positive");
  if (!(gamma > 0.0)) throw BadScenario("SINR threshold must be positive");
  if (!(sigma_n2 > 0.0)) throw BadScenario("communication noise power must be positive");
}

int hermitian_param_count(int n) { return n * n; }

namespace {

// Parameter layout of an n x n Hermitian matrix: n diagonal entries first,
// then (re, im) of each upper-triangle entry in row-major pair order.
struct ParamRef {
  int i, j;
  enum Kind { Diag, Re, Im } kind;
};

ParamRef param_ref(int n, int param) {
  if (param < n) return {param, param, ParamRef::Diag};
  int p = (param - n) / 2;
  const auto kind = (param - n) % 2 == 0 ? ParamRef::Re : ParamRef::Im;
  for (int i = 0; i < n; ++i) {
    const int row_pairs = n - 1 - i;
    if (p < row_pairs) return {i, i + 1 + p, kind};
    p -= row_pairs;
  }
  throw SolverFailure("hermitian parameter index out of range");
}

double coverage_residual(const std::vector<SteeringBundle>& bundles, const MatC& r_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& b : bundles) {
    const double v = std::real((b.a_k.adjoint() * r_x * b.a_k)(0));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 2.0 * lo - hi;
}

// PSD clamp: zero out negative eigenvalues (solver slack).
MatC psd_clamp(const MatC& r) {
  Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (r + r.adjoint()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

struct CrbQuadForms {
  MatC g00, g01, g11;  // tr(g.. R_x) gives the Schur-block entries T, G, S0
  double t_scale, s0_scale;
};

CrbQuadForms crb_quad_forms(const ContourPartition& partition,
                            const std::vector<SteeringBundle>& bundles, double p_t) {
  const int n_t = static_cast<int>(bundles.front().a_k.size());
  CrbQuadForms q;
  q.g00 = MatC::Zero(n_t, n_t);
  q.g01 = MatC::Zero(n_t, n_t);
  q.g11 = MatC::Zero(n_t, n_t);
  for (size_t k = 0; k < bundles.size(); ++k) {
    const auto& b = bundles[k];
    const double l = partition.subsections[k].l_k;
    q.g00 += l * (b.z1_k * b.a_k * b.a_k.adjoint() + b.a_dot_k * b.a_dot_k.adjoint());
    q.g01 += 0.5 * l * (b.a_k * b.a_dot_k.adjoint() + b.a_dot_k * b.a_k.adjoint());
    q.g11 += l * b.a_k * b.a_k.adjoint();
  }
  q.t_scale = std::max(p_t * q.g00.real().trace(), 1e-300);
  q.s0_scale = std::max(p_t * q.g11.real().trace(), 1e-300);
  return q;
}

// Schur-block triplets of one Hermitian variable block whose quadratic forms
// against (g00, g01, g11) contribute (scale * coeff) to the 2x2 P entries.
void add_schur_coeffs(PsdBlockExpr& p_block, const CrbQuadForms& q, const MatC& g00,
                      const MatC& g01, const MatC& g11, double scale, int var_base,
                      int n_params) {
  const Eigen::VectorXd c00 = hermitian_quadform_coeffs(g00) * (scale / q.t_scale);
  const Eigen::VectorXd c01 =
      hermitian_quadform_coeffs(g01) * (scale / std::sqrt(q.t_scale * q.s0_scale));
  const Eigen::VectorXd c11 = hermitian_quadform_coeffs(g11) * (scale / q.s0_scale);
  for (int p = 0; p < n_params; ++p) {
    std::vector<SymTriplet> ts;
    if (c00[p] != 0.0) ts.push_back({0, 0, c00[p]});
    if (c01[p] != 0.0) ts.push_back({0, 1, c01[p]});
    if (c11[p] != 0.0) ts.push_back({1, 1, c11[p]});
    if (!ts.empty()) p_block.add_coeff(var_base + p, std::move(ts));
  }
}

double crb_phi_from_t(double t, const SensingParams& sp, int n_rx) {
  const double pref = 2.0 * sp.g() * sp.g() * n_rx * sp.t_s / sp.sigma_s2;
  return 1.0 / (pref * t);
}

std::vector<double> all_sinr(const CommChannel& channel, const MatC& w, double sigma_n2) {
  std::vector<double> out(channel.n_users());
  for (int n = 0; n < channel.n_users(); ++n) out[n] = sinr(channel, w, n, sigma_n2);
  return out;
}

}  // namespace

std::vector<SymTriplet> hermitian_embedding_triplets(int n, int param) {
  const ParamRef r = param_ref(n, param);
  switch (r.kind) {
    case ParamRef::Diag:
      return {{r.i, r.i, 1.0}, {n + r.i, n + r.i, 1.0}};
    case ParamRef::Re:
      return {{r.i, r.j, 1.0}, {n + r.i, n + r.j, 1.0}};
    case ParamRef::Im:
      return {{r.i, n + r.j, -1.0}, {r.j, n + r.i, 1.0}};
  }
  throw SolverFailure("unreachable");
}

Eigen::VectorXd hermitian_quadform_coeffs(const MatC& q) {
  const int n = static_cast<int>(q.rows());
  Eigen::VectorXd c(hermitian_param_count(n));
  for (int p = 0; p < c.size(); ++p) {
    const ParamRef r = param_ref(n, p);
    switch (r.kind) {
      case ParamRef::Diag: c[p] = std::real(q(r.i, r.i)); break;
      case ParamRef::Re: c[p] = 2.0 * std::real(q(r.i, r.j)); break;
      case ParamRef::Im: c[p] = 2.0 * std::imag(q(r.i, r.j)); break;
    }
  }
  return c;
}

MatC hermitian_from_params(int n, const Eigen::VectorXd& params) {
  if (params.size() != hermitian_param_count(n))
    throw SolverFailure("hermitian parameter vector has wrong length");
  MatC m = MatC::Zero(n, n);
  for (int p = 0; p < params.size(); ++p) {
    const ParamRef r = param_ref(n, p);
    switch (r.kind) {
      case ParamRef::Diag: m(r.i, r.i) = params[p]; break;
      case ParamRef::Re:
        m(r.i, r.j) += params[p];
        m(r.j, r.i) += params[p];
        break;
      case ParamRef::Im:
        m(r.i, r.j) += cd(0.0, params[p]);
        m(r.j, r.i) -= cd(0.0, params[p]);
        break;
    }
  }
  return m;
}

std::vector<MatC> SdrProblem::decode_covariances(const Eigen::VectorXd& x) const {
  std::vector<MatC> r(n_c);
  const int nv = hermitian_param_count(n_t);
  for (int n = 0; n < n_c; ++n)
    r[n] = psd_clamp(p_t * hermitian_from_params(n_t, x.segment(n * nv, nv)));
  return r;
}

SdrProblem build_sdr_problem(const CommChannel& channel, const ContourPartition& partition,
                             const std::vector<SteeringBundle>& bundles,
                             const DesignConstraints& cons) {
  cons.validate();
  if (partition.size() < 1 || bundles.size() != static_cast<size_t>(partition.size()))
    throw BadScenario("partition and steering bundles are inconsistent");
  SdrProblem sp;
  sp.n_t = static_cast<int>(channel.h.cols());
  sp.n_c = channel.n_users();
  sp.p_t = cons.p_t;
  const int nv = hermitian_param_count(sp.n_t);
  const int m = sp.n_c * nv + 1;
  const int t_var = sp.n_c * nv;

  ConicProblem& p = sp.conic;
  p.num_vars = m;
  p.objective = Eigen::VectorXd::Zero(m);
  p.objective[t_var] = 1.0;

  // R_n >= 0 via the real embedding; variables carry R_n / P_t.
  for (int n = 0; n < sp.n_c; ++n) {
    PsdBlockExpr blk;
    blk.dim = 2 * sp.n_t;
    blk.f0 = Eigen::MatrixXd::Zero(blk.dim, blk.dim);
    for (int q = 0; q < nv; ++q)
      blk.add_coeff(n * nv + q, hermitian_embedding_triplets(sp.n_t, q));
    p.psd_blocks.push_back(std::move(blk));
  }

  // tr(sum R_n) <= P_t.
  {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
    for (int n = 0; n < sp.n_c; ++n)
      for (int i = 0; i < sp.n_t; ++i) row[n * nv + i] = 1.0;
    p.add_linear_row(row, 1.0);
  }

  // Per-user SINR: sum_i h_n^H R_i h_n - (1 + 1/Gamma) h_n^H R_n h_n <= -sigma_n2.
  for (int n = 0; n < sp.n_c; ++n) {
    const VecC h_n = channel.user_channel(n);
    const Eigen::VectorXd c = hermitian_quadform_coeffs(h_n * h_n.adjoint());
    Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < sp.n_c; ++i) {
      const double f = (i == n ? -1.0 / cons.gamma : 1.0) * cons.p_t / cons.sigma_n2;
      row.segment(i * nv, nv) = f * c;
    }
    p.add_linear_row(row, -1.0);
  }

  // Pairwise 3-dB coverage: a_j^H R_x a_j - 2 a_i^H R_x a_i <= 0 for all i, j.
  if (cons.coverage_enabled) {
    for (size_t i = 0; i < bundles.size(); ++i) {
      const VecC& a_i = bundles[i].a_k;
      for (size_t j = 0; j < bundles.size(); ++j) {
        const VecC& a_j = bundles[j].a_k;
        const MatC q = (a_j * a_j.adjoint() - 2.0 * a_i * a_i.adjoint()) / double(sp.n_t);
        const Eigen::VectorXd c = hermitian_quadform_coeffs(q);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
        for (int n = 0; n < sp.n_c; ++n) row.segment(n * nv, nv) = c;
        p.add_linear_row(row, 0.0);
      }
    }
  }

  // Schur epigraph block [[T - t, G], [G, S0]] >= 0, congruence-scaled.
  const CrbQuadForms q = crb_quad_forms(partition, bundles, cons.p_t);
  sp.t_scale = q.t_scale;
  PsdBlockExpr p_block;
  p_block.dim = 2;
  p_block.f0 = Eigen::MatrixXd::Zero(2, 2);
  for (int n = 0; n < sp.n_c; ++n)
    add_schur_coeffs(p_block, q, q.g00, q.g01, q.g11, cons.p_t, n * nv, nv);
  p_block.add_coeff(t_var, {{0, 0, -1.0}});
  p.psd_blocks.push_back(std::move(p_block));
  return sp;
}

BeamformerSet extract_rank_one(const std::vector<MatC>& r, const CommChannel& channel,
                               double gamma, double sigma_n2, std::uint64_t seed,
                               int max_attempts, const std::vector<SteeringBundle>& bundles,
                               bool coverage_enabled) {
  const int n_c = static_cast<int>(r.size());
  if (n_c != channel.n_users()) throw BadScenario("covariance count does not match users");
  const int n_t = static_cast<int>(r.front().rows());

  double relaxed_power = 0.0;
  std::vector<Eigen::SelfAdjointEigenSolver<MatC>> eig(n_c);
  std::vector<MatC> sqrt_r(n_c);
  for (int n = 0; n < n_c; ++n) {
    relaxed_power += r[n].real().trace();
    eig[n].compute(0.5 * (r[n] + r[n].adjoint()));
    const Eigen::VectorXd ev = eig[n].eigenvalues().cwiseMax(0.0);
    sqrt_r[n] = eig[n].eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                eig[n].eigenvectors().adjoint();
  }

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    MatC u(n_t, n_c);
    if (attempt == 0) {
      // Deterministic first draw: dominant eigenvectors reproduce a tight
      // relaxation exactly.
      for (int n = 0; n < n_c; ++n) u.col(n) = eig[n].eigenvectors().col(n_t - 1);
    } else {
      Rng rng(Rng::substream(seed, static_cast<std::uint64_t>(attempt)));
      for (int n = 0; n < n_c; ++n) {
        VecC v(n_t);
        for (int i = 0; i < n_t; ++i) v[i] = rng.cnormal();
        VecC dir = sqrt_r[n] * v;
        const double nrm = dir.norm();
        if (nrm < 1e-14) { dir = eig[n].eigenvectors().col(n_t - 1); }
        else dir /= nrm;
        u.col(n) = dir;
      }
    }

    // Power rebalance F q = Gamma sigma_n2 1 enforcing SINR_n = Gamma.
    Eigen::MatrixXd f(n_c, n_c);
    for (int n = 0; n < n_c; ++n) {
      const VecC h_n = channel.user_channel(n);
      for (int i = 0; i < n_c; ++i) {
        const double gain = std::norm((h_n.adjoint() * u.col(i))(0));
        f(n, i) = (i == n) ? gain : -gamma * gain;
      }
    }
    const Eigen::VectorXd q =
        f.fullPivLu().solve(Eigen::VectorXd::Constant(n_c, gamma * sigma_n2));
    if (!q.allFinite() || q.minCoeff() <= 0.0) continue;

    BeamformerSet bf;
    bf.w = MatC(n_t, n_c);
    for (int n = 0; n < n_c; ++n) bf.w.col(n) = std::sqrt(q[n]) * u.col(n);
    if (bf.power() > relaxed_power + 1e-9) continue;
    bool sinr_ok = true;
    for (int n = 0; n < n_c; ++n)
      if (std::abs(sinr(channel, bf.w, n, sigma_n2) - gamma) > 1e-6 * gamma) sinr_ok = false;
    if (!sinr_ok) continue;
    if (coverage_enabled &&
        coverage_residual(bundles, bf.r_x()) < -1e-9 * std::max(relaxed_power, 1.0))
      continue;
    return bf;
  }
  throw ExtractionFailed("no coverage-feasible rank-one draw within the attempt budget");
}

DesignResult design_sdr(const CommChannel& channel, const ContourPartition& partition,
                        const std::vector<SteeringBundle>& bundles,
                        const DesignConstraints& cons, const SensingParams& sp,
                        const SolverOptions& opts) {
  const SdrProblem prob = build_sdr_problem(channel, partition, bundles, cons);
  const ConicSolution sol = solve_conic(prob.conic, opts.tol, opts.max_iters);
  if (sol.status == SolveStatus::Infeasible)
    throw Infeasible("SINR/coverage constraint set is unsatisfiable at this power budget");
  if (sol.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("relaxation solve failed: ") + to_string(sol.status));

  const int n_rx = static_cast<int>(bundles.front().b_k.size());
  DesignResult out;
  out.solver_iterations = sol.iterations;
  out.relaxed_crb_phi = crb_phi_from_t(prob.decode_objective(sol.objective), sp, n_rx);

  const std::vector<MatC> r = prob.decode_covariances(sol.x);
  const int n_t = prob.n_t;
  bool rank_one = true;
  MatC w(n_t, prob.n_c);
  for (int n = 0; n < prob.n_c; ++n) {
    Eigen::SelfAdjointEigenSolver<MatC> es(r[n]);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev[n_t - 2] > 1e-6 * ev[n_t - 1]) rank_one = false;
    w.col(n) = std::sqrt(std::max(ev[n_t - 1], 0.0)) * es.eigenvectors().col(n_t - 1);
  }

  bool accepted = false;
  if (rank_one) {
    accepted = true;
    for (int n = 0; n < prob.n_c; ++n)
      if (sinr(channel, w, n, cons.sigma_n2) < cons.gamma * (1.0 - 1e-6)) accepted = false;
    if (accepted && cons.coverage_enabled &&
        coverage_residual(bundles, w * w.adjoint()) < -1e-9 * cons.p_t)
      accepted = false;
  }
  if (accepted) {
    out.beamformers.w = w;
    out.extracted = false;
  } else {
    out.beamformers = extract_rank_one(r, channel, cons.gamma, cons.sigma_n2, opts.seed,
                                       opts.max_attempts, bundles, cons.coverage_enabled);
    out.extracted = true;
  }
  out.sinr = all_sinr(channel, out.beamformers.w, cons.sigma_n2);
  out.crb = crb_et(partition, bundles, out.beamformers.r_x(), sp, /*phi_only=*/true);
  return out;
}

ZfComponents zf_components(const CommChannel& channel) {
  const MatC& h = channel.h;  // N_c x N_t
  const int n_c = static_cast<int>(h.rows());
  const int n_t = static_cast<int>(h.cols());
  if (n_c > n_t) throw RankDeficient("more users than transmit antennas");
  Eigen::JacobiSVD<MatC> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv[n_c - 1] <= 0.0 || sv[0] / sv[n_c - 1] >= 1e10)
    throw RankDeficient("channel matrix is (near) row-rank deficient");
  ZfComponents zf;
  zf.h_pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  zf.p_perp = MatC::Identity(n_t, n_t) - zf.h_pinv * h;
  return zf;
}

ZfProblem build_zf_problem(const ZfComponents& zf, const CommChannel& channel,
                           const std::vector<int>& direction_set,
                           const ContourPartition& partition,
                           const std::vector<SteeringBundle>& bundles,
                           const DesignConstraints& cons) {
  cons.validate();
  const int n_c = channel.n_users();
  const int n_t = static_cast<int>(channel.h.cols());
  if (static_cast<int>(direction_set.size()) != n_c)
    throw BadScenario("direction set must assign one subsection per user");

  ZfProblem zp;
  zp.n_c = n_c;
  zp.basis.resize(n_c);
  for (int n = 0; n < n_c; ++n) {
    const int k = direction_set[n];
    if (k < 0 || k >= partition.size()) throw BadScenario("direction index out of range");
    MatC b(n_t, 2);
    b.col(0) = zf.h_pinv.col(n) / zf.h_pinv.col(n).norm();
    VecC sense = zf.p_perp * bundles[k].a_k;
    const double nrm = sense.norm();
    if (nrm > 1e-9 * bundles[k].a_k.norm()) {
      b.col(1) = sense / nrm;
    } else {
      // Sensing direction lies in the channel row space; fall back to the
      // strongest null-space direction so the lifting stays well-posed.
      Eigen::SelfAdjointEigenSolver<MatC> es(zf.p_perp);
      b.col(1) = es.eigenvectors().col(n_t - 1);
    }
    zp.basis[n] = b;
  }

  const int m = 4 * n_c + 1;
  const int t_var = 4 * n_c;
  ConicProblem& p = zp.conic;
  p.num_vars = m;
  p.objective = Eigen::VectorXd::Zero(m);
  p.objective[t_var] = 1.0;

  // 2x2 Hermitian lifting M_n >= 0 (basis columns are orthonormal, so the
  // diagonals of M_n are watts directly).
  for (int n = 0; n < n_c; ++n) {
    PsdBlockExpr blk;
    blk.dim = 4;
    blk.f0 = Eigen::MatrixXd::Zero(4, 4);
    for (int q = 0; q < 4; ++q) blk.add_coeff(4 * n + q, hermitian_embedding_triplets(2, q));
    p.psd_blocks.push_back(std::move(blk));
  }

  // Power: sum_n tr(M_n) <= P_t.
  {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
    for (int n = 0; n < n_c; ++n) {
      row[4 * n + 0] = 1.0 / cons.p_t;
      row[4 * n + 1] = 1.0 / cons.p_t;
    }
    p.add_linear_row(row, 1.0);
  }

  // SINR: interference is nulled, so |h_n^H b_n0|^2 M_n(0,0) >= Gamma sigma_n2.
  for (int n = 0; n < n_c; ++n) {
    const VecC h_n = channel.user_channel(n);
    const double gain = std::norm((h_n.adjoint() * zp.basis[n].col(0))(0));
    Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
    row[4 * n + 0] = -gain / (cons.gamma * cons.sigma_n2);
    p.add_linear_row(row, -1.0);
  }

  // Coverage rows and the Schur block, projected through each user basis.
  const CrbQuadForms q = crb_quad_forms(partition, bundles, cons.p_t);
  zp.t_scale = q.t_scale;
  if (cons.coverage_enabled) {
    for (size_t i = 0; i < bundles.size(); ++i) {
      for (size_t j = 0; j < bundles.size(); ++j) {
        const MatC cov = bundles[j].a_k * bundles[j].a_k.adjoint() -
                         2.0 * bundles[i].a_k * bundles[i].a_k.adjoint();
        Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
        for (int n = 0; n < n_c; ++n) {
          const MatC proj = zp.basis[n].adjoint() * cov * zp.basis[n] / (cons.p_t * n_t);
          row.segment(4 * n, 4) = hermitian_quadform_coeffs(proj);
        }
        p.add_linear_row(row, 0.0);
      }
    }
  }

  PsdBlockExpr p_block;
  p_block.dim = 2;
  p_block.f0 = Eigen::MatrixXd::Zero(2, 2);
  for (int n = 0; n < n_c; ++n) {
    const MatC g00 = zp.basis[n].adjoint() * q.g00 * zp.basis[n];
    const MatC g01 = zp.basis[n].adjoint() * q.g01 * zp.basis[n];
    const MatC g11 = zp.basis[n].adjoint() * q.g11 * zp.basis[n];
    add_schur_coeffs(p_block, q, g00, g01, g11, 1.0, 4 * n, 4);
  }
  p_block.add_coeff(t_var, {{0, 0, -1.0}});
  p.psd_blocks.push_back(std::move(p_block));
  return zp;
}

BeamformerSet ZfProblem::decode_beamformers(const Eigen::VectorXd& x) const {
  const int n_t = static_cast<int>(basis.front().rows());
  BeamformerSet bf;
  bf.w = MatC(n_t, n_c);
  for (int n = 0; n < n_c; ++n) {
    const MatC m_n = hermitian_from_params(2, x.segment(4 * n, 4));
    const double m00 = std::max(std::real(m_n(0, 0)), 0.0);
    const double m11 = std::max(std::real(m_n(1, 1)), 0.0);
    // Diagonal-preserving rank-one recovery: power and SINR are exact, only
    // the cross term inherits the relaxed phase.
    VecC v(2);
    v[0] = std::sqrt(m00);
    v[1] = std::sqrt(m11) * std::exp(cd(0.0, -std::arg(m_n(0, 1))));
    bf.w.col(n) = basis[n] * v;
  }
  return bf;
}

std::vector<std::vector<int>> enumerate_direction_sets(int k, int n_c) {
  if (k < 1 || n_c < 1) throw BadScenario("direction enumeration needs K >= 1, N_c >= 1");
  std::vector<std::vector<int>> sets;
  std::vector<int> cur(n_c);
  const bool repeat = k < n_c;
  // Lexicographic combinations; repetition is allowed only when K < N_c.
  const auto step = [&](auto&& self, int pos, int start) -> void {
    if (pos == n_c) {
      sets.push_back(cur);
      return;
    }
    for (int v = start; v < k; ++v) {
      cur[pos] = v;
      self(self, pos + 1, repeat ? v : v + 1);
      if (sets.size() > 100000) throw BadScenario("direction-set enumeration exceeds 1e5");
    }
  };
  step(step, 0, 0);
  if (sets.empty()) throw BadScenario("no direction sets (K < N_c without repetition)");
  return sets;
}

DesignResult design_zf(const CommChannel& channel, const ContourPartition& partition,
                       const std::vector<SteeringBundle>& bundles,
                       const DesignConstraints& cons, const SensingParams& sp,
                       const SolverOptions& opts) {
  const ZfComponents zf = zf_components(channel);
  const auto sets = enumerate_direction_sets(partition.size(), channel.n_users());
  const int n_rx = static_cast<int>(bundles.front().b_k.size());

  DesignResult best;
  bool have_best = false;
  bool any_infeasible = false;
  for (const auto& set : sets) {
    const ZfProblem prob = build_zf_problem(zf, channel, set, partition, bundles, cons);
    const ConicSolution sol = solve_conic(prob.conic, opts.tol, opts.max_iters);
    if (sol.status != SolveStatus::Optimal) {
      any_infeasible = true;
      continue;
    }
    BeamformerSet bf = prob.decode_beamformers(sol.x);
    if (bf.power() > cons.p_t + 1e-9) continue;
    bool ok = true;
    for (int n = 0; n < channel.n_users() && ok; ++n)
      if (sinr(channel, bf.w, n, cons.sigma_n2) < cons.gamma * (1.0 - 1e-6)) ok = false;
    if (ok && cons.coverage_enabled &&
        coverage_residual(bundles, bf.r_x()) < -1e-9 * cons.p_t)
      ok = false;
    if (!ok) continue;

    CrbReport crb;
    try {
      crb = crb_et(partition, bundles, bf.r_x(), sp, /*phi_only=*/true);
    } catch (const Error&) {
      continue;
    }
    if (!have_best || crb.crb_phi < best.crb.crb_phi) {
      best.beamformers = std::move(bf);
      best.crb = crb;
      best.relaxed_crb_phi = crb_phi_from_t(sol.objective * prob.t_scale, sp, n_rx);
      best.direction_set = set;
      best.solver_iterations = sol.iterations;
      have_best = true;
    }
  }
  if (!have_best) {
    if (any_infeasible)
      throw AllInfeasible("no direction set admits a feasible zero-forcing design");
    throw AllInfeasible("every direction set failed post-recovery verification");
  }
  best.sinr = all_sinr(channel, best.beamformers.w, cons.sigma_n2);
  return best;
}

BeamformerSet design_isotropic(int n_t, int n_c, double p_t) {
  if (n_c < 1 || n_c > n_t) throw BadScenario("need 1 <= N_c <= N_t");
  BeamformerSet bf;
  bf.w = MatC::Zero(n_t, n_c);
  for (int n = 0; n < n_c; ++n) bf.w(n, n) = std::sqrt(p_t / n_t);
  return bf;
}

}  // namespace isac
