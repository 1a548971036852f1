#include "isac/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace isac {

void PsdBlockExpr::add_coeff(int var, std::vector<SymTriplet> triplets) {
  vars.push_back(var);
  coeff.push_back(std::move(triplets));
}

void ConicProblem::add_linear_row(const Eigen::VectorXd& a, double rhs) {
  const int rows = static_cast<int>(lin_a.rows());
  lin_a.conservativeResize(rows + 1, num_vars);
  lin_a.row(rows) = a.transpose();
  lin_rhs.conservativeResize(rows + 1);
  lin_rhs[rows] = rhs;
}

std::string ConicProblem::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "vars " << num_vars << "\nobjective(maximize)";
  for (int i = 0; i < num_vars; ++i)
    if (objective[i] != 0.0) os << " " << i << ":" << objective[i];
  os << "\n";
  for (size_t b = 0; b < psd_blocks.size(); ++b) {
    const auto& blk = psd_blocks[b];
    os << "psd_block " << b << " dim " << blk.dim << "\n f0";
    for (int r = 0; r < blk.dim; ++r)
      for (int c = r; c < blk.dim; ++c)
        if (blk.f0(r, c) != 0.0) os << " (" << r << "," << c << ")=" << blk.f0(r, c);
    os << "\n";
    for (size_t v = 0; v < blk.vars.size(); ++v) {
      os << " x" << blk.vars[v];
      for (const auto& t : blk.coeff[v])
        os << " (" << t.row << "," << t.col << ")=" << t.value;
      os << "\n";
    }
  }
  for (int r = 0; r < lin_a.rows(); ++r) {
    os << "lin_row " << r << " rhs " << lin_rhs[r];
    for (int i = 0; i < num_vars; ++i)
      if (lin_a(r, i) != 0.0) os << " " << i << ":" << lin_a(r, i);
    os << "\n";
  }
  return os.str();
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Dense symmetric matrix built from sparse triplets, scaled.
void add_triplets(Mat& m, const std::vector<SymTriplet>& ts, double scale) {
  for (const auto& t : ts) {
    m(t.row, t.col) += scale * t.value;
    if (t.row != t.col) m(t.col, t.row) += scale * t.value;
  }
}

double dot_triplets(const Mat& m, const std::vector<SymTriplet>& ts) {
  // tr(F^T M) for symmetric F given by triplets; equals tr(F M) when M is
  // used in a symmetrized context.
  double acc = 0.0;
  for (const auto& t : ts) {
    acc += t.value * m(t.col, t.row);
    if (t.row != t.col) acc += t.value * m(t.row, t.col);
  }
  return acc;
}

// Largest alpha in (0, 1] with S + alpha * dS > 0 (0.98 boundary fraction).
double max_step_dense(const Eigen::LLT<Mat>& llt_s, const Mat& ds) {
  const Mat l = llt_s.matrixL();
  Mat w = l.triangularView<Eigen::Lower>().solve(ds);
  w = l.triangularView<Eigen::Lower>().solve(w.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min >= 0.0) return 1.0;
  return std::min(1.0, -0.98 / lambda_min);
}

struct BlockState {
  Mat s, z;
  Eigen::LLT<Mat> llt_s;
  Mat s_inv;
};

}  // namespace

ConicSolution solve_conic(const ConicProblem& p, double tol, int max_iters) {
  const int m = p.num_vars;
  if (m <= 0) throw SolverFailure("conic problem has no variables");
  const int n_lin = static_cast<int>(p.lin_a.rows());
  const int n_blocks = static_cast<int>(p.psd_blocks.size());
  const Vec c = -p.objective;  // minimize form

  // Problem scale estimates for the stopping / Farkas tests.
  double f0_scale = 1.0;
  for (const auto& blk : p.psd_blocks)
    f0_scale = std::max(f0_scale, blk.f0.cwiseAbs().maxCoeff());
  if (n_lin > 0) f0_scale = std::max(f0_scale, p.lin_rhs.cwiseAbs().maxCoeff());
  const double c_scale = std::max(1.0, c.cwiseAbs().maxCoeff());

  int cone_dim = n_lin;
  for (const auto& blk : p.psd_blocks) cone_dim += blk.dim;
  if (cone_dim == 0) throw SolverFailure("conic problem has an empty cone");

  Vec x = Vec::Zero(m);
  std::vector<BlockState> blocks(n_blocks);
  const double init = 10.0 * std::max(1.0, f0_scale);
  for (int b = 0; b < n_blocks; ++b) {
    const int n = p.psd_blocks[b].dim;
    blocks[b].s = init * Mat::Identity(n, n);
    blocks[b].z = std::max(1.0, c_scale) * Mat::Identity(n, n);
  }
  Vec s_lin = Vec::Constant(n_lin, init);
  Vec z_lin = Vec::Constant(n_lin, std::max(1.0, c_scale));

  ConicSolution sol;
  sol.x = x;

  std::vector<Mat> rp(n_blocks);       // F(x) - S per block
  Vec rp_lin(n_lin);                   // (rhs - A x) - s_lin
  std::vector<std::vector<Mat>> zfs;   // per block, per var: Z * F_i * S^-1
  zfs.resize(n_blocks);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Residuals and factorizations.
    double primal_res = 0.0;
    for (int b = 0; b < n_blocks; ++b) {
      const auto& blk = p.psd_blocks[b];
      Mat f = blk.f0;
      for (size_t v = 0; v < blk.vars.size(); ++v)
        add_triplets(f, blk.coeff[v], x[blk.vars[v]]);
      rp[b] = f - blocks[b].s;
      primal_res = std::max(primal_res, rp[b].cwiseAbs().maxCoeff());
      blocks[b].llt_s.compute(blocks[b].s);
      if (blocks[b].llt_s.info() != Eigen::Success) {
        sol.status = SolveStatus::NumericalFailure;
        return sol;
      }
      blocks[b].s_inv = blocks[b].llt_s.solve(Mat::Identity(blk.dim, blk.dim));
    }
    if (n_lin > 0) {
      rp_lin = (p.lin_rhs - p.lin_a * x) - s_lin;
      primal_res = std::max(primal_res, rp_lin.cwiseAbs().maxCoeff());
    }

    // Dual residual r_d = c - A*(Z).
    Vec adj_z = Vec::Zero(m);
    for (int b = 0; b < n_blocks; ++b) {
      const auto& blk = p.psd_blocks[b];
      for (size_t v = 0; v < blk.vars.size(); ++v)
        adj_z[blk.vars[v]] += dot_triplets(blocks[b].z, blk.coeff[v]);
    }
    if (n_lin > 0) adj_z -= p.lin_a.transpose() * z_lin;
    const Vec rd = c - adj_z;

    double comp = z_lin.dot(s_lin);
    double trace_z = z_lin.sum();
    for (int b = 0; b < n_blocks; ++b) {
      comp += (blocks[b].z.array() * blocks[b].s.array()).sum();
      trace_z += blocks[b].z.trace();
    }
    const double mu = comp / cone_dim;

    const double obj = c.dot(x);
    sol.x = x;
    sol.objective = -obj;  // back to the maximize convention
    sol.iterations = iter;
    sol.primal_residual = primal_res / (1.0 + f0_scale);
    sol.dual_residual = rd.cwiseAbs().maxCoeff() / (1.0 + c_scale);
    sol.duality_gap = comp / (1.0 + std::abs(obj));

    if (sol.primal_residual <= tol && sol.dual_residual <= tol && sol.duality_gap <= tol) {
      sol.status = SolveStatus::Optimal;
      return sol;
    }

    // Farkas test: a normalized dual ray with A*(Z) ~ 0 and tr(F0 Z) < 0
    // certifies primal infeasibility.
    if (trace_z > 1e4 * std::max(1.0, c_scale)) {
      double f0_z = z_lin.dot(p.lin_rhs);
      for (int b = 0; b < n_blocks; ++b)
        f0_z += (blocks[b].z.array() * p.psd_blocks[b].f0.array()).sum();
      const double ray_viol = adj_z.cwiseAbs().maxCoeff() / trace_z;
      const double ray_val = f0_z / (trace_z * std::max(f0_scale, 1.0));
      if (ray_viol < 1e-6 && ray_val < -1e-9) {
        sol.status = SolveStatus::Infeasible;
        return sol;
      }
    }

    // Schur complement M_ij = tr(F_i Z F_j S^-1), symmetrized.
    Mat schur = Mat::Zero(m, m);
    for (int b = 0; b < n_blocks; ++b) {
      const auto& blk = p.psd_blocks[b];
      const int nv = static_cast<int>(blk.vars.size());
      auto& cache = zfs[b];
      cache.assign(nv, Mat());
      for (int v = 0; v < nv; ++v) {
        Mat zf = Mat::Zero(blk.dim, blk.dim);
        for (const auto& t : blk.coeff[v]) {
          zf.noalias() += t.value * blocks[b].z.col(t.row) * blocks[b].s_inv.row(t.col);
          if (t.row != t.col)
            zf.noalias() += t.value * blocks[b].z.col(t.col) * blocks[b].s_inv.row(t.row);
        }
        cache[v] = std::move(zf);
      }
      for (int v = 0; v < nv; ++v) {
        const int i = blk.vars[v];
        for (int w = v; w < nv; ++w) {
          const int j = blk.vars[w];
          const double mij = dot_triplets(cache[v], blk.coeff[w]);
          schur(i, j) += mij;
          if (i != j) schur(j, i) += mij;
        }
      }
    }
    if (n_lin > 0) {
      const Vec weights = z_lin.array() / s_lin.array();
      for (int r = 0; r < n_lin; ++r)
        schur.selfadjointView<Eigen::Lower>().rankUpdate(p.lin_a.row(r).transpose(), weights[r]);
      const Mat full = schur.selfadjointView<Eigen::Lower>();
      schur = full;
    }
    schur = 0.5 * (schur + schur.transpose()).eval();

    Eigen::LLT<Mat> llt_m(schur);
    if (llt_m.info() != Eigen::Success) {
      const double jitter = 1e-12 * schur.trace() / m + 1e-300;
      schur.diagonal().array() += jitter;
      llt_m.compute(schur);
      if (llt_m.info() != Eigen::Success) {
        sol.status = SolveStatus::NumericalFailure;
        return sol;
      }
    }

    // Common rhs pieces: trace(F_i S^-1) and trace(F_i Z Rp S^-1).
    Vec tr_fi_sinv = Vec::Zero(m);
    Vec tr_fi_zrpsinv = Vec::Zero(m);
    for (int b = 0; b < n_blocks; ++b) {
      const auto& blk = p.psd_blocks[b];
      const Mat q = blocks[b].z * rp[b] * blocks[b].s_inv;
      for (size_t v = 0; v < blk.vars.size(); ++v) {
        tr_fi_sinv[blk.vars[v]] += dot_triplets(blocks[b].s_inv, blk.coeff[v]);
        tr_fi_zrpsinv[blk.vars[v]] += dot_triplets(q, blk.coeff[v]);
      }
    }
    if (n_lin > 0) {
      const Vec sinv_lin = s_lin.cwiseInverse();
      const Vec q_lin = z_lin.array() * rp_lin.array() / s_lin.array();
      tr_fi_sinv -= p.lin_a.transpose() * sinv_lin;
      tr_fi_zrpsinv -= p.lin_a.transpose() * q_lin;
    }

    // One Newton solve for a given centering sigma and corrector term.
    std::vector<Mat> dz_corr(n_blocks);
    Vec dz_corr_lin = Vec::Zero(n_lin);
    const auto newton = [&](double sigma, bool with_corrector, std::vector<Mat>& ds_out,
                            std::vector<Mat>& dz_out, Vec& ds_lin_out, Vec& dz_lin_out,
                            Vec& dx_out) {
      Vec rhs = sigma * mu * tr_fi_sinv - c - tr_fi_zrpsinv;
      if (with_corrector) {
        for (int b = 0; b < n_blocks; ++b) {
          const auto& blk = p.psd_blocks[b];
          const Mat q = dz_corr[b] * blocks[b].s_inv;
          for (size_t v = 0; v < blk.vars.size(); ++v)
            rhs[blk.vars[v]] -= dot_triplets(q, blk.coeff[v]);
        }
        if (n_lin > 0) {
          const Vec q_lin = dz_corr_lin.array() / s_lin.array();
          rhs += p.lin_a.transpose() * q_lin;
        }
      }
      dx_out = llt_m.solve(rhs);
      ds_out.resize(n_blocks);
      dz_out.resize(n_blocks);
      for (int b = 0; b < n_blocks; ++b) {
        const auto& blk = p.psd_blocks[b];
        Mat ds = rp[b];
        for (size_t v = 0; v < blk.vars.size(); ++v)
          add_triplets(ds, blk.coeff[v], dx_out[blk.vars[v]]);
        Mat dz = sigma * mu * blocks[b].s_inv - blocks[b].z -
                 blocks[b].z * ds * blocks[b].s_inv;
        if (with_corrector) dz -= dz_corr[b] * blocks[b].s_inv;
        dz = 0.5 * (dz + dz.transpose()).eval();
        ds_out[b] = std::move(ds);
        dz_out[b] = std::move(dz);
      }
      if (n_lin > 0) {
        ds_lin_out = rp_lin - p.lin_a * dx_out;
        Vec numer = Vec::Constant(n_lin, sigma * mu);
        if (with_corrector) numer -= dz_corr_lin;
        dz_lin_out = numer.cwiseQuotient(s_lin) - z_lin -
                     (z_lin.array() * ds_lin_out.array() / s_lin.array()).matrix();
      } else {
        ds_lin_out.resize(0);
        dz_lin_out.resize(0);
      }
    };

    const auto step_lengths = [&](const std::vector<Mat>& ds, const std::vector<Mat>& dz,
                                  const Vec& ds_l, const Vec& dz_l) {
      double ap = 1.0, ad = 1.0;
      for (int b = 0; b < n_blocks; ++b) {
        ap = std::min(ap, max_step_dense(blocks[b].llt_s, ds[b]));
        Eigen::LLT<Mat> llt_z(blocks[b].z);
        ad = std::min(ad, max_step_dense(llt_z, dz[b]));
      }
      for (int r = 0; r < n_lin; ++r) {
        if (ds_l[r] < 0.0) ap = std::min(ap, -0.98 * s_lin[r] / ds_l[r]);
        if (dz_l[r] < 0.0) ad = std::min(ad, -0.98 * z_lin[r] / dz_l[r]);
      }
      return std::pair{ap, ad};
    };

    // Predictor (affine scaling).
    std::vector<Mat> ds_aff, dz_aff;
    Vec ds_aff_lin, dz_aff_lin, dx_aff;
    newton(0.0, false, ds_aff, dz_aff, ds_aff_lin, dz_aff_lin, dx_aff);
    auto [ap_aff, ad_aff] = step_lengths(ds_aff, dz_aff, ds_aff_lin, dz_aff_lin);

    double comp_aff = 0.0;
    for (int b = 0; b < n_blocks; ++b)
      comp_aff += ((blocks[b].z + ad_aff * dz_aff[b]).array() *
                   (blocks[b].s + ap_aff * ds_aff[b]).array())
                      .sum();
    if (n_lin > 0)
      comp_aff += (z_lin + ad_aff * dz_aff_lin).dot(s_lin + ap_aff * ds_aff_lin);
    const double mu_aff = std::max(comp_aff / cone_dim, 0.0);
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // Corrector.
    for (int b = 0; b < n_blocks; ++b) dz_corr[b] = dz_aff[b] * ds_aff[b];
    if (n_lin > 0) dz_corr_lin = dz_aff_lin.array() * ds_aff_lin.array();
    std::vector<Mat> ds, dz;
    Vec ds_lin, dz_lin, dx;
    newton(sigma, true, ds, dz, ds_lin, dz_lin, dx);
    auto [ap, ad] = step_lengths(ds, dz, ds_lin, dz_lin);

    if (ap < 1e-10 && ad < 1e-10) {
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }

    x += ap * dx;
    for (int b = 0; b < n_blocks; ++b) {
      blocks[b].s += ap * ds[b];
      blocks[b].s = 0.5 * (blocks[b].s + blocks[b].s.transpose()).eval();
      blocks[b].z += ad * dz[b];
      blocks[b].z = 0.5 * (blocks[b].z + blocks[b].z.transpose()).eval();
    }
    if (n_lin > 0) {
      s_lin += ap * ds_lin;
      z_lin += ad * dz_lin;
    }
  }

  sol.status = SolveStatus::MaxIterations;
  return sol;
}

}  // namespace isac
