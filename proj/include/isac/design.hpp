#pragma once

#include <vector>

#include "isac/array.hpp"
#include "isac/conic.hpp"
#include "isac/contour.hpp"
#include "isac/crb.hpp"
#include "isac/rng.hpp"

namespace isac {

struct DesignConstraints {
  double p_t;       // total transmit power [W]
  double gamma;     // per-user SINR threshold, linear
  double sigma_n2;  // communication noise power [W]
  bool coverage_enabled = true;

  void validate() const;
};

/// Per-user transmit beamformers; column n of w is w_n.
struct BeamformerSet {
  MatC w;  // N_t x N_c

  VecC w_n(int n) const { return w.col(n); }
  MatC r_n(int n) const { return w.col(n) * w.col(n).adjoint(); }
  MatC r_x() const { return w * w.adjoint(); }
  double power() const { return w.squaredNorm(); }
};

/// Hermitian-variable bookkeeping shared by the problem builders: an N x N
/// Hermitian matrix is carried as N^2 reals (N diagonal entries, then re/im of
/// the upper triangle in row-major pair order), and enters PSD blocks through
/// its 2N x 2N real symmetric embedding.
int hermitian_param_count(int n);
std::vector<SymTriplet> hermitian_embedding_triplets(int n, int param);
Eigen::VectorXd hermitian_quadform_coeffs(const MatC& q);
MatC hermitian_from_params(int n, const Eigen::VectorXd& params);

/// SDR problem (one Hermitian covariance per user + the CRB epigraph scalar)
/// together with the scaling needed to decode a solution.
struct SdrProblem {
  ConicProblem conic;
  int n_t = 0;
  int n_c = 0;
  double p_t = 0.0;     // covariance variables are normalized by p_t
  double t_scale = 0.0; // epigraph variable is normalized by t_scale

  int t_var() const { return n_c * n_t * n_t; }
  std::vector<MatC> decode_covariances(const Eigen::VectorXd& x) const;
  double decode_objective(double scaled) const { return scaled * t_scale; }
};

/// Relaxed direction-CRB minimization: maximize the Schur-complement epigraph
/// t subject to power, per-user SINR, pairwise 3-dB coverage rows and
/// R_n >= 0.
SdrProblem build_sdr_problem(const CommChannel& channel, const ContourPartition& partition,
                             const std::vector<SteeringBundle>& bundles,
                             const DesignConstraints& cons);

/// Rank-one beamformer extraction from relaxed covariances: draw directions in
/// span(R_n) (first attempt uses the dominant eigenvectors, later attempts
/// seeded Gaussian draws), rebalance powers so every SINR equals gamma
/// exactly, and redraw until the coverage constraint holds.
BeamformerSet extract_rank_one(const std::vector<MatC>& r, const CommChannel& channel,
                               double gamma, double sigma_n2, std::uint64_t seed,
                               int max_attempts, const std::vector<SteeringBundle>& bundles,
                               bool coverage_enabled);

struct ZfComponents {
  MatC h_pinv;   // N_t x N_c, columns h_n^dagger
  MatC p_perp;   // N_t x N_t projector onto null(H)
};

/// Channel pseudoinverse and null-space projector; throws RankDeficient when
/// the channel loses row rank (condition number >= 1e10).
ZfComponents zf_components(const CommChannel& channel);

/// ZF problem over one 2x2 Hermitian lifting M_n per user (coefficients of
/// w_n on the basis [h_n^dagger, P_perp a_{k_n}], normalized columns) + the
/// epigraph scalar.
struct ZfProblem {
  ConicProblem conic;
  int n_c = 0;
  double t_scale = 0.0;
  std::vector<MatC> basis;  // per-user N_t x 2 orthonormalized basis

  int t_var() const { return 4 * n_c; }
  /// Rank-one coefficient recovery preserving both diagonals of M_n.
  BeamformerSet decode_beamformers(const Eigen::VectorXd& x) const;
};

ZfProblem build_zf_problem(const ZfComponents& zf, const CommChannel& channel,
                           const std::vector<int>& direction_set,
                           const ContourPartition& partition,
                           const std::vector<SteeringBundle>& bundles,
                           const DesignConstraints& cons);

struct DesignResult {
  BeamformerSet beamformers;
  CrbReport crb;                    // achieved by the returned beamformers
  double relaxed_crb_phi = 0.0;     // bound from the relaxed objective
  std::vector<double> sinr;         // achieved per-user SINR
  std::vector<int> direction_set;   // ZF only: chosen subsection indices
  bool extracted = false;           // SDR only: rank-one extraction was needed
  int solver_iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 200;
  std::uint64_t seed = 1;
  int max_attempts = 100;
};

/// P3 pipeline: solve the relaxation, accept it directly when every R_n is
/// rank-one (second eigenvalue <= 1e-6 of the largest) and feasible as-is,
/// otherwise extract rank-one beamformers.
DesignResult design_sdr(const CommChannel& channel, const ContourPartition& partition,
                        const std::vector<SteeringBundle>& bundles,
                        const DesignConstraints& cons, const SensingParams& sp,
                        const SolverOptions& opts = {});

/// P5 pipeline: enumerate C(K, N_c) direction sets (multisets when K < N_c),
/// solve each lifted problem, and keep the feasible set with the smallest
/// achieved crb_phi (first in enumeration order on ties).
DesignResult design_zf(const CommChannel& channel, const ContourPartition& partition,
                       const std::vector<SteeringBundle>& bundles,
                       const DesignConstraints& cons, const SensingParams& sp,
                       const SolverOptions& opts = {});

/// Uniform power on the first N_c transmit elements; CRB comparison baseline
/// (SINR feasibility reported by callers, not enforced here).
BeamformerSet design_isotropic(int n_t, int n_c, double p_t);

/// Direction-set enumeration used by design_zf, exposed for tests: sorted
/// index combinations in lexicographic order (with repetition when K < N_c).
/// Throws BadScenario above the 1e5-set guard.
std::vector<std::vector<int>> enumerate_direction_sets(int k, int n_c);

}  // namespace isac
