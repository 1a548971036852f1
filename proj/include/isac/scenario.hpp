#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isac/array.hpp"
#include "isac/contour.hpp"
#include "isac/crb.hpp"
#include "isac/design.hpp"
#include "isac/sim.hpp"

namespace isac {

/// Full experiment description. Keys carry explicit units (dBW/dBm/deg/m) in
/// the JSON form; the accessors below convert to SI/linear quantities.
struct Scenario {
  // array
  ArrayConfig array;

  // users / channel
  std::vector<double> user_dirs_deg;
  std::vector<double> path_loss_db;
  int n_paths = 6;
  double los_fraction = 0.9;
  std::uint64_t channel_seed = 1;

  // contour: preset name, or explicit coefficients when preset is empty
  std::string contour_preset = "vehicle";
  Eigen::VectorXd contour_m, contour_n;

  // pose
  double d_o_m = 27.0;
  double phi_o_deg = 0.0;
  double varphi_deg = 0.0;

  // partition
  int k_subsections = 8;
  bool normalize_lengths = true;

  // sensing
  double sigma_s2_dbm = -80.0;
  double bandwidth_hz = 1e7;
  double t_s_s = 1.0;

  // communication constraints
  double p_t_dbw = 0.0;
  double gamma_db = 10.0;
  double sigma_n2_dbm = -80.0;
  bool coverage_enabled = true;

  // sweep policy: hold gamma_s = N_r P_t / (d_o^4 sigma_s^2) across a
  // distance sweep by scaling the sensing noise with (d_ref/d)^4
  bool radar_snr_hold = false;

  // solver
  double solver_tol = 1e-8;
  int solver_max_iters = 200;
  int extraction_max_attempts = 100;
  std::uint64_t extraction_seed = 1;

  // Monte-Carlo estimator settings
  int n_symbols = 64;
  SymbolKind symbol_kind = SymbolKind::Gaussian;
  double grid_step_deg = 0.1;

  int n_users() const { return static_cast<int>(user_dirs_deg.size()); }

  void validate() const;  // throws BadScenario

  TfsContour contour() const;
  TargetPose pose() const;
  /// Sensing params at range d (defaults to d_o_m); applies radar_snr_hold.
  SensingParams sensing(std::optional<double> d_o = std::nullopt) const;
  DesignConstraints constraints() const;
};

double dbw_to_watt(double dbw);
double dbm_to_watt(double dbm);
double db_to_linear(double db);

/// The built-in default scenario (16x16 array, 4 users, vehicle contour).
Scenario default_scenario();

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

/// Everything derived from a scenario that experiments consume.
struct ScenarioRealization {
  TfsContour contour;
  TargetPose pose;
  ContourPartition partition;
  std::vector<SteeringBundle> bundles;
  SensingParams sensing;
  CommChannel channel;
  DesignConstraints cons;
};

ScenarioRealization realize(const Scenario& s, std::optional<double> d_o = std::nullopt);

}  // namespace isac
