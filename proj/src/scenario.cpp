#include "isac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace isac {

namespace {

using json = nlohmann::ordered_json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

Eigen::VectorXd to_vector(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

json from_vector(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

double dbw_to_watt(double dbw) { return std::pow(10.0, dbw / 10.0); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void Scenario::validate() const {
  if (array.n_tx < 1 || array.n_rx < 1) throw BadScenario("antenna counts must be positive");
  if (!(array.spacing > 0.0)) throw BadScenario("element spacing must be positive");
  if (user_dirs_deg.empty()) throw BadScenario("at least one user is required");
  if (path_loss_db.size() != user_dirs_deg.size())
    throw BadScenario("one path loss per user is required");
  if (n_users() > array.n_tx || array.n_tx > array.n_rx)
    throw BadScenario("need N_c <= N_t <= N_r");
  for (double d : user_dirs_deg)
    if (!(d > -90.0 && d < 90.0)) throw BadScenario("user directions must be in (-90, 90) deg");
  if (n_paths < 1) throw BadScenario("need at least one channel path");
  if (los_fraction < 0.0 || los_fraction > 1.0)
    throw BadScenario("los_fraction must be in [0, 1]");
  contour();  // validates coefficients
  if (!(d_o_m > 0.0)) throw BadScenario("target range must be positive");
  if (!(phi_o_deg > -90.0 && phi_o_deg < 90.0))
    throw BadScenario("target direction must be in (-90, 90) deg");
  if (k_subsections < 1) throw BadScenario("need at least one subsection");
  if (!(bandwidth_hz > 0.0) || !(t_s_s > 0.0))
    throw BadScenario("bandwidth and observation period must be positive");
  if (!(solver_tol > 0.0) || solver_max_iters < 1 || extraction_max_attempts < 1)
    throw BadScenario("solver settings must be positive");
  if (n_symbols < 1 || !(grid_step_deg > 0.0))
    throw BadScenario("estimator settings must be positive");
  constraints().validate();
}

TfsContour Scenario::contour() const {
  if (!contour_preset.empty()) return ::isac::contour_preset(contour_preset);
  return TfsContour(contour_m, contour_n);
}

TargetPose Scenario::pose() const {
  return TargetPose(d_o_m, phi_o_deg * kDegToRad, varphi_deg * kDegToRad);
}

SensingParams Scenario::sensing(std::optional<double> d_o) const {
  SensingParams sp;
  sp.d_o = d_o.value_or(d_o_m);
  sp.sigma_s2 = dbm_to_watt(sigma_s2_dbm);
  if (radar_snr_hold && d_o.has_value()) {
    const double ratio = d_o_m / *d_o;
    sp.sigma_s2 *= ratio * ratio * ratio * ratio;
  }
  sp.t_s = t_s_s;
  sp.bandwidth = bandwidth_hz;
  return sp;
}

DesignConstraints Scenario::constraints() const {
  DesignConstraints c;
  c.p_t = dbw_to_watt(p_t_dbw);
  c.gamma = db_to_linear(gamma_db);
  c.sigma_n2 = dbm_to_watt(sigma_n2_dbm);
  c.coverage_enabled = coverage_enabled;
  return c;
}

Scenario default_scenario() {
  Scenario s;
  s.user_dirs_deg = {-60.0, -35.0, 35.0, 60.0};
  s.path_loss_db = {100.0, 100.0, 100.0, 100.0};
  return s;
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw BadScenario(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario s;
  try {
    const auto& arr = j.at("array");
    s.array.n_tx = arr.at("n_tx").get<int>();
    s.array.n_rx = arr.at("n_rx").get<int>();
    s.array.spacing = arr.at("spacing_wavelengths").get<double>();

    const auto& users = j.at("users");
    s.user_dirs_deg = users.at("directions_deg").get<std::vector<double>>();
    s.path_loss_db = users.at("path_loss_db").get<std::vector<double>>();
    s.n_paths = users.at("n_paths").get<int>();
    s.los_fraction = users.at("los_fraction").get<double>();
    s.channel_seed = users.at("seed").get<std::uint64_t>();

    const auto& con = j.at("contour");
    if (con.contains("preset")) {
      s.contour_preset = con.at("preset").get<std::string>();
    } else {
      s.contour_preset.clear();
      s.contour_m = to_vector(con.at("m"));
      s.contour_n = to_vector(con.at("n"));
    }

    const auto& pose = j.at("pose");
    s.d_o_m = pose.at("d_o_m").get<double>();
    s.phi_o_deg = pose.at("phi_o_deg").get<double>();
    s.varphi_deg = pose.at("varphi_deg").get<double>();

    const auto& part = j.at("partition");
    s.k_subsections = part.at("k").get<int>();
    s.normalize_lengths = part.at("normalize_lengths").get<bool>();

    const auto& sen = j.at("sensing");
    s.sigma_s2_dbm = sen.at("sigma_s2_dbm").get<double>();
    s.bandwidth_hz = sen.at("bandwidth_hz").get<double>();
    s.t_s_s = sen.at("t_s_s").get<double>();

    const auto& cons = j.at("constraints");
    s.p_t_dbw = cons.at("p_t_dbw").get<double>();
    s.gamma_db = cons.at("gamma_db").get<double>();
    s.sigma_n2_dbm = cons.at("sigma_n2_dbm").get<double>();
    s.coverage_enabled = cons.at("coverage").get<bool>();

    s.radar_snr_hold = j.at("sweep_policy").at("radar_snr_hold").get<bool>();

    const auto& sol = j.at("solver");
    s.solver_tol = sol.at("tol").get<double>();
    s.solver_max_iters = sol.at("max_iters").get<int>();
    s.extraction_max_attempts = sol.at("extraction_max_attempts").get<int>();
    s.extraction_seed = sol.at("extraction_seed").get<std::uint64_t>();

    const auto& mc = j.at("mc");
    s.n_symbols = mc.at("n_symbols").get<int>();
    const std::string kind = mc.at("symbols").get<std::string>();
    if (kind == "gaussian") s.symbol_kind = SymbolKind::Gaussian;
    else if (kind == "qpsk") s.symbol_kind = SymbolKind::Qpsk;
    else throw BadScenario("symbols must be \"gaussian\" or \"qpsk\"");
    s.grid_step_deg = mc.at("grid_step_deg").get<double>();
  } catch (const json::exception& e) {
    throw BadScenario(std::string("scenario is missing or mistypes a key: ") + e.what());
  }
  s.validate();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["array"] = {{"n_tx", s.array.n_tx},
                {"n_rx", s.array.n_rx},
                {"spacing_wavelengths", s.array.spacing}};
  j["users"] = {{"directions_deg", s.user_dirs_deg},
                {"path_loss_db", s.path_loss_db},
                {"n_paths", s.n_paths},
                {"los_fraction", s.los_fraction},
                {"seed", s.channel_seed}};
  if (!s.contour_preset.empty()) {
    j["contour"] = {{"preset", s.contour_preset}};
  } else {
    j["contour"] = {{"m", from_vector(s.contour_m)}, {"n", from_vector(s.contour_n)}};
  }
  j["pose"] = {{"d_o_m", s.d_o_m}, {"phi_o_deg", s.phi_o_deg}, {"varphi_deg", s.varphi_deg}};
  j["partition"] = {{"k", s.k_subsections}, {"normalize_lengths", s.normalize_lengths}};
  j["sensing"] = {{"sigma_s2_dbm", s.sigma_s2_dbm},
                  {"bandwidth_hz", s.bandwidth_hz},
                  {"t_s_s", s.t_s_s}};
  j["constraints"] = {{"p_t_dbw", s.p_t_dbw},
                      {"gamma_db", s.gamma_db},
                      {"sigma_n2_dbm", s.sigma_n2_dbm},
                      {"coverage", s.coverage_enabled}};
  j["sweep_policy"] = {{"radar_snr_hold", s.radar_snr_hold}};
  j["solver"] = {{"tol", s.solver_tol},
                 {"max_iters", s.solver_max_iters},
                 {"extraction_max_attempts", s.extraction_max_attempts},
                 {"extraction_seed", s.extraction_seed}};
  j["mc"] = {{"n_symbols", s.n_symbols},
             {"symbols", s.symbol_kind == SymbolKind::Gaussian ? "gaussian" : "qpsk"},
             {"grid_step_deg", s.grid_step_deg}};
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadScenario("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

ScenarioRealization realize(const Scenario& s, std::optional<double> d_o) {
  s.validate();
  const TfsContour contour = s.contour();
  TargetPose pose = s.pose();
  pose.d_o = d_o.value_or(s.d_o_m);
  const ContourPartition partition =
      partition_los(contour, pose, Vec2::Zero(), s.k_subsections, s.normalize_lengths);
  std::vector<SteeringBundle> bundles = steering_bundles(s.array, partition);
  std::vector<double> dirs_rad(s.user_dirs_deg.size());
  for (size_t i = 0; i < dirs_rad.size(); ++i) dirs_rad[i] = s.user_dirs_deg[i] * kDegToRad;
  CommChannel channel = gen_channel(s.array, dirs_rad, s.path_loss_db, s.n_paths,
                                    s.los_fraction, s.channel_seed);
  return ScenarioRealization{contour,    pose,    partition, std::move(bundles),
                             s.sensing(d_o), std::move(channel), s.constraints()};
}

}  // namespace isac
