#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isac/scenario.hpp"
#include "isac/sim.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace isac;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitPartial = 3;
constexpr int kExitBadScenario = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RFC-4180: quote fields containing comma, quote or newline; CRLF rows.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

struct Sweep {
  std::string key;
  double start, stop, step;

  std::vector<double> points() const {
    std::vector<double> p;
    if (step <= 0.0) throw BadScenario("sweep step must be positive");
    for (double v = start; v <= stop + 1e-12 * std::max(std::abs(stop), 1.0); v += step)
      p.push_back(v);
    return p;
  }
};

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw BadScenario("sweep must look like KEY=START:STOP:STEP");
  Sweep s;
  s.key = text.substr(0, eq);
  const std::string range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = range.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw BadScenario("sweep must look like KEY=START:STOP:STEP");
  try {
    s.start = std::stod(range.substr(0, c1));
    s.stop = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
    s.step = std::stod(range.substr(c2 + 1));
  } catch (const std::exception&) {
    throw BadScenario("sweep bounds must be numeric");
  }
  return s;
}

// Applies one sweep point; returns the scenario to evaluate and the range
// override (d_o sweeps keep the base scenario for radar-SNR-hold referencing).
Scenario apply_sweep(const Scenario& base, const std::string& key, double value,
                     std::optional<double>& d_o_override) {
  Scenario s = base;
  d_o_override.reset();
  if (key == "d_o") {
    d_o_override = value;
  } else if (key == "gamma") {
    s.gamma_db = value;
  } else if (key == "n_c") {
    const int n = static_cast<int>(std::lround(value));
    if (n < 1 || n > base.n_users())
      throw BadScenario("n_c sweep value exceeds the configured user list");
    s.user_dirs_deg.assign(base.user_dirs_deg.begin(), base.user_dirs_deg.begin() + n);
    s.path_loss_db.assign(base.path_loss_db.begin(), base.path_loss_db.begin() + n);
  } else if (key == "b") {
    s.bandwidth_hz = value;
  } else if (key == "k") {
    s.k_subsections = static_cast<int>(std::lround(value));
  } else {
    throw BadScenario("sweep key must be one of d_o, gamma, n_c, b, k");
  }
  return s;
}

struct RunDir {
  fs::path dir;

  explicit RunDir(const std::string& out) : dir(out) { fs::create_directories(dir); }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  }

  void write_snapshot(const Scenario& s) const { open("scenario.json") << scenario_to_json(s); }

  void write_manifest(const json& extra) const {
    json m;
    m["tool"] = "isaccrb";
    m["version"] = kVersion;
    for (auto& [k, v] : extra.items()) m[k] = v;
    open("manifest.json") << m.dump(2) << "\n";
  }
};

json matrix_json(const MatC& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back({{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
    rows.push_back(row);
  }
  return rows;
}

json crb_json(const CrbReport& r) {
  json j;
  j["crb_d_m2"] = r.crb_d;
  j["crb_phi_rad2"] = r.crb_phi;
  j["crb_varphi_rad2"] = r.crb_varphi;
  json subs = json::array();
  for (const auto& d : r.per_subsection)
    subs.push_back({{"a_rx_a", d.a_rx_a},
                    {"adot_rx_adot", d.adot_rx_adot},
                    {"re_adot_rx_a", d.re_adot_rx_a},
                    {"x_k", d.x_k},
                    {"z1_k", d.z1_k},
                    {"l_k", d.l_k}});
  j["per_subsection"] = subs;
  return j;
}

// Full-array uniform illumination used by CRB sweeps and the baseline rows.
MatC uniform_covariance(const Scenario& s) {
  const double p_t = dbw_to_watt(s.p_t_dbw);
  return (p_t / s.array.n_tx) * MatC::Identity(s.array.n_tx, s.array.n_tx);
}

int cmd_validate(const std::string& scenario_path) {
  const Scenario s = scenario_path.empty() ? default_scenario() : load_scenario(scenario_path);
  s.validate();
  std::printf("scenario ok: %d users, K=%d, contour=%s\n", s.n_users(), s.k_subsections,
              s.contour_preset.empty() ? "explicit" : s.contour_preset.c_str());
  return kExitOk;
}

int cmd_crb_sweep(const Scenario& base, const Sweep& sweep, const RunDir& run) {
  if (sweep.key != "d_o" && sweep.key != "gamma" && sweep.key != "n_c" && sweep.key != "b" &&
      sweep.key != "k")
    throw BadScenario("sweep key must be one of d_o, gamma, n_c, b, k");
  auto csv = run.open("crb_sweep.csv");
  csv_row(csv, {sweep.key, "crb_d_m2", "crb_phi_rad2", "crb_varphi_rad2", "pt_crb_d_m2",
                "pt_crb_phi_rad2", "status"});
  bool any_failed = false;
  for (double v : sweep.points()) {
    std::vector<std::string> row{fmt(v)};
    try {
      std::optional<double> d_o;
      const Scenario s = apply_sweep(base, sweep.key, v, d_o);
      const auto r = realize(s, d_o);
      const MatC r_x = uniform_covariance(s);
      const CrbReport et = crb_et(r.partition, r.bundles, r_x, r.sensing);
      const PtCrb pt =
          crb_pt(r.pose.phi_o, steering_bundle(s.array, r.pose.phi_o), r_x, r.sensing);
      row.insert(row.end(), {fmt(et.crb_d), fmt(et.crb_phi), fmt(et.crb_varphi), fmt(pt.crb_d),
                             fmt(pt.crb_phi), "ok"});
    } catch (const Error& e) {
      row.resize(6, "");
      row.push_back(std::string("error: ") + e.what());
      any_failed = true;
    }
    csv_row(csv, row);
  }
  return any_failed ? kExitPartial : kExitOk;
}

DesignResult run_design(const Scenario& s, const ScenarioRealization& r,
                        const std::string& method, std::uint64_t seed) {
  SolverOptions opts;
  opts.tol = s.solver_tol;
  opts.max_iters = s.solver_max_iters;
  opts.max_attempts = s.extraction_max_attempts;
  opts.seed = seed;
  if (method == "sdr") return design_sdr(r.channel, r.partition, r.bundles, r.cons, r.sensing, opts);
  if (method == "zf") return design_zf(r.channel, r.partition, r.bundles, r.cons, r.sensing, opts);
  if (method == "isotropic") {
    DesignResult out;
    out.beamformers = design_isotropic(s.array.n_tx, s.n_users(), r.cons.p_t);
    out.crb = crb_et(r.partition, r.bundles, out.beamformers.r_x(), r.sensing, true);
    for (int n = 0; n < s.n_users(); ++n)
      out.sinr.push_back(sinr(r.channel, out.beamformers.w, n, r.cons.sigma_n2));
    return out;
  }
  throw BadScenario("method must be sdr, zf or isotropic");
}

int cmd_design(const Scenario& s, const std::string& method, std::uint64_t seed,
               const RunDir& run) {
  const auto r = realize(s);
  const DesignResult d = run_design(s, r, method, seed);

  json j;
  j["method"] = method;
  j["w"] = matrix_json(d.beamformers.w);
  j["power_w"] = d.beamformers.power();
  j["sinr"] = d.sinr;
  j["sum_rate_bps_hz"] = sum_rate(r.channel, d.beamformers.w, r.cons.sigma_n2);
  j["crb"] = crb_json(d.crb);
  if (method != "isotropic") j["relaxed_crb_phi_rad2"] = d.relaxed_crb_phi;
  if (method == "sdr") j["extracted"] = d.extracted;
  if (method == "zf") j["direction_set"] = d.direction_set;
  run.open("design.json") << j.dump(2) << "\n";

  auto csv = run.open("beampattern.csv");
  csv_row(csv, {"phi_deg", "beampattern_w"});
  Eigen::VectorXd grid(181);
  for (int i = 0; i < 181; ++i) grid[i] = (-90.0 + i) * std::numbers::pi / 180.0;
  const Eigen::VectorXd bp = beampattern(s.array, d.beamformers.r_x(), grid);
  for (int i = 0; i < 181; ++i) csv_row(csv, {fmt(-90.0 + i), fmt(bp[i])});
  return kExitOk;
}

int cmd_mse(const Scenario& s, const std::string& method, int n_trials, std::uint64_t seed,
            const RunDir& run) {
  const auto r = realize(s);
  const DesignResult d = run_design(s, r, method, seed);

  const Eigen::VectorXd grid = mf_grid(s.grid_step_deg);
  const MseResult mse = monte_carlo_mse(d.beamformers.w, r.partition, r.bundles, s.array,
                                        r.sensing, r.pose.phi_o, grid, n_trials, s.n_symbols,
                                        s.symbol_kind, seed);
  // The closed-form bound integrates over the observation period; T unit-time
  // symbols correspond to t_s = T times the per-symbol period.
  SensingParams sp_mc = r.sensing;
  sp_mc.t_s = r.sensing.t_s * s.n_symbols;
  const CrbReport bound = crb_et(r.partition, r.bundles, d.beamformers.r_x(), sp_mc, true);

  json j;
  j["method"] = method;
  j["n_trials"] = n_trials;
  j["seed"] = seed;
  j["rmse_rad"] = mse.rmse;
  j["root_crb_rad"] = std::sqrt(bound.crb_phi);
  run.open("mse.json") << j.dump(2) << "\n";

  auto csv = run.open("trials.csv");
  csv_row(csv, {"trial", "phi_hat_rad", "error_rad"});
  for (size_t i = 0; i < mse.trials.size(); ++i)
    csv_row(csv, {std::to_string(i), fmt(mse.trials[i].phi_hat),
                  fmt(mse.trials[i].phi_hat - mse.trials[i].phi_true)});
  return kExitOk;
}

int cmd_compare(const Scenario& base, const Sweep& sweep, std::uint64_t seed,
                const RunDir& run) {
  if (sweep.key != "gamma" && sweep.key != "n_c")
    throw BadScenario("compare sweeps gamma or n_c");
  auto csv = run.open("compare.csv");
  csv_row(csv, {sweep.key, "sdr_crb_phi_rad2", "zf_crb_phi_rad2", "sdr_sum_rate_bps_hz",
                "zf_sum_rate_bps_hz", "status"});
  bool any_failed = false;
  for (double v : sweep.points()) {
    std::vector<std::string> row{fmt(v)};
    try {
      std::optional<double> d_o;
      const Scenario s = apply_sweep(base, sweep.key, v, d_o);
      const auto r = realize(s, d_o);
      const DesignResult sdr = run_design(s, r, "sdr", seed);
      const DesignResult zf = run_design(s, r, "zf", seed);
      row.insert(row.end(),
                 {fmt(sdr.crb.crb_phi), fmt(zf.crb.crb_phi),
                  fmt(sum_rate(r.channel, sdr.beamformers.w, r.cons.sigma_n2)),
                  fmt(sum_rate(r.channel, zf.beamformers.w, r.cons.sigma_n2)), "ok"});
    } catch (const Error& e) {
      row.resize(5, "");
      row.push_back(std::string("error: ") + e.what());
      any_failed = true;
    }
    csv_row(csv, row);
  }
  return any_failed ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended-target CRB analysis and ISAC beamforming designs"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", method = "sdr", sweep_text;
  std::uint64_t seed = 1;
  int trials = 2000;

  app.add_option("--scenario", scenario_path, "Scenario JSON (omit for the built-in default)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed for extraction/Monte-Carlo randomness");

  auto* validate = app.add_subcommand("validate", "Lint a scenario file");
  auto* crb = app.add_subcommand("crb-sweep", "CRBs under uniform illumination over a sweep");
  crb->add_option("--sweep", sweep_text, "KEY=START:STOP:STEP, key in d_o|gamma|n_c|b|k")
      ->required();
  auto* design = app.add_subcommand("design", "Run one beamforming design");
  design->add_option("--method", method, "sdr|zf|isotropic");
  auto* mse = app.add_subcommand("mse", "Monte-Carlo matched-filter RMSE vs root-CRB");
  mse->add_option("--method", method, "sdr|zf|isotropic");
  mse->add_option("--trials", trials, "Number of Monte-Carlo trials");
  auto* compare = app.add_subcommand("compare", "SDR vs ZF CRB/sum-rate over a sweep");
  compare->add_option("--sweep", sweep_text, "KEY=START:STOP:STEP, key in gamma|n_c")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);

    const Scenario s =
        scenario_path.empty() ? default_scenario() : load_scenario(scenario_path);
    s.validate();
    RunDir run(out_dir);
    run.write_snapshot(s);

    json meta;
    meta["seed"] = seed;
    if (!sweep_text.empty()) meta["sweep"] = sweep_text;

    if (crb->parsed()) {
      meta["command"] = "crb-sweep";
      run.write_manifest(meta);
      return cmd_crb_sweep(s, parse_sweep(sweep_text), run);
    }
    if (design->parsed()) {
      meta["command"] = "design";
      meta["method"] = method;
      run.write_manifest(meta);
      return cmd_design(s, method, seed, run);
    }
    if (mse->parsed()) {
      meta["command"] = "mse";
      meta["method"] = method;
      meta["trials"] = trials;
      run.write_manifest(meta);
      return cmd_mse(s, method, trials, seed, run);
    }
    if (compare->parsed()) {
      meta["command"] = "compare";
      run.write_manifest(meta);
      return cmd_compare(s, parse_sweep(sweep_text), seed, run);
    }
  } catch (const BadScenario& e) {
    std::fprintf(stderr, "bad scenario: %s\n", e.what());
    return kExitBadScenario;
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const AllInfeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPartial;
  }
  return kExitOk;
}
