#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isac/design.hpp"
#include "isac/scenario.hpp"
#include "isac/sim.hpp"

namespace py = pybind11;
using namespace isac;

PYBIND11_MODULE(_isaccrb, m) {
  m.doc() = "Extended-target CRB analysis and ISAC beamforming designs";

  // Translators run most-recent-first; register the base before the leaves.
  auto base = py::register_exception<Error>(m, "IsacError");
  py::register_exception<BadScenario>(m, "BadScenarioError", PyExc_ValueError);
  py::register_exception<EmptyLoS>(m, "EmptyLoSError", base.ptr());
  py::register_exception<Infeasible>(m, "InfeasibleError", base.ptr());
  py::register_exception<AllInfeasible>(m, "AllInfeasibleError", base.ptr());

  py::class_<TfsContour>(m, "TfsContour")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("m"), py::arg("n"))
      .def_readonly("m", &TfsContour::m)
      .def_readonly("n", &TfsContour::n)
      .def_property_readonly("harmonics", &TfsContour::harmonics);
  m.def("contour_preset", &contour_preset, py::arg("name"));
  m.def("contour_point", &contour_point, py::arg("contour"), py::arg("u"));

  py::class_<TargetPose>(m, "TargetPose")
      .def(py::init<double, double, double>(), py::arg("d_o"), py::arg("phi_o"),
           py::arg("varphi"))
      .def_readonly("d_o", &TargetPose::d_o)
      .def_readonly("phi_o", &TargetPose::phi_o)
      .def_readonly("varphi", &TargetPose::varphi);

  py::class_<SubsectionGeometry>(m, "SubsectionGeometry")
      .def_readonly("u_k", &SubsectionGeometry::u_k)
      .def_readonly("d_k", &SubsectionGeometry::d_k)
      .def_readonly("phi_k", &SubsectionGeometry::phi_k)
      .def_readonly("l_k", &SubsectionGeometry::l_k)
      .def_readonly("x_k", &SubsectionGeometry::x_k);

  py::class_<ContourPartition>(m, "ContourPartition")
      .def_readonly("subsections", &ContourPartition::subsections)
      .def_readonly("u_lower", &ContourPartition::u_lower)
      .def_readonly("u_upper", &ContourPartition::u_upper)
      .def("total_length", &ContourPartition::total_length)
      .def("__len__", &ContourPartition::size);
  m.def(
      "partition_los",
      [](const TfsContour& c, const TargetPose& pose, int k, bool normalize) {
        return partition_los(c, pose, Vec2::Zero(), k, normalize);
      },
      py::arg("contour"), py::arg("pose"), py::arg("k"), py::arg("normalize") = true);

  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def(py::init([](int n_tx, int n_rx, double spacing) {
             return ArrayConfig{n_tx, n_rx, spacing};
           }),
           py::arg("n_tx") = 16, py::arg("n_rx") = 16, py::arg("spacing") = 0.5)
      .def_readwrite("n_tx", &ArrayConfig::n_tx)
      .def_readwrite("n_rx", &ArrayConfig::n_rx)
      .def_readwrite("spacing", &ArrayConfig::spacing);
  m.def("steering_tx", &steering_tx, py::arg("cfg"), py::arg("phi"));
  m.def("steering_rx", &steering_rx, py::arg("cfg"), py::arg("phi"));
  m.def("beampattern", &beampattern, py::arg("cfg"), py::arg("r_x"), py::arg("phi_grid"));

  py::class_<SensingParams>(m, "SensingParams")
      .def(py::init([](double d_o, double sigma_s2, double t_s, double bandwidth) {
             SensingParams sp;
             sp.d_o = d_o;
             sp.sigma_s2 = sigma_s2;
             sp.t_s = t_s;
             sp.bandwidth = bandwidth;
             return sp;
           }),
           py::arg("d_o"), py::arg("sigma_s2"), py::arg("t_s") = 1.0,
           py::arg("bandwidth") = 1e7)
      .def_readwrite("d_o", &SensingParams::d_o)
      .def_readwrite("sigma_s2", &SensingParams::sigma_s2)
      .def_readwrite("t_s", &SensingParams::t_s)
      .def_readwrite("bandwidth", &SensingParams::bandwidth);

  py::class_<CrbReport>(m, "CrbReport")
      .def_readonly("crb_d", &CrbReport::crb_d)
      .def_readonly("crb_phi", &CrbReport::crb_phi)
      .def_readonly("crb_varphi", &CrbReport::crb_varphi);
  m.def(
      "crb_et",
      [](const ContourPartition& part, const ArrayConfig& cfg, const MatC& r_x,
         const SensingParams& sp, bool phi_only) {
        return crb_et(part, steering_bundles(cfg, part), r_x, sp, phi_only);
      },
      py::arg("partition"), py::arg("cfg"), py::arg("r_x"), py::arg("sp"),
      py::arg("phi_only") = false);
  m.def(
      "crb_pt",
      [](double phi_o, const ArrayConfig& cfg, const MatC& r_x, const SensingParams& sp) {
        const PtCrb pt = crb_pt(phi_o, steering_bundle(cfg, phi_o), r_x, sp);
        return py::make_tuple(pt.crb_d, pt.crb_phi);
      },
      py::arg("phi_o"), py::arg("cfg"), py::arg("r_x"), py::arg("sp"));

  py::class_<CommChannel>(m, "CommChannel")
      .def_readonly("h", &CommChannel::h)
      .def_readonly("g", &CommChannel::g)
      .def_property_readonly("n_users", &CommChannel::n_users);
  m.def("gen_channel", &gen_channel, py::arg("cfg"), py::arg("user_dirs"),
        py::arg("path_loss_db"), py::arg("n_paths"), py::arg("los_fraction"), py::arg("seed"));
  m.def("sinr", &sinr, py::arg("channel"), py::arg("w"), py::arg("n"), py::arg("sigma_n2"));
  m.def("sum_rate", &sum_rate, py::arg("channel"), py::arg("w"), py::arg("sigma_n2"));

  py::class_<DesignConstraints>(m, "DesignConstraints")
      .def(py::init([](double p_t, double gamma, double sigma_n2, bool coverage) {
             DesignConstraints c;
             c.p_t = p_t;
             c.gamma = gamma;
             c.sigma_n2 = sigma_n2;
             c.coverage_enabled = coverage;
             return c;
           }),
           py::arg("p_t"), py::arg("gamma"), py::arg("sigma_n2"),
           py::arg("coverage_enabled") = true)
      .def_readwrite("p_t", &DesignConstraints::p_t)
      .def_readwrite("gamma", &DesignConstraints::gamma)
      .def_readwrite("sigma_n2", &DesignConstraints::sigma_n2)
      .def_readwrite("coverage_enabled", &DesignConstraints::coverage_enabled);

  py::class_<BeamformerSet>(m, "BeamformerSet")
      .def_readonly("w", &BeamformerSet::w)
      .def("r_x", &BeamformerSet::r_x)
      .def("power", &BeamformerSet::power);

  py::class_<DesignResult>(m, "DesignResult")
      .def_readonly("beamformers", &DesignResult::beamformers)
      .def_readonly("crb", &DesignResult::crb)
      .def_readonly("relaxed_crb_phi", &DesignResult::relaxed_crb_phi)
      .def_readonly("sinr", &DesignResult::sinr)
      .def_readonly("direction_set", &DesignResult::direction_set)
      .def_readonly("extracted", &DesignResult::extracted)
      .def_readonly("solver_iterations", &DesignResult::solver_iterations);

  auto make_opts = [](double tol, int max_iters, std::uint64_t seed) {
    SolverOptions o;
    o.tol = tol;
    o.max_iters = max_iters;
    o.seed = seed;
    return o;
  };
  m.def(
      "design_sdr",
      [make_opts](const CommChannel& ch, const ContourPartition& part, const ArrayConfig& cfg,
                  const DesignConstraints& cons, const SensingParams& sp, double tol,
                  int max_iters, std::uint64_t seed) {
        return design_sdr(ch, part, steering_bundles(cfg, part), cons, sp,
                          make_opts(tol, max_iters, seed));
      },
      py::arg("channel"), py::arg("partition"), py::arg("cfg"), py::arg("constraints"),
      py::arg("sp"), py::arg("tol") = 1e-8, py::arg("max_iters") = 200, py::arg("seed") = 1);
  m.def(
      "design_zf",
      [make_opts](const CommChannel& ch, const ContourPartition& part, const ArrayConfig& cfg,
                  const DesignConstraints& cons, const SensingParams& sp, double tol,
                  int max_iters, std::uint64_t seed) {
        return design_zf(ch, part, steering_bundles(cfg, part), cons, sp,
                         make_opts(tol, max_iters, seed));
      },
      py::arg("channel"), py::arg("partition"), py::arg("cfg"), py::arg("constraints"),
      py::arg("sp"), py::arg("tol") = 1e-8, py::arg("max_iters") = 200, py::arg("seed") = 1);
  m.def(
      "design_isotropic",
      [](int n_t, int n_c, double p_t) { return design_isotropic(n_t, n_c, p_t); },
      py::arg("n_t"), py::arg("n_c"), py::arg("p_t"));

  m.def("mf_grid", &mf_grid, py::arg("step_deg"));
  m.def(
      "monte_carlo_mse",
      [](const MatC& w, const ContourPartition& part, const ArrayConfig& cfg,
         const SensingParams& sp, double phi_true, const Eigen::VectorXd& grid, int n_trials,
         int n_symbols, const std::string& symbols, std::uint64_t seed) {
        const SymbolKind kind = symbols == "qpsk" ? SymbolKind::Qpsk : SymbolKind::Gaussian;
        const MseResult r = monte_carlo_mse(w, part, steering_bundles(cfg, part), cfg, sp,
                                            phi_true, grid, n_trials, n_symbols, kind, seed);
        return r.rmse;
      },
      py::arg("w"), py::arg("partition"), py::arg("cfg"), py::arg("sp"), py::arg("phi_true"),
      py::arg("grid"), py::arg("n_trials"), py::arg("n_symbols") = 64,
      py::arg("symbols") = "gaussian", py::arg("seed") = 1);

  m.def("default_scenario_json", [] { return scenario_to_json(default_scenario()); });
  m.def(
      "scenario_crb",
      [](const std::string& text, py::object d_o) {
        const Scenario s = scenario_from_json(text);
        std::optional<double> d;
        if (!d_o.is_none()) d = d_o.cast<double>();
        const auto r = realize(s, d);
        const MatC r_x = (dbw_to_watt(s.p_t_dbw) / s.array.n_tx) *
                         MatC::Identity(s.array.n_tx, s.array.n_tx);
        return crb_et(r.partition, r.bundles, r_x, r.sensing);
      },
      py::arg("scenario_json"), py::arg("d_o") = py::none(),
      "Extended-target CRBs under uniform illumination for a scenario document");
}
