#include "hvroc/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace hvroc;

PYBIND11_MODULE(_hvroc, m)
{
    m.doc() = "Human-aware automation synthesis: LQS human model, moment propagation, tuning";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ReachTask>(m, "ReachTask")
        .def(py::init<>())
        .def_readwrite("mass", &ReachTask::mass)
        .def_readwrite("dt", &ReachTask::dt)
        .def_readwrite("tau1", &ReachTask::tau1)
        .def_readwrite("tau2", &ReachTask::tau2)
        .def_readwrite("sigma_u", &ReachTask::sigma_u)
        .def_readwrite("sigma_omega_diag", &ReachTask::sigma_omega_diag)
        .def_readwrite("p0", &ReachTask::p0)
        .def_readwrite("p_ref", &ReachTask::p_ref)
        .def_readwrite("N", &ReachTask::N);

    py::class_<PlantModel>(m, "PlantModel")
        .def_readonly("n", &PlantModel::n)
        .def_readonly("N", &PlantModel::N)
        .def_readonly("A", &PlantModel::A)
        .def_readonly("B_H", &PlantModel::B_H)
        .def_readonly("B_A", &PlantModel::B_A)
        .def_readonly("H_H", &PlantModel::H_H)
        .def_readonly("H_A", &PlantModel::H_A)
        .def_readonly("C", &PlantModel::C)
        .def_readonly("D", &PlantModel::D)
        .def_readonly("Sigma_xi", &PlantModel::Sigma_xi)
        .def_readonly("Sigma_omega", &PlantModel::Sigma_omega)
        .def_readonly("x0_mean", &PlantModel::x0_mean)
        .def_readonly("Omega0", &PlantModel::Omega0);

    py::class_<CostSpec>(m, "CostSpec")
        .def(py::init<MatSeq, Mat>(), py::arg("Q"), py::arg("R"))
        .def_readwrite("Q", &CostSpec::Q)
        .def_readwrite("R", &CostSpec::R);

    py::class_<HumanPolicy>(m, "HumanPolicy")
        .def_readonly("L", &HumanPolicy::L)
        .def_readonly("K", &HumanPolicy::K);

    py::class_<SolverReport>(m, "SolverReport")
        .def_readonly("iterations", &SolverReport::iterations)
        .def_readonly("converged", &SolverReport::converged)
        .def_readonly("gain_delta", &SolverReport::gain_delta)
        .def_readonly("expected_cost", &SolverReport::expected_cost)
        .def_readonly("regularized", &SolverReport::regularized);

    py::class_<AutomationParams>(m, "AutomationParams")
        .def(py::init<Vec, Vec>(), py::arg("q"), py::arg("r"))
        .def_readwrite("q", &AutomationParams::q)
        .def_readwrite("r", &AutomationParams::r);

    py::class_<AutomationPolicy>(m, "AutomationPolicy")
        .def_readonly("L", &AutomationPolicy::L)
        .def_readonly("K", &AutomationPolicy::K);

    py::class_<MomentTrajectory>(m, "MomentTrajectory")
        .def_property_readonly("coupled", [](const MomentTrajectory& t) { return t.layout == Layout::Coupled; })
        .def_readonly("stacked_dim", &MomentTrajectory::stacked_dim)
        .def_readonly("means", &MomentTrajectory::means)
        .def_readonly("covs", &MomentTrajectory::covs);

    py::class_<PositionStats>(m, "PositionStats")
        .def_readonly("mean", &PositionStats::mean)
        .def_readonly("cov", &PositionStats::cov);

    py::class_<ObjectiveWeights>(m, "ObjectiveWeights")
        .def(py::init<double, double, double, double>(), py::arg("s_highMidVar"),
             py::arg("s_lowMidVar"), py::arg("s_endVar"), py::arg("s_ref"))
        .def_static("highvar", &ObjectiveWeights::highvar)
        .def_static("lowvar", &ObjectiveWeights::lowvar);

    py::class_<HumanBaseline>(m, "HumanBaseline")
        .def_readonly("trajectory", &HumanBaseline::trajectory)
        .def_readonly("mid", &HumanBaseline::mid)
        .def_readonly("end", &HumanBaseline::end)
        .def_readonly("end_error", &HumanBaseline::end_error);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("q_star", &OptimizationResult::q_star)
        .def_readonly("r_star", &OptimizationResult::r_star)
        .def_readonly("J_star", &OptimizationResult::J_star)
        .def_readonly("evaluations", &OptimizationResult::evaluations)
        .def_readonly("policy", &OptimizationResult::policy);

    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("n_samples", &EnsembleStats::n_samples)
        .def_readonly("means", &EnsembleStats::means)
        .def_readonly("covs", &EnsembleStats::covs)
        .def_readonly("stderr_mean", &EnsembleStats::stderr_mean);

    py::class_<OracleVerdict>(m, "OracleVerdict")
        .def_readonly("passed", &OracleVerdict::pass)
        .def_property_readonly("mean_fraction", &OracleVerdict::mean_fraction)
        .def_property_readonly("var_fraction", &OracleVerdict::var_fraction)
        .def_readonly("worst_z", &OracleVerdict::worst_z);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("task", &ScenarioConfig::task)
        .def_readwrite("controllers", &ScenarioConfig::controllers)
        .def_readwrite("mc_samples", &ScenarioConfig::mc_samples)
        .def_readwrite("max_evals", &ScenarioConfig::max_evals)
        .def_readwrite("restarts", &ScenarioConfig::restarts)
        .def_readonly("init", &ScenarioConfig::init)
        .def_readonly("human_q", &ScenarioConfig::human_q)
        .def_readonly("human_r", &ScenarioConfig::human_r)
        .def_readonly("human_terminal_only", &ScenarioConfig::human_terminal_only);

    m.def("build_point_mass_plant", &build_point_mass_plant, py::arg("task"));
    m.def("materialize_reference_cost",
          [](const Vec& w, bool terminal_only, int N) { return materialize_reference_cost(w, terminal_only, N); },
          py::arg("weights"), py::arg("terminal_only"), py::arg("N"));
    m.def("solve_lqs",
          [](const PlantModel& p, const CostSpec& c, int max_iter, double tol) {
              const auto s = solve_lqs(p, c, {max_iter, tol});
              return py::make_tuple(s.policy, s.report);
          },
          py::arg("plant"), py::arg("cost"), py::arg("max_iter") = 500, py::arg("tol") = 1e-9);
    m.def("solve_lqr", py::overload_cast<const PlantModel&, const MatSeq&, const Mat&>(&solve_lqr),
          py::arg("plant"), py::arg("Q_seq"), py::arg("R_A"));
    m.def("solve_observer", [](const PlantModel& p, const Mat& O) { return solve_observer(p, O); },
          py::arg("plant"), py::arg("Omega0"));
    m.def("design_automation", &design_automation, py::arg("plant"), py::arg("params"));
    m.def("lqr_benchmark",
          [](const PlantModel& p, const Vec& q8, const Vec& r) { return lqr_benchmark(p, q8, r); },
          py::arg("plant"), py::arg("q8"), py::arg("r"));
    m.def("propagate_human_alone", &propagate_human_alone, py::arg("plant"), py::arg("human"));
    m.def("propagate_coupled", &propagate_coupled, py::arg("plant"), py::arg("human"),
          py::arg("automation"));
    m.def("position_stats", &position_stats, py::arg("trajectory"), py::arg("t"));
    m.def("settling_time", &settling_time, py::arg("trajectory"), py::arg("axis"), py::arg("p_ref"),
          py::arg("band_fraction") = 0.05);
    m.def("make_baseline",
          [](const PlantModel& p, const HumanPolicy& h, const Eigen::Vector2d& pr, const std::string& sc) {
              return make_baseline(p, h, pr, parse_scalarization(sc));
          },
          py::arg("plant"), py::arg("human"), py::arg("p_ref"), py::arg("scalarization") = "x-axis");
    m.def("evaluate_objective", &evaluate_objective, py::arg("params"), py::arg("plant"),
          py::arg("human"), py::arg("baseline"), py::arg("weights"));
    m.def("optimize",
          [](const PlantModel& p, const HumanPolicy& h, const HumanBaseline& b, const ObjectiveWeights& w,
             const AutomationParams& init, int max_evals, int restarts, std::uint64_t seed) {
              OptimizeOptions o;
              o.max_evals = max_evals;
              o.restarts = restarts;
              o.seed = seed;
              py::gil_scoped_release release;
              return optimize(p, h, b, w, init, o);
          },
          py::arg("plant"), py::arg("human"), py::arg("baseline"), py::arg("weights"), py::arg("init"),
          py::arg("max_evals") = 2000, py::arg("restarts") = 3, py::arg("seed") = 0);
    m.def("simulate",
          [](const PlantModel& p, const HumanPolicy& h, const AutomationPolicy* a, int n, std::uint64_t seed) {
              py::gil_scoped_release release;
              return simulate(p, h, a, n, seed);
          },
          py::arg("plant"), py::arg("human"), py::arg("automation") = nullptr, py::arg("n_samples") = 20000,
          py::arg("seed") = 0);
    m.def("compare_moments",
          [](const MomentTrajectory& t, const EnsembleStats& e) { return compare_moments(t, e); },
          py::arg("analytic"), py::arg("ensemble"));
    m.def("sample_cost", [](const PlantModel& p, const CostSpec& c, const HumanPolicy& h, int n,
                            std::uint64_t seed) { return sample_cost(p, c, h, n, seed); },
          py::arg("plant"), py::arg("cost"), py::arg("human"), py::arg("n_samples"), py::arg("seed") = 0);
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("bundled_config", &bundled_config, py::arg("name"));
    m.def("run_report",
          [](const ScenarioConfig& cfg, const std::string& out_dir, std::uint64_t seed) {
              std::ostringstream os;
              const auto r = run_report(cfg, out_dir, seed, os);
              return py::make_tuple(r.all_ok, os.str());
          },
          py::arg("config"), py::arg("out_dir"), py::arg("seed") = 0);
}
