#include "hvroc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace hvroc {

HumanSetup setup_human(const ScenarioConfig& cfg)
{
    cfg.validate();
    HumanSetup h;
    h.plant = build_point_mass_plant(cfg.task);
    h.cost.Q = materialize_reference_cost(cfg.human_q, cfg.human_terminal_only, cfg.task.N);
    h.cost.R = cfg.human_r.asDiagonal();
    h.solution = solve_lqs(h.plant, h.cost, cfg.solver);
    h.baseline = make_baseline(h.plant, h.solution.policy, cfg.task.p_ref, cfg.scalarization);
    return h;
}

MetricsRow metrics_row(const std::string& label, const MomentTrajectory& traj,
                       const Eigen::Vector2d& p_ref, int axis)
{
    const int N = traj.N();
    const PositionStats mid = position_stats(traj, mid_index(N));
    const PositionStats end = position_stats(traj, N);
    MetricsRow r;
    r.controller = label;
    r.axis = axis == 0 ? 'x' : 'y';
    r.cov_mid = mid.cov(axis, axis);
    r.cov_end = end.cov(axis, axis);
    r.mean_err_end = std::abs(end.mean(axis) - p_ref(axis));
    if (p_ref(axis) != 0.0)
        r.settling_t = settling_time(traj, axis, p_ref(axis));
    return r;
}

ControllerRun run_controller(const ScenarioConfig& cfg, const HumanSetup& human,
                             const std::string& label, std::uint64_t seed)
{
    ControllerRun run;
    run.label = label;
    try {
        if (label == "human-alone") {
            run.trajectory = human.baseline.trajectory;
        } else if (label == "hvroc-highvar" || label == "hvroc-lowvar") {
            OptimizeOptions o;
            o.max_evals = cfg.max_evals;
            o.restarts = cfg.restarts;
            o.seed = seed;
            o.threads = cfg.threads;
            const ObjectiveWeights& w = label == "hvroc-highvar" ? cfg.highvar : cfg.lowvar;
            run.optimization = optimize(human.plant, human.solution.policy, human.baseline, w,
                                        cfg.init, o);
            run.automation = run.optimization->policy;
            run.coupled = true;
        } else if (label == "lqr-benchmark") {
            run.automation = lqr_benchmark(human.plant, cfg.lqr_q, cfg.lqr_r);
            run.coupled = true;
        } else {
            throw ConfigError("unknown controller '" + label + "'");
        }
        if (run.coupled)
            run.trajectory = propagate_coupled(human.plant, human.solution.policy, run.automation);
        for (int ax = 0; ax < 2; ++ax)
            run.rows[ax] = metrics_row(label, run.trajectory, cfg.task.p_ref, ax);
        run.ok = true;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        run.error = e.what();
    }
    return run;
}

std::vector<ControllerRun> run_controllers(const ScenarioConfig& cfg, const HumanSetup& human,
                                           std::uint64_t seed)
{
    std::vector<ControllerRun> runs;
    for (const auto& label : cfg.controllers)
        runs.push_back(run_controller(cfg, human, label, seed));
    return runs;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write '" + path + "'");
    return f;
}

std::string settling_text(const std::optional<int>& s)
{
    return s ? std::to_string(*s) : "none";
}

void write_moments(const std::string& path, const VecSeq& means, const MatSeq& covs)
{
    auto f = open_out(path);
    f << "t,E_px,E_py,cov_pxpx,cov_pypy,cov_pxpy\n";
    for (std::size_t t = 0; t < means.size(); ++t) {
        f << t << ',' << format_number(means[t](0)) << ',' << format_number(means[t](1)) << ','
          << format_number(covs[t](0, 0)) << ',' << format_number(covs[t](1, 1)) << ','
          << format_number(covs[t](0, 1)) << '\n';
    }
}

} // namespace

void write_metrics_csv(const std::string& path, const std::vector<ControllerRun>& runs)
{
    auto f = open_out(path);
    f << "controller,axis,cov_mid,cov_end,mean_err_end,settling_t\n";
    for (const auto& run : runs) {
        if (!run.ok)
            continue;
        for (const auto& r : run.rows)
            f << r.controller << ',' << r.axis << ',' << format_number(r.cov_mid) << ','
              << format_number(r.cov_end) << ',' << format_number(r.mean_err_end) << ','
              << settling_text(r.settling_t) << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const MomentTrajectory& traj)
{
    write_moments(path, traj.means, traj.covs);
}

void write_ensemble_csv(const std::string& path, const EnsembleStats& ens)
{
    write_moments(path, ens.means, ens.covs);
}

static void write_params_csv(const std::string& path, const std::vector<ControllerRun>& runs)
{
    auto f = open_out(path);
    f << "controller,q_px,q_py,q_vx,q_vy,q_fx,q_fy,r_x,r_y,J,evaluations\n";
    for (const auto& run : runs) {
        if (!run.ok || !run.optimization)
            continue;
        const auto& o = *run.optimization;
        f << run.label;
        for (Eigen::Index i = 0; i < o.q_star.size(); ++i)
            f << ',' << format_number(o.q_star(i));
        for (Eigen::Index i = 0; i < o.r_star.size(); ++i)
            f << ',' << format_number(o.r_star(i));
        f << ',' << format_number(o.J_star) << ',' << o.evaluations << '\n';
    }
}

void print_table(std::ostream& os, const std::vector<ControllerRun>& runs, int N)
{
    const int w0 = 30, w = 15;
    std::ostringstream out;
    out << std::left << std::setw(w0) << "x-axis";
    for (const auto& r : runs)
        out << std::right << std::setw(w) << r.label;
    out << '\n';
    auto line = [&](const std::string& name, auto&& cell) {
        out << std::left << std::setw(w0) << name;
        for (const auto& r : runs)
            out << std::right << std::setw(w) << (r.ok ? cell(r.rows[0]) : std::string("failed"));
        out << '\n';
    };
    auto sci = [](double v) {
        std::ostringstream s;
        s << std::scientific << std::setprecision(2) << v;
        return s.str();
    };
    line("cov(p_x) t=" + std::to_string(mid_index(N)) + " [m^2]", [&](const MetricsRow& m) { return sci(m.cov_mid); });
    line("cov(p_x) t=" + std::to_string(N) + " [m^2]", [&](const MetricsRow& m) { return sci(m.cov_end); });
    line("|E p_x,N - p_ref| [mm]", [](const MetricsRow& m) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << m.mean_err_end * 1e3;
        return s.str();
    });
    line("settling t (5% band)", [](const MetricsRow& m) { return settling_text(m.settling_t); });
    os << out.str();
}

ReportResult write_report(const std::vector<ControllerRun>& runs, const ScenarioConfig& cfg,
                          const std::string& out_dir, std::ostream& os)
{
    fs::create_directories(out_dir);
    ReportResult res;
    res.runs = runs;
    bool any_opt = false;
    for (const auto& run : runs) {
        if (!run.ok) {
            res.all_ok = false;
            os << "controller " << run.label << " failed: " << run.error << '\n';
            continue;
        }
        write_trajectory_csv((fs::path(out_dir) / ("trajectory_" + run.label + ".csv")).string(),
                             run.trajectory);
        any_opt = any_opt || run.optimization.has_value();
    }
    write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), runs);
    if (any_opt)
        write_params_csv((fs::path(out_dir) / "hvroc_params.csv").string(), runs);
    print_table(os, runs, cfg.task.N);
    return res;
}

ReportResult run_report(const ScenarioConfig& cfg, const std::string& out_dir,
                        std::uint64_t seed, std::ostream& os)
{
    const HumanSetup human = setup_human(cfg);
    return write_report(run_controllers(cfg, human, seed), cfg, out_dir, os);
}

VerifyResult verify_runs(const std::vector<ControllerRun>& runs, const HumanSetup& human,
                         const ScenarioConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir, std::ostream& os)
{
    VerifyResult res;
    std::ostringstream rep;
    rep << "oracle: " << cfg.mc_samples << " trajectories, seed " << seed << '\n';
    rep << "criterion: mean |diff|/stderr < 4 and diagonal variance within 5% (where > 1e-9)"
           " on >= 99% of (entry, t) pairs\n";
    SimulateOptions so;
    so.threads = cfg.threads;
    for (const auto& run : runs) {
        VerifyEntry e;
        e.label = run.label;
        if (!run.ok) {
            e.error = run.error;
            res.pass = false;
            rep << run.label << ": FAIL (controller failed: " << run.error << ")\n";
            res.entries.push_back(e);
            continue;
        }
        try {
            const EnsembleStats ens = simulate(human.plant, human.solution.policy,
                                               run.coupled ? &run.automation : nullptr,
                                               cfg.mc_samples, seed, so);
            e.verdict = compare_moments(run.trajectory, ens);
            e.ran = true;
        } catch (const Error& ex) {
            e.error = ex.what();
        }
        const bool ok = e.ran && e.verdict.pass;
        res.pass = res.pass && ok;
        rep << run.label << ": " << (ok ? "PASS" : "FAIL");
        if (e.ran) {
            const auto& v = e.verdict;
            rep << " mean " << v.mean_ok << '/' << v.mean_pairs << " (worst z "
                << format_number(v.worst_z) << ") variance " << v.var_ok << '/' << v.var_pairs
                << " (worst rel " << format_number(v.worst_var_rel) << ")";
        } else {
            rep << " (" << e.error << ")";
        }
        rep << '\n';
        res.entries.push_back(e);
    }
    rep << "overall: " << (res.pass ? "PASS" : "FAIL") << '\n';
    fs::create_directories(out_dir);
    auto f = open_out((fs::path(out_dir) / "verify_report.txt").string());
    f << rep.str();
    os << rep.str();
    return res;
}

VerifyResult run_verify(const ScenarioConfig& cfg, const std::string& out_dir,
                        std::uint64_t seed, std::ostream& os)
{
    const HumanSetup human = setup_human(cfg);
    return verify_runs(run_controllers(cfg, human, seed), human, cfg, seed, out_dir, os);
}

} // namespace hvroc
