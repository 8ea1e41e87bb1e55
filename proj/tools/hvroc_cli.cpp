// Command line front end: solve-human, optimize, simulate, report, verify, reproduce.
#include "hvroc/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace hvroc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSolver = 2, kVerify = 3 };

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> samples;
    std::string controllers;
};

void add_common(CLI::App* sub, Common& c, bool with_config = true)
{
    if (with_config)
        sub->add_option("--config", c.config, "scenario file (defaults to example 1)");
    sub->add_option("--seed", c.seed, "random seed (overrides config and environment)");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--samples", c.samples, "Monte-Carlo trajectories")->check(CLI::Range(2, 100000000));
    sub->add_option("--controllers", c.controllers,
                    "comma list of human-alone, hvroc-highvar, hvroc-lowvar, lqr-benchmark");
}

ScenarioConfig load(const Common& c, const std::string& text = {})
{
    ScenarioConfig cfg = !text.empty() ? parse_config(text)
                         : c.config.empty() ? parse_config("")
                                            : load_config(c.config);
    if (c.samples)
        cfg.mc_samples = *c.samples;
    if (!c.controllers.empty())
        cfg.controllers = parse_controller_list(c.controllers);
    if (!c.out.empty())
        cfg.output_dir = c.out;
    cfg.validate();
    return cfg;
}

void print_solver(const HumanSetup& h)
{
    const auto& r = h.solution.report;
    std::cout << "human solver: iterations " << r.iterations << ", converged "
              << (r.converged ? "yes" : "no") << ", gain delta " << format_number(r.gain_delta)
              << ", expected cost " << format_number(r.expected_cost)
              << (r.regularized ? ", innovation regularized" : "") << '\n';
}

int cmd_solve_human(const Common& c)
{
    const ScenarioConfig cfg = load(c);
    const HumanSetup h = setup_human(cfg);
    print_solver(h);
    const auto row = metrics_row("human-alone", h.baseline.trajectory, cfg.task.p_ref, 0);
    std::cout << "mid cov(p_x) " << format_number(row.cov_mid) << ", end cov(p_x) "
              << format_number(row.cov_end) << ", end error " << format_number(row.mean_err_end)
              << " m\n";
    fs::create_directories(cfg.output_dir);
    write_trajectory_csv((fs::path(cfg.output_dir) / "trajectory_human-alone.csv").string(),
                         h.baseline.trajectory);
    return kOk;
}

int cmd_optimize(Common c)
{
    if (c.controllers.empty())
        c.controllers = "hvroc-highvar,hvroc-lowvar";
    ScenarioConfig cfg = load(c);
    const std::uint64_t seed = resolve_seed(c.seed, cfg);
    const HumanSetup h = setup_human(cfg);
    std::vector<ControllerRun> runs;
    int status = kOk;
    for (const auto& label : cfg.controllers) {
        if (label.rfind("hvroc-", 0) != 0)
            continue;
        ControllerRun run = run_controller(cfg, h, label, seed);
        if (!run.ok) {
            std::cerr << label << " failed: " << run.error << '\n';
            status = kSolver;
            continue;
        }
        const auto& o = *run.optimization;
        std::cout << label << ": J* " << format_number(o.J_star) << " after " << o.evaluations
                  << " evaluations\n  q* =";
        for (Eigen::Index i = 0; i < o.q_star.size(); ++i)
            std::cout << ' ' << format_number(o.q_star(i));
        std::cout << "\n  r* =";
        for (Eigen::Index i = 0; i < o.r_star.size(); ++i)
            std::cout << ' ' << format_number(o.r_star(i));
        std::cout << '\n';
        runs.push_back(std::move(run));
    }
    if (runs.empty() && status == kOk) {
        std::cerr << "no hvroc controller selected\n";
        return kUsage;
    }
    write_report(runs, cfg, cfg.output_dir, std::cout);
    return status;
}

int cmd_simulate(const Common& c)
{
    const ScenarioConfig cfg = load(c);
    const std::uint64_t seed = resolve_seed(c.seed, cfg);
    const HumanSetup h = setup_human(cfg);
    fs::create_directories(cfg.output_dir);
    SimulateOptions so;
    so.threads = cfg.threads;
    int status = kOk;
    for (const auto& run : run_controllers(cfg, h, seed)) {
        if (!run.ok) {
            std::cerr << run.label << " failed: " << run.error << '\n';
            status = kSolver;
            continue;
        }
        const EnsembleStats ens = simulate(h.plant, h.solution.policy,
                                           run.coupled ? &run.automation : nullptr,
                                           cfg.mc_samples, seed, so);
        write_ensemble_csv((fs::path(cfg.output_dir) / ("ensemble_" + run.label + ".csv")).string(), ens);
        const int N = cfg.task.N;
        std::cout << run.label << ": sample cov(p_x) t=" << mid_index(N) << ' '
                  << format_number(ens.covs[mid_index(N)](0, 0)) << ", t=" << N << ' '
                  << format_number(ens.covs[N](0, 0)) << '\n';
    }
    return status;
}

int cmd_report(const Common& c)
{
    const ScenarioConfig cfg = load(c);
    const auto res = run_report(cfg, cfg.output_dir, resolve_seed(c.seed, cfg), std::cout);
    return res.all_ok ? kOk : kSolver;
}

int cmd_verify(const Common& c)
{
    const ScenarioConfig cfg = load(c);
    const auto res = run_verify(cfg, cfg.output_dir, resolve_seed(c.seed, cfg), std::cout);
    return res.pass ? kOk : kVerify;
}

int cmd_reproduce(const Common& c, const std::string& name)
{
    const ScenarioConfig cfg = load(c, bundled_config(name));
    const std::uint64_t seed = resolve_seed(c.seed, cfg);
    const HumanSetup h = setup_human(cfg);
    print_solver(h);
    const auto runs = run_controllers(cfg, h, seed);
    const auto rep = write_report(runs, cfg, cfg.output_dir, std::cout);
    const auto ver = verify_runs(runs, h, cfg, seed, cfg.output_dir, std::cout);
    if (!rep.all_ok)
        return kSolver;
    return ver.pass ? kOk : kVerify;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Automation synthesis against a stochastic human reaching model"};
    app.require_subcommand(1);

    Common solve_c, opt_c, sim_c, rep_c, ver_c, repro_c;
    std::string repro_name;
    auto* solve = app.add_subcommand("solve-human", "solve the human model and propagate its moments");
    add_common(solve, solve_c);
    auto* opt = app.add_subcommand("optimize", "tune automation cost weights");
    add_common(opt, opt_c);
    auto* sim = app.add_subcommand("simulate", "sample closed-loop trajectories");
    add_common(sim, sim_c);
    auto* rep = app.add_subcommand("report", "metrics table and trajectory files");
    add_common(rep, rep_c);
    auto* ver = app.add_subcommand("verify", "check analytic moments against sampled ones");
    add_common(ver, ver_c);
    auto* repro = app.add_subcommand("reproduce", "report and verify a bundled scenario");
    repro->add_option("scenario", repro_name, "example1 or example2")
        ->required()
        ->check(CLI::IsMember({"example1", "example2"}));
    add_common(repro, repro_c, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve)
            return cmd_solve_human(solve_c);
        if (*opt)
            return cmd_optimize(opt_c);
        if (*sim)
            return cmd_simulate(sim_c);
        if (*rep)
            return cmd_report(rep_c);
        if (*ver)
            return cmd_verify(ver_c);
        if (*repro)
            return cmd_reproduce(repro_c, repro_name);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
    return kUsage;
}
