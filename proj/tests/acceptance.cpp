// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace hvroc;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Gate {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [miss] " << what << ';';
        } else {
            detail << ' ' << what << ';';
        }
    }
};

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

std::string num(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

std::string opt_text(const std::optional<int>& s) { return s ? std::to_string(*s) : "none"; }

int failures = 0;

void report(int id, const std::string& title, const Gate& g)
{
    std::cout << (g.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << title << " |"
              << g.detail.str() << std::endl;
    if (!g.pass)
        ++failures;
}

struct Scenario {
    ScenarioConfig cfg;
    HumanSetup human;
    double human_seconds = 0.0;
    std::map<std::string, ControllerRun> runs;
    std::map<std::string, double> opt_seconds;
};

Scenario make_scenario(const std::string& name)
{
    Scenario s;
    s.cfg = example(name);
    const auto t0 = Clock::now();
    s.human = setup_human(s.cfg);
    s.human_seconds = seconds_since(t0);
    for (const auto& label : kControllerLabels) {
        const auto t1 = Clock::now();
        s.runs[label] = run_controller(s.cfg, s.human, label, 7);
        s.opt_seconds[label] = seconds_since(t1);
    }
    return s;
}

const MetricsRow& xrow(const Scenario& s, const std::string& label) { return s.runs.at(label).rows[0]; }

double end_mean(const Scenario& s, const std::string& label)
{
    const auto& tr = s.runs.at(label).trajectory;
    return tr.means[tr.N()](0);
}

void criterion_human(int id, const Scenario& s, double mid, double end, double err, double err_tol,
                     int settle, int settle_tol, std::optional<double> end_pos)
{
    Gate g;
    const auto& r = xrow(s, "human-alone");
    if (end_pos)
        g.check(std::abs(end_mean(s, "human-alone") - *end_pos) <= 0.001,
                "E p_x,N " + num(end_mean(s, "human-alone")) + " vs " + num(*end_pos) + " +-0.001");
    g.check(within_rel(r.cov_mid, mid, 0.15), "cov mid " + num(r.cov_mid) + " vs " + num(mid) + " +-15%");
    g.check(within_rel(r.cov_end, end, 0.15), "cov end " + num(r.cov_end) + " vs " + num(end) + " +-15%");
    if (!end_pos)
        g.check(within_rel(r.mean_err_end, err, err_tol),
                "err " + num(r.mean_err_end) + " vs " + num(err) + " +-" + num(err_tol * 100) + "%");
    g.check(r.settling_t && std::abs(*r.settling_t - settle) <= settle_tol,
            "settling " + opt_text(r.settling_t) + " vs " + std::to_string(settle) + "+-" + std::to_string(settle_tol));
    if (id == 1)
        g.check(s.human_seconds < 5.0, "runtime " + num(s.human_seconds) + " s < 5 s");
    report(id, id == 1 ? "human-alone, example 1" : "human-alone, example 2", g);
}

} // namespace

int main()
{
    std::cout << "acceptance gate: building scenarios (optimizer seed 7)" << std::endl;
    const Scenario e1 = make_scenario("example1");
    const Scenario e2 = make_scenario("example2");
    for (const Scenario* s : {&e1, &e2})
        for (const auto& [label, run] : s->runs)
            if (!run.ok)
                std::cout << "controller " << label << " failed: " << run.error << std::endl;

    // 1, 2: human-alone
    criterion_human(1, e1, 2.8e-5, 12.1e-6, 0.0, 0.0, 37, 2, 0.0979);
    criterion_human(2, e2, 16.6e-5, 1.9e-6, 15.0e-3, 0.20, 78, 3, std::nullopt);

    // 3: LQR benchmark with the human
    {
        Gate g;
        const auto& a = xrow(e1, "lqr-benchmark");
        const auto& b = xrow(e2, "lqr-benchmark");
        g.check(within_rel(a.mean_err_end, 5.6e-3, 0.20), "ex1 err " + num(a.mean_err_end) + " vs 5.6e-3 +-20%");
        g.check(!a.settling_t, "ex1 settling " + opt_text(a.settling_t) + " vs none");
        g.check(within_rel(b.mean_err_end, 11.0e-3, 0.25), "ex2 err " + num(b.mean_err_end) + " vs 11.0e-3 +-25%");
        g.check(b.settling_t && std::abs(*b.settling_t - 76) <= 4, "ex2 settling " + opt_text(b.settling_t) + " vs 76+-4");
        report(3, "LQR benchmark with human", g);
    }

    // 4: optimized automation, relational bands
    {
        Gate g;
        for (const Scenario* s : {&e1, &e2}) {
            const bool ex1 = s == &e1;
            const std::string tag = ex1 ? "ex1 " : "ex2 ";
            const auto& h = xrow(*s, "human-alone");
            for (const std::string label : {"hvroc-highvar", "hvroc-lowvar"}) {
                const auto& run = s->runs.at(label);
                const std::string t = tag + label.substr(6) + " ";
                if (!run.ok) {
                    g.check(false, t + "failed: " + run.error);
                    continue;
                }
                const auto& r = run.rows[0];
                g.check(r.mean_err_end <= 1.0e-3, t + "err " + num(r.mean_err_end) + " <= 1e-3");
                g.check(s->opt_seconds.at(label) < 180.0, t + "time " + num(s->opt_seconds.at(label)) + " s < 180 s");
                if (ex1) {
                    g.check(r.cov_end <= h.cov_end, t + "end cov " + num(r.cov_end) + " <= human " + num(h.cov_end));
                    g.check(r.settling_t && *r.settling_t <= 35, t + "settling " + opt_text(r.settling_t) + " <= 35");
                    if (label == "hvroc-lowvar")
                        g.check(r.cov_mid <= 0.9 * h.cov_mid, t + "mid cov " + num(r.cov_mid) + " <= 0.9*" + num(h.cov_mid));
                } else {
                    g.check(r.cov_end <= 0.6 * h.cov_end, t + "end cov " + num(r.cov_end) + " <= 0.6*" + num(h.cov_end));
                    if (label == "hvroc-lowvar")
                        g.check(r.cov_mid <= 0.6 * h.cov_mid, t + "mid cov " + num(r.cov_mid) + " <= 0.6*" + num(h.cov_mid));
                }
            }
        }
        report(4, "optimized automation bands", g);
    }

    // 5: goal inequalities at the optimum
    {
        Gate g;
        for (const Scenario* s : {&e1, &e2}) {
            const std::string tag = s == &e1 ? "ex1 " : "ex2 ";
            const auto& h = xrow(*s, "human-alone");
            for (const std::string label : {"hvroc-highvar", "hvroc-lowvar"}) {
                const auto& run = s->runs.at(label);
                const std::string t = tag + label.substr(6) + " ";
                if (!run.ok) {
                    g.check(false, t + "failed");
                    continue;
                }
                const auto& r = run.rows[0];
                g.check(r.cov_end <= h.cov_end, t + "goal 2 end cov " + num(r.cov_end) + " <= " + num(h.cov_end));
                g.check(r.mean_err_end <= h.mean_err_end, t + "goal 3 err " + num(r.mean_err_end) + " <= " + num(h.mean_err_end));
                if (label == "hvroc-highvar")
                    g.check(within_rel(r.cov_mid, h.cov_mid, 0.30), t + "goal 1a mid " + num(r.cov_mid) + " within 30% of " + num(h.cov_mid));
                else
                    g.check(r.cov_mid < h.cov_mid, t + "goal 1b mid " + num(r.cov_mid) + " < " + num(h.cov_mid));
            }
        }
        report(5, "goal properties at the optimum", g);
    }

    // 6: Monte-Carlo oracle
    {
        Gate g;
        for (const Scenario* s : {&e1, &e2}) {
            const std::string tag = s == &e1 ? "ex1 " : "ex2 ";
            const auto t0 = Clock::now();
            for (const auto& label : kControllerLabels) {
                const auto& run = s->runs.at(label);
                if (!run.ok) {
                    g.check(false, tag + label + " unavailable");
                    continue;
                }
                const EnsembleStats ens = simulate(s->human.plant, s->human.solution.policy,
                                                   run.coupled ? &run.automation : nullptr, 20000, 7);
                const OracleVerdict v = compare_moments(run.trajectory, ens);
                g.check(v.pass, tag + label + " mean " + num(100 * v.mean_fraction()) + "% var " +
                                    num(100 * v.var_fraction()) + "%");
            }
            const double sec = seconds_since(t0);
            g.check(sec < 120.0, tag + "time " + num(sec) + " s < 120 s");
        }
        report(6, "oracle equivalence (20000 trajectories)", g);
    }

    // 7 and part of 9: zero-automation reduction on random plants
    double fuzz_min_eig = 0.0;
    {
        Gate g;
        std::mt19937_64 rng(2024);
        double worst = 0.0;
        int solved = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const int n = 2 + rep % 6, mH = 1 + rep % 2, rH = 1 + rep % 3, N = 10 + rep % 15;
            const PlantModel p = random_plant(rng, n, mH, 1 + rep % 3, rH, N, rep % 3, (rep / 3) % 3);
            const auto sol = solve_lqs(p, random_cost(rng, n, mH, N));
            solved += sol.report.converged;
            const auto ha = propagate_human_alone(p, sol.policy);
            const auto co = propagate_coupled(p, sol.policy, AutomationPolicy::zero(p));
            for (int t = 0; t <= N; ++t) {
                const double sc = std::max(1.0, ha.covs[t].cwiseAbs().maxCoeff());
                worst = std::max(worst, (co.covs[t].topLeftCorner(2 * n, 2 * n) - ha.covs[t]).cwiseAbs().maxCoeff() / sc);
                const double sm = std::max(1.0, ha.means[t].cwiseAbs().maxCoeff());
                worst = std::max(worst, (co.means[t].head(2 * n) - ha.means[t]).cwiseAbs().maxCoeff() / sm);
                fuzz_min_eig = std::min({fuzz_min_eig, min_eigenvalue(ha.covs[t]), min_eigenvalue(co.covs[t])});
            }
        }
        g.check(worst <= 1e-12, "max blockwise deviation " + num(worst) + " <= 1e-12 over 100 plants");
        g.detail << " (" << solved << "/100 human solves converged)";
        report(7, "zero-automation reduction", g);
    }

    // 8: certainty equivalence
    {
        Gate g;
        std::mt19937_64 rng(77);
        double worst_L = 0.0, worst_K = 0.0, invariance = 0.0;
        for (int rep = 0; rep < 25; ++rep) {
            const int n = 2 + rep % 5, m = 1 + rep % 2, r = 1 + rep % 3, N = 8 + rep;
            const PlantModel p = random_plant(rng, n, m, 1, r, N, 0, 0);
            const CostSpec c = random_cost(rng, n, m, N);
            const auto sol = solve_lqs(p, c);
            worst_L = std::max(worst_L, max_rel_diff(sol.policy.L, classical_lqr(p.A, p.B_H, c.Q, c.R)));
            worst_K = std::max(worst_K, max_rel_diff(sol.policy.K, classical_kalman(p.A, p.H_H, p.Omega_xi(),
                                                                                      p.Omega_omega(), p.Omega0, N)));
            PlantModel q = p;
            q.Sigma_omega *= 1.7;
            q.Sigma_xi *= 0.3;
            q.Omega0 *= 2.5;
            invariance = std::max(invariance, max_abs_diff(solve_lqs(q, c).policy.L, sol.policy.L));
        }
        g.check(worst_L <= 1e-12, "L vs classical LQR " + num(worst_L));
        g.check(worst_K <= 1e-12, "K vs classical Kalman " + num(worst_K));
        g.check(invariance == 0.0, "L change under noise rescaling " + num(invariance));
        report(8, "certainty equivalence", g);
    }

    // 9: PSD suite
    {
        Gate g;
        double worst = fuzz_min_eig;
        for (const Scenario* s : {&e1, &e2})
            for (const auto& [label, run] : s->runs)
                if (run.ok)
                    for (const auto& S : run.trajectory.covs)
                        worst = std::min(worst, min_eigenvalue(S));
        g.check(worst >= -1e-9, "min eigenvalue " + num(worst) + " >= -1e-9");
        report(9, "PSD of propagated covariances", g);
    }

    // 10: CLI determinism
    {
        Gate g;
#ifdef HVROC_CLI_PATH
        const fs::path base = fs::temp_directory_path() / "hvroc_acceptance_determinism";
        fs::remove_all(base);
        int codes[2];
        for (int i = 0; i < 2; ++i) {
            const std::string cmd = std::string("\"") + HVROC_CLI_PATH + "\" reproduce example1 --seed 7 --out \"" +
                                    (base / std::to_string(i)).string() + "\" > /dev/null 2>&1";
            const int rc = std::system(cmd.c_str());
            codes[i] = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        }
        g.check(codes[0] == codes[1] && (codes[0] == 0 || codes[0] == 3),
                "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]));
        int files = 0;
        bool identical = true;
        for (const auto& e : fs::directory_iterator(base / "0")) {
            if (e.path().extension() != ".csv")
                continue;
            ++files;
            auto read = [](const fs::path& p) {
                std::ifstream f(p, std::ios::binary);
                std::ostringstream s;
                s << f.rdbuf();
                return s.str();
            };
            const fs::path other = base / "1" / e.path().filename();
            identical = identical && fs::exists(other) && read(e.path()) == read(other);
        }
        g.check(files >= 5 && identical, std::to_string(files) + " CSV files byte-identical");
        fs::remove_all(base);
#else
        g.check(false, "CLI not built");
#endif
        report(10, "reproduce example1 determinism", g);
    }

    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : "acceptance: all criteria passed")
              << std::endl;
    return failures ? 1 : 0;
}
