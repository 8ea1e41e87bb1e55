#include "hvroc/hvroc_opt.hpp"
#include "hvroc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace hvroc {

void ObjectiveWeights::validate() const
{
    const double s[] = {s_highMidVar, s_lowMidVar, s_endVar, s_ref};
    bool any = false;
    for (double v : s) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidCost("objective weights must be finite and nonnegative");
        any = any || v > 0.0;
    }
    if (!any)
        throw InvalidCost("at least one objective weight must be positive");
}

Scalarization parse_scalarization(const std::string& s)
{
    if (s == "x-axis")
        return Scalarization::XAxis;
    if (s == "trace")
        return Scalarization::Trace;
    throw Error("unknown scalarization '" + s + "'");
}

std::string to_string(Scalarization s)
{
    return s == Scalarization::XAxis ? "x-axis" : "trace";
}

double scalar_variance(const Eigen::Matrix2d& cov, Scalarization s)
{
    return s == Scalarization::XAxis ? cov(0, 0) : 0.5 * cov.trace();
}

HumanBaseline make_baseline(const PlantModel& plant, const HumanPolicy& human,
                            const Eigen::Vector2d& p_ref, Scalarization scalarization)
{
    HumanBaseline b;
    b.trajectory = propagate_human_alone(plant, human);
    const int N = b.trajectory.N();
    b.mid = position_stats(b.trajectory, mid_index(N));
    b.end = position_stats(b.trajectory, N);
    b.p_ref = p_ref;
    b.end_error = (b.end.mean - p_ref).norm();
    if (p_ref.x() != 0.0)
        b.settling_x = settling_time(b.trajectory, 0, p_ref.x());
    if (p_ref.y() != 0.0)
        b.settling_y = settling_time(b.trajectory, 1, p_ref.y());
    b.scalarization = scalarization;
    return b;
}

double objective_from_moments(const MomentTrajectory& coupled, const HumanBaseline& baseline,
                              const ObjectiveWeights& w)
{
    const int N = coupled.N();
    const auto sc = baseline.scalarization;
    const PositionStats mid = position_stats(coupled, mid_index(N));
    const PositionStats end = position_stats(coupled, N);
    const double v_mid = scalar_variance(mid.cov, sc);
    const double v_end = scalar_variance(end.cov, sc);
    const double h_mid = scalar_variance(baseline.mid.cov, sc);
    const double h_end = scalar_variance(baseline.end.cov, sc);
    const double err = (end.mean - baseline.p_ref).norm();

    // Zero-weighted terms are skipped so degenerate baselines do not poison the sum.
    double J = 0.0;
    if (w.s_highMidVar > 0.0)
        J += w.s_highMidVar * (v_mid - h_mid) * (v_mid - h_mid);
    if (w.s_lowMidVar > 0.0)
        J += w.s_lowMidVar * (v_mid / h_mid) * (v_mid / h_mid);
    if (w.s_endVar > 0.0)
        J += w.s_endVar * (v_end / h_end) * (v_end / h_end);
    if (w.s_ref > 0.0)
        J += w.s_ref * (err / baseline.end_error) * (err / baseline.end_error);
    return J;
}

double evaluate_objective(const AutomationParams& params, const PlantModel& plant,
                          const HumanPolicy& human, const HumanBaseline& baseline,
                          const ObjectiveWeights& weights)
{
    weights.validate();
    const AutomationPolicy pol = design_automation(plant, params);
    return objective_from_moments(propagate_coupled(plant, human, pol), baseline, weights);
}

SimplexResult nelder_mead(const std::function<double(const Vec&)>& fun, const Vec& x0,
                          double step, int max_evals, double diameter_tol,
                          const std::function<void(const Vec&, double)>& on_best)
{
    const int d = static_cast<int>(x0.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    int evals = 0;
    double best = inf;
    auto f = [&](const Vec& x) {
        ++evals;
        double v = fun(x);
        if (!std::isfinite(v))
            v = inf;
        if (v < best) {
            best = v;
            if (on_best)
                on_best(x, v);
        }
        return v;
    };

    std::vector<Vec> pts(d + 1, x0);
    std::vector<double> fv(d + 1);
    fv[0] = f(x0);
    for (int i = 0; i < d; ++i) {
        pts[i + 1](i) += step;
        fv[i + 1] = f(pts[i + 1]);
    }
    std::vector<int> idx(d + 1);

    while (evals < max_evals) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        {
            std::vector<Vec> p2;
            std::vector<double> f2;
            for (int i : idx) {
                p2.push_back(pts[i]);
                f2.push_back(fv[i]);
            }
            pts.swap(p2);
            fv.swap(f2);
        }
        double diam = 0.0;
        for (int i = 1; i <= d; ++i)
            diam = std::max(diam, (pts[i] - pts[0]).norm());
        if (diam < diameter_tol)
            break;

        Vec centroid = Vec::Zero(d);
        for (int i = 0; i < d; ++i)
            centroid += pts[i];
        centroid /= d;

        const Vec xr = centroid + (centroid - pts[d]);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Vec xe = centroid + 2.0 * (centroid - pts[d]);
            const double fe = f(xe);
            if (fe < fr) {
                pts[d] = xe;
                fv[d] = fe;
            } else {
                pts[d] = xr;
                fv[d] = fr;
            }
            continue;
        }
        if (fr < fv[d - 1]) {
            pts[d] = xr;
            fv[d] = fr;
            continue;
        }
        const bool outside = fr < fv[d];
        const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid))
                               : Vec(centroid + 0.5 * (pts[d] - centroid));
        const double fc = f(xc);
        if (fc < (outside ? fr : fv[d])) {
            pts[d] = xc;
            fv[d] = fc;
            continue;
        }
        for (int i = 1; i <= d; ++i) {
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
            fv[i] = f(pts[i]);
        }
    }
    int b = 0;
    for (int i = 1; i <= d; ++i)
        if (fv[i] < fv[b])
            b = i;
    return {pts[b], fv[b], evals};
}

namespace {

AutomationParams decode(const Vec& theta, int m_A)
{
    AutomationParams p;
    const Vec c = theta.cwiseMax(-kLogClamp).cwiseMin(kLogClamp);
    p.q = c.head(kObservedDim).array().exp();
    p.r = c.tail(m_A).array().exp();
    return p;
}

Vec encode(const AutomationParams& p)
{
    Vec theta(p.q.size() + p.r.size());
    theta.head(p.q.size()) = p.q.cwiseMax(kLogFloor).array().log();
    theta.tail(p.r.size()) = p.r.array().log();
    return theta;
}

struct RestartOutcome {
    SimplexResult best;
    std::vector<TraceEntry> trace;
    int failed = 0;
};

} // namespace

OptimizationResult optimize(const PlantModel& plant, const HumanPolicy& human,
                            const HumanBaseline& baseline, const ObjectiveWeights& weights,
                            const AutomationParams& init, const OptimizeOptions& opts)
{
    weights.validate();
    init.validate(plant.m_A);
    if (opts.restarts < 1 || opts.max_evals < 1)
        throw Error("optimizer needs at least one restart and one evaluation");

    const int m_A = plant.m_A;
    const Vec theta0 = encode(init);
    const int dim = static_cast<int>(theta0.size());

    std::vector<Vec> starts(opts.restarts, theta0);
    const NormalStream rng(opts.seed, 0x5EED0F7u);
    for (int k = 1; k < opts.restarts; ++k)
        rng.normals(static_cast<std::uint32_t>(k), dim,
                    [&](int i, double z) { starts[k](i) += opts.restart_spread * z; });

    std::vector<RestartOutcome> out(opts.restarts);
    auto run = [&](int k) {
        RestartOutcome& o = out[k];
        auto fun = [&](const Vec& theta) {
            try {
                return evaluate_objective(decode(theta, m_A), plant, human, baseline, weights);
            } catch (const Error&) {
                ++o.failed;
                return std::numeric_limits<double>::infinity();
            }
        };
        auto record = [&](const Vec& theta, double J) {
            const AutomationParams p = decode(theta, m_A);
            o.trace.push_back({p.q, p.r, J});
        };
        o.best = nelder_mead(fun, starts[k], opts.initial_step, opts.max_evals,
                             opts.diameter_tol, record);
    };

    const int threads = std::max(1, std::min(opts.threads, opts.restarts));
    if (threads == 1) {
        for (int k = 0; k < opts.restarts; ++k)
            run(k);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (int k = w; k < opts.restarts; k += threads)
                    run(k);
            });
        for (auto& th : pool)
            th.join();
    }

    OptimizationResult res;
    int best = -1;
    double best_J = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.restarts; ++k) {
        res.evaluations += out[k].best.evaluations;
        res.failed_evaluations += out[k].failed;
        for (const auto& e : out[k].trace)
            if (res.trace.empty() || e.J < res.trace.back().J)
                res.trace.push_back(e);
        if (out[k].best.f < best_J) {
            best_J = out[k].best.f;
            best = k;
        }
    }
    if (best < 0)
        throw OptimizationFailed("all " + std::to_string(res.evaluations) +
                                 " objective evaluations failed or were non-finite");

    const AutomationParams star = decode(out[best].best.x, m_A);
    res.q_star = star.q;
    res.r_star = star.r;
    res.J_star = evaluate_objective(star, plant, human, baseline, weights);
    res.policy = design_automation(plant, star);
    return res;
}

} // namespace hvroc
