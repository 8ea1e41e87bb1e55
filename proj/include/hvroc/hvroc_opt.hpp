#pragma once

#include "hvroc/moments.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace hvroc {

struct ObjectiveWeights {
    double s_highMidVar = 0.0;
    double s_lowMidVar = 0.0;
    double s_endVar = 0.0;
    double s_ref = 0.0;

    void validate() const;

    static ObjectiveWeights highvar() { return {1.0, 1.0, 10.0, 0.0}; }
    static ObjectiveWeights lowvar() { return {1.0, 1.0, 0.0, 1.0}; }
};

enum class Scalarization { XAxis, Trace };

Scalarization parse_scalarization(const std::string& s);
std::string to_string(Scalarization s);

// x-axis: cov(p_x); trace: trace/2.
double scalar_variance(const Eigen::Matrix2d& cov, Scalarization s);

struct HumanBaseline {
    MomentTrajectory trajectory;
    PositionStats mid;
    PositionStats end;
    Eigen::Vector2d p_ref;
    double end_error = 0.0;  // Euclidean
    std::optional<int> settling_x, settling_y;
    Scalarization scalarization = Scalarization::XAxis;
};

HumanBaseline make_baseline(const PlantModel& plant, const HumanPolicy& human,
                            const Eigen::Vector2d& p_ref,
                            Scalarization scalarization = Scalarization::XAxis);

double evaluate_objective(const AutomationParams& params, const PlantModel& plant,
                          const HumanPolicy& human, const HumanBaseline& baseline,
                          const ObjectiveWeights& weights);

// Objective value of already-propagated coupled moments.
double objective_from_moments(const MomentTrajectory& coupled, const HumanBaseline& baseline,
                              const ObjectiveWeights& weights);

struct OptimizeOptions {
    int max_evals = 2000;  // per restart
    int restarts = 3;
    std::uint64_t seed = 0;
    double diameter_tol = 1e-6;
    double initial_step = 1.0;       // simplex edge in log space
    double restart_spread = 1.0;     // std dev of log-space perturbations
    int threads = 1;
};

struct TraceEntry {
    Vec q, r;
    double J;
};

struct OptimizationResult {
    Vec q_star, r_star;
    double J_star = 0.0;
    int evaluations = 0;
    int failed_evaluations = 0;
    std::vector<TraceEntry> trace;
    AutomationPolicy policy;
};

inline constexpr double kLogFloor = 1e-12;
inline constexpr double kLogClamp = 700.0;

// Nelder-Mead minimizer on R^d; non-finite values count as +inf.
struct SimplexResult {
    Vec x;
    double f;
    int evaluations;
};
SimplexResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                          double step, int max_evals, double diameter_tol,
                          const std::function<void(const Vec&, double)>& on_best = {});

OptimizationResult optimize(const PlantModel& plant, const HumanPolicy& human,
                            const HumanBaseline& baseline, const ObjectiveWeights& weights,
                            const AutomationParams& init, const OptimizeOptions& opts = {});

} // namespace hvroc
