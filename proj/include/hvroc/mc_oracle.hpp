#pragma once

#include "hvroc/moments.hpp"

#include <cstdint>

namespace hvroc {

struct EnsembleStats {
    Layout layout = Layout::HumanAlone;
    int n_samples = 0;
    VecSeq means;        // N+1 stacked sample means
    MatSeq covs;         // N+1 stacked sample covariances (n_samples - 1 normalization)
    VecSeq stderr_mean;  // N+1 per-entry standard errors of the mean
};

struct SimulateOptions {
    int threads = 1;
};

// Trajectories are grouped into fixed blocks; block results merge in index order.
inline constexpr int kMcBlockSize = 512;

EnsembleStats simulate(const PlantModel& plant, const HumanPolicy& human,
                       const AutomationPolicy* automation, int n_samples, std::uint64_t seed,
                       const SimulateOptions& opts = {});

// Average realized cost of the human-alone loop.
double sample_cost(const PlantModel& plant, const CostSpec& cost, const HumanPolicy& human,
                   int n_samples, std::uint64_t seed, const SimulateOptions& opts = {});

struct OracleVerdict {
    bool pass = false;
    long mean_pairs = 0, mean_ok = 0;
    long var_pairs = 0, var_ok = 0;
    double worst_z = 0.0;
    double worst_var_rel = 0.0;
    double mean_fraction() const { return mean_pairs ? double(mean_ok) / mean_pairs : 1.0; }
    double var_fraction() const { return var_pairs ? double(var_ok) / var_pairs : 1.0; }
};

struct OracleTolerances {
    double z_max = 4.0;
    double var_rel = 0.05;
    double var_floor = 1e-9;
    double min_fraction = 0.99;
};

// Means within z_max standard errors and diagonal variances within var_rel relative
// (where the analytic value exceeds var_floor), each on at least min_fraction of pairs.
OracleVerdict compare_moments(const MomentTrajectory& analytic, const EnsembleStats& ens,
                              const OracleTolerances& tol = {});

} // namespace hvroc
