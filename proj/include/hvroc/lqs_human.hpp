#pragma once

#include "hvroc/model.hpp"

namespace hvroc {

struct HumanPolicy {
    MatSeq L;  // N gains, m_H x n
    MatSeq K;  // N gains, n x r_H
};

struct SolverReport {
    int iterations = 0;
    bool converged = false;
    double gain_delta = 0.0;
    double expected_cost = 0.0;
    bool regularized = false;  // lambda*I was added to some innovation matrix
};

struct ControlPassResult {
    MatSeq L;
    MatSeq Zx, Ze;          // cost-to-go matrices, t = 0..N
    std::vector<double> s;  // cost-to-go constants, t = 0..N
};

struct FilterPassResult {
    MatSeq K;
    MatSeq Pe;     // E[e e'], t = 0..N
    MatSeq Pxh;    // E[xh xh']
    MatSeq Pxhe;   // E[xh e']
    bool regularized = false;
};

struct LqsOptions {
    int max_iter = 500;
    double tol = 1e-9;
};

struct LqsSolution {
    HumanPolicy policy;
    SolverReport report;
};

inline constexpr double kInnovationRegularization = 1e-12;

ControlPassResult control_pass(const PlantModel& plant, const CostSpec& cost, const MatSeq& K_seq);
FilterPassResult filter_pass(const PlantModel& plant, const MatSeq& L_seq);

// Expected total cost from a control pass run with the filter gains that produced it.
double expected_cost(const PlantModel& plant, const ControlPassResult& cp);

LqsSolution solve_lqs(const PlantModel& plant, const CostSpec& cost, const LqsOptions& opts = {});

double max_abs_diff(const MatSeq& a, const MatSeq& b);

} // namespace hvroc
