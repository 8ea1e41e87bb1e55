#pragma once

#include "hvroc/model.hpp"

namespace hvroc {

struct AutomationParams {
    Vec q;  // 6 weights over the observed physical states
    Vec r;  // m_A input weights

    void validate(int m_A) const;
};

struct AutomationPolicy {
    MatSeq L;  // N gains, m_A x n
    MatSeq K;  // N gains, n x r_A

    // Gains that leave the automation inert: L = 0, K = 0.
    static AutomationPolicy zero(const PlantModel& plant);
};

inline constexpr double kPinvCutoff = 1e-12;

// Finite-horizon Riccati sweep for the automation input. Q_seq has N+1 entries.
MatSeq solve_lqr(const PlantModel& plant, const MatSeq& Q_seq, const Mat& R_A);

// Same sweep but returns the cost-to-go matrices as well (t = 0..N).
MatSeq solve_lqr(const PlantModel& plant, const MatSeq& Q_seq, const Mat& R_A, MatSeq* Z_out);

// Observer gains for the noise-free automation channel y_A = H_A x.
MatSeq solve_observer(const PlantModel& plant, const Mat& Omega0, MatSeq* P_out = nullptr);

// Moore-Penrose inverse of a symmetric PSD matrix, cutoff relative to the largest eigenvalue.
Mat pinv_psd(const Mat& S, double rel_cutoff = kPinvCutoff);

// Q_A at every t = 0..N from (q, 0, 0) and R_A = diag(r).
CostSpec automation_cost(const AutomationParams& params, int N);

AutomationPolicy design_automation(const PlantModel& plant, const AutomationParams& params);

// Benchmark: LQR on the full 8 physical weights with a classical observer.
AutomationPolicy lqr_benchmark(const PlantModel& plant, const Eigen::Ref<const Vec>& q8,
                               const Eigen::Ref<const Vec>& r);

} // namespace hvroc
