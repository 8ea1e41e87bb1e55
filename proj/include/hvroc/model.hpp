#pragma once

#include "hvroc/types.hpp"

namespace hvroc {

// Index layout of the augmented reaching state.
enum StateIndex : int {
    kPx = 0, kPy = 1,
    kVx = 2, kVy = 3,
    kFx = 4, kFy = 5,
    kGx = 6, kGy = 7,
    kRefX = 8, kRefY = 9,
    kReachDim = 10,
    kObservedDim = 6
};

struct PlantModel {
    int n = 0;
    int m_H = 0, m_A = 0;
    int r_H = 0, r_A = 0;
    Mat A, B_H, B_A;
    Mat H_H, H_A;
    MatSeq C;              // each n x m_H, multiplies u_H
    MatSeq D;              // each r_H x n, multiplies x
    Mat Sigma_xi;          // n x p
    Mat Sigma_omega;       // r_H x q
    Vec x0_mean;
    Mat Omega0;
    int N = 0;
    double dt = 0.0;

    // Throws DimensionError / InvalidTask on inconsistent data.
    void validate() const;

    Mat Omega_xi() const { return Sigma_xi * Sigma_xi.transpose(); }
    Mat Omega_omega() const { return Sigma_omega * Sigma_omega.transpose(); }
};

// Fills the dimension fields from the matrices and validates.
PlantModel finalize_plant(PlantModel p);

struct ReachTask {
    double mass = 1.0;
    double dt = 0.01;
    double tau1 = 0.04;
    double tau2 = 0.04;
    double sigma_u = 0.5;
    Eigen::Matrix<double, 6, 1> sigma_omega_diag =
        (Eigen::Matrix<double, 6, 1>() << 0.02, 0.02, 0.2, 0.2, 1.0, 1.0).finished();
    Eigen::Vector2d p0 = Eigen::Vector2d::Zero();
    Eigen::Vector2d p_ref = Eigen::Vector2d::Constant(0.1);
    int N = 42;

    void validate() const;
};

struct CostSpec {
    MatSeq Q;  // N+1 entries, t = 0..N
    Mat R;

    void validate(int n, int m, int N) const;
};

PlantModel build_point_mass_plant(const ReachTask& task);

// weights: (q_px, q_py, q_vx, q_vy, q_fx, q_fy, q_gx, q_gy).
MatSeq materialize_reference_cost(const Eigen::Ref<const Vec>& weights,
                                  bool terminal_only, int N);

// Single augmented penalty matrix built from the 8 weights.
Mat reference_cost_matrix(const Eigen::Ref<const Vec>& weights);

} // namespace hvroc
