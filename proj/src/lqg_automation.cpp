#include "hvroc/lqg_automation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace hvroc {

void AutomationParams::validate(int m_A) const
{
    if (q.size() != kObservedDim)
        throw DimensionError("automation q must have 6 entries");
    if (r.size() != m_A)
        throw DimensionError("automation r must have m_A entries");
    if (!q.allFinite() || (q.array() < 0.0).any())
        throw InvalidCost("automation q must be finite and nonnegative");
    if (!r.allFinite() || (r.array() <= 0.0).any())
        throw InvalidCost("automation r must be finite and positive");
}

AutomationPolicy AutomationPolicy::zero(const PlantModel& plant)
{
    return {MatSeq(plant.N, Mat::Zero(plant.m_A, plant.n)),
            MatSeq(plant.N, Mat::Zero(plant.n, plant.r_A))};
}

MatSeq solve_lqr(const PlantModel& plant, const MatSeq& Q_seq, const Mat& R_A)
{
    return solve_lqr(plant, Q_seq, R_A, nullptr);
}

MatSeq solve_lqr(const PlantModel& plant, const MatSeq& Q_seq, const Mat& R_A, MatSeq* Z_out)
{
    const int N = plant.N;
    CostSpec{Q_seq, R_A}.validate(plant.n, plant.m_A, N);
    const Mat& A = plant.A;
    const Mat& B = plant.B_A;

    MatSeq L(N);
    Mat Z = Q_seq[N];
    if (Z_out) {
        Z_out->assign(N + 1, Mat());
        (*Z_out)[N] = Z;
    }
    for (int t = N - 1; t >= 0; --t) {
        const Mat M = symmetrize(R_A + B.transpose() * Z * B);
        Eigen::LLT<Mat> llt(M);
        if (llt.info() != Eigen::Success)
            throw SolverDegenerate("lqr: R_A + B_A' Z B_A not positive definite", t);
        L[t] = llt.solve(B.transpose() * Z * A);
        Z = symmetrize(Q_seq[t] + A.transpose() * Z * (A - B * L[t]));
        if (Z_out)
            (*Z_out)[t] = Z;
    }
    return L;
}

Mat pinv_psd(const Mat& S, double rel_cutoff)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(S));
    const Vec& ev = es.eigenvalues();
    const double top = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    Vec inv = Vec::Zero(ev.size());
    if (top > 0.0) {
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) > rel_cutoff * top)
                inv(i) = 1.0 / ev(i);
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

MatSeq solve_observer(const PlantModel& plant, const Mat& Omega0, MatSeq* P_out)
{
    const int N = plant.N;
    const Mat& A = plant.A;
    const Mat& H = plant.H_A;
    const Mat Oxi = plant.Omega_xi();
    if (Omega0.rows() != plant.n || Omega0.cols() != plant.n)
        throw DimensionError("Omega0 has wrong shape");

    MatSeq K(N);
    Mat P = Omega0;
    if (P_out) {
        P_out->assign(N + 1, Mat());
        (*P_out)[0] = P;
    }
    for (int t = 0; t < N; ++t) {
        K[t] = A * P * H.transpose() * pinv_psd(H * P * H.transpose());
        P = symmetrize((A - K[t] * H) * P * A.transpose() + Oxi);
        if (P_out)
            (*P_out)[t + 1] = P;
    }
    return K;
}

CostSpec automation_cost(const AutomationParams& params, int N)
{
    Vec w = Vec::Zero(8);
    w.head(kObservedDim) = params.q;
    return {materialize_reference_cost(w, false, N), Mat(params.r.asDiagonal())};
}

AutomationPolicy design_automation(const PlantModel& plant, const AutomationParams& params)
{
    if (plant.n != kReachDim)
        throw DimensionError("automation cost layout requires the 10-state reaching plant");
    params.validate(plant.m_A);
    const CostSpec c = automation_cost(params, plant.N);
    return {solve_lqr(plant, c.Q, c.R), solve_observer(plant, plant.Omega0)};
}

AutomationPolicy lqr_benchmark(const PlantModel& plant, const Eigen::Ref<const Vec>& q8,
                               const Eigen::Ref<const Vec>& r)
{
    if (plant.n != kReachDim)
        throw DimensionError("benchmark cost layout requires the 10-state reaching plant");
    if (r.size() != plant.m_A || (r.array() <= 0.0).any())
        throw InvalidCost("benchmark r must have m_A positive entries");
    MatSeq Q = materialize_reference_cost(q8, false, plant.N);
    Q[0].setZero();  // x_0 is fixed, only t = 1..N are penalized
    return {solve_lqr(plant, Q, Mat(r.asDiagonal())), solve_observer(plant, plant.Omega0)};
}

} // namespace hvroc
