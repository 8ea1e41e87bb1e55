#include "hvroc/lqs_human.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace hvroc {

double max_abs_diff(const MatSeq& a, const MatSeq& b)
{
    if (a.size() != b.size())
        throw DimensionError("gain schedules differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols())
            throw DimensionError("gain schedules differ in shape");
        if (a[i].size() > 0)
            d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
    }
    return d;
}

ControlPassResult control_pass(const PlantModel& plant, const CostSpec& cost, const MatSeq& K_seq)
{
    const int N = plant.N, n = plant.n;
    cost.validate(n, plant.m_H, N);
    if (static_cast<int>(K_seq.size()) != N)
        throw DimensionError("K schedule must have N entries");

    const Mat& A = plant.A;
    const Mat& B = plant.B_H;
    const Mat& H = plant.H_H;
    const Mat Oxi = plant.Omega_xi();
    const Mat Oom = plant.Omega_omega();

    ControlPassResult r;
    r.L.assign(N, Mat());
    r.Zx.assign(N + 1, Mat());
    r.Ze.assign(N + 1, Mat());
    r.s.assign(N + 1, 0.0);
    r.Zx[N] = cost.Q[N];
    r.Ze[N] = Mat::Zero(n, n);

    for (int t = N - 1; t >= 0; --t) {
        const Mat& Zx = r.Zx[t + 1];
        const Mat& Ze = r.Ze[t + 1];
        const Mat& K = K_seq[t];
        if (K.rows() != n || K.cols() != plant.r_H)
            throw DimensionError("K_t has wrong shape");

        Mat M = cost.R + B.transpose() * Zx * B;
        if (!plant.C.empty()) {
            const Mat Zs = Zx + Ze;
            for (const auto& C : plant.C)
                M += C.transpose() * Zs * C;
        }
        M = symmetrize(M);
        Eigen::LLT<Mat> llt(M);
        if (llt.info() != Eigen::Success)
            throw SolverDegenerate("control pass: inner matrix not positive definite", t);
        const Mat L = llt.solve(B.transpose() * Zx * A);

        Mat zx = cost.Q[t] + A.transpose() * Zx * (A - B * L);
        for (const auto& D : plant.D)
            zx += D.transpose() * K.transpose() * Ze * K * D;
        const Mat AKH = A - K * H;
        const Mat ze = A.transpose() * Zx * B * L + AKH.transpose() * Ze * AKH;

        r.s[t] = r.s[t + 1] + (Zx * Oxi).trace() + (Ze * (Oxi + K * Oom * K.transpose())).trace();
        r.L[t] = L;
        r.Zx[t] = symmetrize(zx);
        r.Ze[t] = symmetrize(ze);
    }
    return r;
}

double expected_cost(const PlantModel& plant, const ControlPassResult& cp)
{
    const Vec& m = plant.x0_mean;
    return m.dot(cp.Zx[0] * m) + ((cp.Zx[0] + cp.Ze[0]) * plant.Omega0).trace() + cp.s[0];
}

FilterPassResult filter_pass(const PlantModel& plant, const MatSeq& L_seq)
{
    const int N = plant.N, n = plant.n;
    if (static_cast<int>(L_seq.size()) != N)
        throw DimensionError("L schedule must have N entries");

    const Mat& A = plant.A;
    const Mat& B = plant.B_H;
    const Mat& H = plant.H_H;
    const Mat Oxi = plant.Omega_xi();
    const Mat Oom = plant.Omega_omega();
    const Mat I_r = Mat::Identity(plant.r_H, plant.r_H);

    FilterPassResult f;
    f.K.assign(N, Mat());
    f.Pe.assign(N + 1, Mat());
    f.Pxh.assign(N + 1, Mat());
    f.Pxhe.assign(N + 1, Mat());
    f.Pe[0] = plant.Omega0;
    f.Pxh[0] = plant.x0_mean * plant.x0_mean.transpose();
    f.Pxhe[0] = Mat::Zero(n, n);

    for (int t = 0; t < N; ++t) {
        const Mat& L = L_seq[t];
        if (L.rows() != plant.m_H || L.cols() != n)
            throw DimensionError("L_t has wrong shape");
        const Mat& Pe = f.Pe[t];
        const Mat& Pxh = f.Pxh[t];
        const Mat& Pxhe = f.Pxhe[t];

        Mat S = H * Pe * H.transpose() + Oom;
        if (!plant.D.empty()) {
            const Mat Pall = Pe + Pxh + Pxhe + Pxhe.transpose();
            for (const auto& D : plant.D)
                S += D * Pall * D.transpose();
        }
        S = symmetrize(S);
        Eigen::LLT<Mat> llt(S);
        if (llt.info() != Eigen::Success) {
            llt.compute(S + kInnovationRegularization * I_r);
            if (llt.info() != Eigen::Success)
                throw SolverDegenerate("filter pass: innovation matrix not positive definite", t);
            f.regularized = true;
        }
        // K = A Pe H' S^-1, solved as S K' = H Pe A'
        const Mat K = llt.solve(H * Pe * A.transpose()).transpose();

        const Mat ABL = A - B * L;
        const Mat AKH = A - K * H;
        Mat pe = Oxi + AKH * Pe * A.transpose();
        if (!plant.C.empty()) {
            const Mat LPL = L * Pxh * L.transpose();
            for (const auto& C : plant.C)
                pe += C * LPL * C.transpose();
        }
        const Mat cross = ABL * Pxhe * H.transpose() * K.transpose();
        const Mat pxh = K * H * Pe * A.transpose() + ABL * Pxh * ABL.transpose() + cross + cross.transpose();

        f.K[t] = K;
        f.Pe[t + 1] = symmetrize(pe);
        f.Pxh[t + 1] = symmetrize(pxh);
        f.Pxhe[t + 1] = ABL * Pxhe * AKH.transpose();
    }
    return f;
}

LqsSolution solve_lqs(const PlantModel& plant, const CostSpec& cost, const LqsOptions& opts)
{
    plant.validate();
    cost.validate(plant.n, plant.m_H, plant.N);
    if (opts.max_iter < 1 || !(opts.tol >= 0.0))
        throw Error("invalid solver options");

    MatSeq L(plant.N, Mat::Zero(plant.m_H, plant.n));
    FilterPassResult f = filter_pass(plant, L);
    bool regularized = f.regularized;
    MatSeq K = f.K;

    SolverReport rep;
    for (int it = 1; it <= opts.max_iter; ++it) {
        ControlPassResult cp = control_pass(plant, cost, K);
        f = filter_pass(plant, cp.L);
        regularized = regularized || f.regularized;
        const double delta = std::max(max_abs_diff(cp.L, L), max_abs_diff(f.K, K));
        L = std::move(cp.L);
        K = std::move(f.K);
        rep.iterations = it;
        rep.gain_delta = delta;
        if (!std::isfinite(delta))
            throw SolverDegenerate("fixed-point iteration diverged", 0);
        if (delta <= opts.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.regularized = regularized;
    rep.expected_cost = expected_cost(plant, control_pass(plant, cost, K));
    return {HumanPolicy{std::move(L), std::move(K)}, rep};
}

} // namespace hvroc
