#include "hvroc/moments.hpp"

#include <cmath>

namespace hvroc {

namespace {

void check_policy(const PlantModel& plant, const HumanPolicy& h, const AutomationPolicy* a)
{
    const auto N = static_cast<std::size_t>(plant.N);
    if (h.L.size() != N || h.K.size() != N)
        throw DimensionError("human policy length differs from horizon");
    for (std::size_t t = 0; t < N; ++t)
        if (h.L[t].rows() != plant.m_H || h.L[t].cols() != plant.n ||
            h.K[t].rows() != plant.n || h.K[t].cols() != plant.r_H)
            throw DimensionError("human gain has wrong shape");
    if (!a)
        return;
    if (a->L.size() != N || a->K.size() != N)
        throw DimensionError("automation policy length differs from horizon");
    for (std::size_t t = 0; t < N; ++t)
        if (a->L[t].rows() != plant.m_A || a->L[t].cols() != plant.n ||
            a->K[t].rows() != plant.n || a->K[t].cols() != plant.r_A)
            throw DimensionError("automation gain has wrong shape");
}

MomentTrajectory propagate(const PlantModel& plant, const HumanPolicy& human,
                           const AutomationPolicy* automation)
{
    plant.validate();
    check_policy(plant, human, automation);
    const int n = plant.n, N = plant.N;
    const int blocks = automation ? 3 : 2;
    const int dim = blocks * n;
    const Mat Oxi = plant.Omega_xi();
    const Mat Oom = plant.Omega_omega();

    MomentTrajectory tr;
    tr.layout = automation ? Layout::Coupled : Layout::HumanAlone;
    tr.n = n;
    tr.stacked_dim = dim;
    tr.means.resize(N + 1);
    tr.covs.resize(N + 1);

    Vec m(dim);
    for (int b = 0; b < blocks; ++b)
        m.segment(b * n, n) = plant.x0_mean;
    Mat S = Mat::Zero(dim, dim);
    S.topLeftCorner(n, n) = plant.Omega0;
    tr.means[0] = m;
    tr.covs[0] = S;

    for (int t = 0; t < N; ++t) {
        const Mat At = stacked_transition(plant, human, automation, t);
        const Mat& LH = human.L[t];
        const Mat& KH = human.K[t];

        Mat add_x = Oxi;
        if (!plant.C.empty()) {
            const Vec mh = m.segment(n, n);
            const Mat second = S.block(n, n, n, n) + mh * mh.transpose();
            const Mat u2 = LH * second * LH.transpose();
            for (const auto& C : plant.C)
                add_x += C * u2 * C.transpose();
        }
        Mat add_h = KH * Oom * KH.transpose();
        if (!plant.D.empty()) {
            const Vec mx = m.head(n);
            const Mat second = S.topLeftCorner(n, n) + mx * mx.transpose();
            for (const auto& D : plant.D)
                add_h += KH * D * second * D.transpose() * KH.transpose();
        }

        Mat Sn = At * S * At.transpose();
        Sn.topLeftCorner(n, n) += add_x;
        Sn.block(n, n, n, n) += add_h;
        m = At * m;
        S = symmetrize(Sn);
        tr.means[t + 1] = m;
        tr.covs[t + 1] = S;
    }
    return tr;
}

} // namespace

Mat stacked_transition(const PlantModel& plant, const HumanPolicy& human,
                       const AutomationPolicy* automation, int t)
{
    const int n = plant.n;
    const Mat& A = plant.A;
    const Mat BLH = plant.B_H * human.L[t];
    const Mat KHH = human.K[t] * plant.H_H;
    const int dim = (automation ? 3 : 2) * n;

    Mat At = Mat::Zero(dim, dim);
    At.block(0, 0, n, n) = A;
    At.block(0, n, n, n) = -BLH;
    At.block(n, 0, n, n) = KHH;
    At.block(n, n, n, n) = A - BLH - KHH;
    if (automation) {
        const Mat BLA = plant.B_A * automation->L[t];
        const Mat KHA = automation->K[t] * plant.H_A;
        At.block(0, 2 * n, n, n) = -BLA;
        At.block(2 * n, 0, n, n) = KHA;
        At.block(2 * n, 2 * n, n, n) = A - BLA - KHA;
    }
    return At;
}

MomentTrajectory propagate_human_alone(const PlantModel& plant, const HumanPolicy& human)
{
    return propagate(plant, human, nullptr);
}

MomentTrajectory propagate_coupled(const PlantModel& plant, const HumanPolicy& human,
                                   const AutomationPolicy& automation)
{
    return propagate(plant, human, &automation);
}

PositionStats position_stats(const MomentTrajectory& traj, int t)
{
    if (t < 0 || t > traj.N())
        throw std::out_of_range("time index " + std::to_string(t) + " outside [0, " +
                                std::to_string(traj.N()) + "]");
    if (traj.n < 2)
        throw DimensionError("state has no position block");
    PositionStats ps;
    ps.mean = traj.means[t].head<2>();
    ps.cov = traj.covs[t].topLeftCorner<2, 2>();
    return ps;
}

std::optional<int> settling_time(const MomentTrajectory& traj, int axis, double p_ref,
                                 double band_fraction)
{
    if (axis < 0 || axis > 1)
        throw std::out_of_range("axis must be 0 or 1");
    if (p_ref == 0.0 || !std::isfinite(p_ref))
        throw Error("settling band undefined for zero reference");
    const double band = band_fraction * std::abs(p_ref);
    std::optional<int> first;
    for (int t = traj.N(); t >= 0; --t) {
        if (!(std::abs(traj.means[t](axis) - p_ref) < band))
            break;
        first = t;
    }
    return first;
}

} // namespace hvroc
