#include "hvroc/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace hvroc {

double min_eigenvalue(const Mat& m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

namespace {

void expect_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const char* name)
{
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << " has shape " << m.rows() << "x" << m.cols()
           << ", expected " << rows << "x" << cols;
        throw DimensionError(os.str());
    }
}

} // namespace

void PlantModel::validate() const
{
    if (n <= 0)
        throw DimensionError("state dimension must be positive");
    expect_shape(A, n, n, "A");
    expect_shape(B_H, n, m_H, "B_H");
    expect_shape(B_A, n, m_A, "B_A");
    expect_shape(H_H, r_H, n, "H_H");
    expect_shape(H_A, r_A, n, "H_A");
    for (const auto& c : C)
        expect_shape(c, n, m_H, "C_i");
    for (const auto& d : D)
        expect_shape(d, r_H, n, "D_i");
    if (Sigma_xi.rows() != n)
        throw DimensionError("Sigma_xi must have n rows");
    if (Sigma_omega.rows() != r_H)
        throw DimensionError("Sigma_omega must have r_H rows");
    if (x0_mean.size() != n)
        throw DimensionError("x0_mean must have n entries");
    expect_shape(Omega0, n, n, "Omega0");
    if ((Omega0 - Omega0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Omega0.cwiseAbs().maxCoeff()))
        throw InvalidTask("Omega0 is not symmetric");
    if (min_eigenvalue(Omega0) < -1e-10)
        throw InvalidTask("Omega0 is not positive semidefinite");
    if (N < 1)
        throw InvalidTask("horizon N must be at least 1");
    if (!A.allFinite() || !B_H.allFinite() || !B_A.allFinite())
        throw InvalidTask("plant matrices contain non-finite entries");
}

PlantModel finalize_plant(PlantModel p)
{
    p.n = static_cast<int>(p.A.rows());
    p.m_H = static_cast<int>(p.B_H.cols());
    p.m_A = static_cast<int>(p.B_A.cols());
    p.r_H = static_cast<int>(p.H_H.rows());
    p.r_A = static_cast<int>(p.H_A.rows());
    if (p.Sigma_xi.rows() == 0)
        p.Sigma_xi = Mat::Zero(p.n, 0);
    if (p.Sigma_omega.rows() == 0)
        p.Sigma_omega = Mat::Zero(p.r_H, 0);
    if (p.Omega0.size() == 0)
        p.Omega0 = Mat::Zero(p.n, p.n);
    p.validate();
    return p;
}

void ReachTask::validate() const
{
    if (!(mass > 0.0))
        throw InvalidTask("mass must be positive");
    if (!(dt > 0.0))
        throw InvalidTask("dt must be positive");
    if (!(tau1 > 0.0) || !(tau2 > 0.0))
        throw InvalidTask("tau1 and tau2 must be positive");
    if (!(sigma_u >= 0.0))
        throw InvalidTask("sigma_u must be nonnegative");
    if (!(sigma_omega_diag.array() >= 0.0).all())
        throw InvalidTask("sigma_omega entries must be nonnegative");
    if (N < 2)
        throw InvalidTask("N must be at least 2");
    if (!p0.allFinite() || !p_ref.allFinite())
        throw InvalidTask("positions must be finite");
}

void CostSpec::validate(int n, int m, int N) const
{
    if (static_cast<int>(Q.size()) != N + 1)
        throw DimensionError("Q sequence must have N+1 entries");
    for (const auto& q : Q) {
        expect_shape(q, n, n, "Q_t");
        if (min_eigenvalue(q) < -1e-10)
            throw InvalidCost("Q_t is not positive semidefinite");
    }
    expect_shape(R, m, m, "R");
    if (!(min_eigenvalue(R) > 0.0))
        throw InvalidCost("R is not positive definite");
}

PlantModel build_point_mass_plant(const ReachTask& task)
{
    task.validate();
    const int n = kReachDim;
    const double dt = task.dt;
    PlantModel p;
    p.A = Mat::Identity(n, n);
    p.B_H = Mat::Zero(n, 2);
    p.B_A = Mat::Zero(n, 2);
    for (int ax = 0; ax < 2; ++ax) {
        const int pi = kPx + ax, vi = kVx + ax, fi = kFx + ax, gi = kGx + ax;
        p.A(pi, vi) = dt;
        p.A(vi, fi) = dt / task.mass;
        p.A(fi, fi) = 1.0 - dt / task.tau2;
        p.A(fi, gi) = dt / task.tau2;
        p.A(gi, gi) = 1.0 - dt / task.tau1;
        p.B_H(gi, ax) = dt / task.tau1;
        p.B_A(fi, ax) = 1.0;
    }
    p.H_H = Mat::Zero(kObservedDim, n);
    p.H_H.leftCols(kObservedDim).setIdentity();
    p.H_A = p.H_H;

    Mat rot(2, 2);
    rot << 0.0, 1.0,
          -1.0, 0.0;
    p.C = {task.sigma_u * p.B_H, task.sigma_u * p.B_H * rot};
    p.Sigma_xi = Mat::Zero(n, 0);
    p.Sigma_omega = task.sigma_omega_diag.asDiagonal();

    p.x0_mean = Vec::Zero(n);
    p.x0_mean(kPx) = task.p0.x();
    p.x0_mean(kPy) = task.p0.y();
    p.x0_mean(kRefX) = task.p_ref.x();
    p.x0_mean(kRefY) = task.p_ref.y();
    p.Omega0 = Mat::Zero(n, n);
    p.N = task.N;
    p.dt = dt;
    return finalize_plant(std::move(p));
}

Mat reference_cost_matrix(const Eigen::Ref<const Vec>& weights)
{
    if (weights.size() != 8)
        throw DimensionError("reference cost needs 8 weights");
    if (!weights.allFinite() || (weights.array() < 0.0).any())
        throw InvalidCost("cost weights must be finite and nonnegative");
    Mat Q = Mat::Zero(kReachDim, kReachDim);
    for (int i = 0; i < 8; ++i)
        Q(i, i) = weights(i);
    for (int ax = 0; ax < 2; ++ax) {
        const int pi = kPx + ax, ri = kRefX + ax;
        const double q = weights(pi);
        Q(ri, ri) = q;
        Q(pi, ri) = -q;
        Q(ri, pi) = -q;
    }
    return Q;
}

MatSeq materialize_reference_cost(const Eigen::Ref<const Vec>& weights, bool terminal_only, int N)
{
    if (N < 1)
        throw InvalidCost("horizon must be positive");
    const Mat Q = reference_cost_matrix(weights);
    MatSeq seq(N + 1, terminal_only ? Mat::Zero(kReachDim, kReachDim) : Q);
    seq[N] = Q;
    return seq;
}

} // namespace hvroc
