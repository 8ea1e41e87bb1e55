#include "hvroc/mc_oracle.hpp"
#include "hvroc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <sstream>
#include <thread>

namespace hvroc {

namespace {

constexpr std::uint32_t kInitialStep = 0xFFFFFFFFu;
constexpr int kWaveBlocks = 16;

// Per-step Welford accumulators for one block of trajectories.
struct Accumulator {
    long count = 0;
    VecSeq mean;
    MatSeq m2;  // lower triangle only until finalized

    Accumulator(int steps, int dim)
        : mean(steps, Vec::Zero(dim)), m2(steps, Mat::Zero(dim, dim)) {}

    void merge(const Accumulator& b)
    {
        if (b.count == 0)
            return;
        if (count == 0) {
            *this = b;
            return;
        }
        const double na = double(count), nb = double(b.count), n = na + nb;
        for (std::size_t t = 0; t < mean.size(); ++t) {
            const Vec delta = b.mean[t] - mean[t];
            mean[t] += delta * (nb / n);
            m2[t] += b.m2[t];
            m2[t].selfadjointView<Eigen::Lower>().rankUpdate(delta, na * nb / n);
        }
        count += b.count;
    }
};

class Simulator {
public:
    Simulator(const PlantModel& plant, const HumanPolicy& human,
              const AutomationPolicy* automation, std::uint64_t seed)
        : p_(plant), h_(human), a_(automation), seed_(seed)
    {
        plant.validate();
        const auto N = static_cast<std::size_t>(plant.N);
        if (human.L.size() != N || human.K.size() != N)
            throw DimensionError("human policy length differs from horizon");
        if (automation && (automation->L.size() != N || automation->K.size() != N))
            throw DimensionError("automation policy length differs from horizon");
        n_ = plant.n;
        dim_ = (automation ? 3 : 2) * n_;
        nc_ = static_cast<int>(plant.C.size());
        nd_ = static_cast<int>(plant.D.size());
        np_ = static_cast<int>(plant.Sigma_xi.cols());
        nq_ = static_cast<int>(plant.Sigma_omega.cols());

        Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(plant.Omega0));
        init_sqrt_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        random_init_ = init_sqrt_.cwiseAbs().maxCoeff() > 0.0;
    }

    int dim() const { return dim_; }

    // Calls visit(t, x, xh_H, xh_A, u_H) for t = 0..N (u_H is empty at t = N).
    template <class Visit>
    void run(std::uint64_t traj, Visit&& visit) const
    {
        const NormalStream ns(seed_, traj);
        const int n = n_;
        Vec x = p_.x0_mean, xh = p_.x0_mean, xa = p_.x0_mean;
        if (random_init_) {
            Vec z(n);
            ns.normals(kInitialStep, n, [&](int i, double v) { z(i) = v; });
            x.noalias() += init_sqrt_ * z;
        }
        Vec xn(n), xhn(n), xan(n), uH(p_.m_H), uA(p_.m_A), y(p_.r_H), ya(p_.r_A);
        Vec noise(nc_ + nd_ + np_ + nq_);
        const Vec empty;

        for (int t = 0; t < p_.N; ++t) {
            uH.noalias() = -h_.L[t] * xh;
            visit(t, x, xh, xa, uH);
            ns.normals(static_cast<std::uint32_t>(t), static_cast<int>(noise.size()),
                       [&](int i, double v) { noise(i) = v; });
            const double* eps = noise.data();
            const double* eps_d = eps + nc_;
            const double* alpha = eps_d + nd_;
            const double* beta = alpha + np_;

            y.noalias() = p_.H_H * x;
            if (nq_)
                y.noalias() += p_.Sigma_omega * Eigen::Map<const Vec>(beta, nq_);
            for (int i = 0; i < nd_; ++i)
                y.noalias() += eps_d[i] * (p_.D[i] * x);

            xn.noalias() = p_.A * x;
            xn.noalias() += p_.B_H * uH;
            if (np_)
                xn.noalias() += p_.Sigma_xi * Eigen::Map<const Vec>(alpha, np_);
            for (int i = 0; i < nc_; ++i)
                xn.noalias() += eps[i] * (p_.C[i] * uH);

            xhn.noalias() = p_.A * xh;
            xhn.noalias() += p_.B_H * uH;
            y.noalias() -= p_.H_H * xh;
            xhn.noalias() += h_.K[t] * y;

            if (a_) {
                uA.noalias() = -a_->L[t] * xa;
                xn.noalias() += p_.B_A * uA;
                ya.noalias() = p_.H_A * x;
                ya.noalias() -= p_.H_A * xa;
                xan.noalias() = p_.A * xa;
                xan.noalias() += p_.B_A * uA;
                xan.noalias() += a_->K[t] * ya;
                xa.swap(xan);
            }
            x.swap(xn);
            xh.swap(xhn);
            if (!x.allFinite() || !xh.allFinite() || !xa.allFinite()) {
                std::ostringstream os;
                os << "non-finite state in trajectory " << traj << " at step " << t + 1;
                throw Error(os.str());
            }
        }
        visit(p_.N, x, xh, xa, empty);
    }

private:
    const PlantModel& p_;
    const HumanPolicy& h_;
    const AutomationPolicy* a_;
    std::uint64_t seed_;
    int n_ = 0, dim_ = 0, nc_ = 0, nd_ = 0, np_ = 0, nq_ = 0;
    Mat init_sqrt_;
    bool random_init_ = false;
};

// Runs fn(block) for blocks [first, last) on up to `threads` workers.
template <class Fn>
void parallel_blocks(int first, int last, int threads, Fn&& fn)
{
    threads = std::max(1, std::min(threads, last - first));
    if (threads == 1) {
        for (int b = first; b < last; ++b)
            fn(b);
        return;
    }
    std::atomic<int> next{first};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int b = next++; b < last; b = next++) {
                try {
                    fn(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err)
                        err = std::current_exception();
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace

EnsembleStats simulate(const PlantModel& plant, const HumanPolicy& human,
                       const AutomationPolicy* automation, int n_samples, std::uint64_t seed,
                       const SimulateOptions& opts)
{
    if (n_samples < 2)
        throw Error("simulate needs at least two samples");
    const Simulator sim(plant, human, automation, seed);
    const int steps = plant.N + 1, dim = sim.dim(), n = plant.n;
    const int blocks = (n_samples + kMcBlockSize - 1) / kMcBlockSize;

    Accumulator total(steps, dim);
    for (int w0 = 0; w0 < blocks; w0 += kWaveBlocks) {
        const int w1 = std::min(blocks, w0 + kWaveBlocks);
        std::vector<Accumulator> wave(w1 - w0, Accumulator(steps, dim));
        parallel_blocks(w0, w1, opts.threads, [&](int b) {
            Accumulator& acc = wave[b - w0];
            Vec z(dim);
            const int k0 = b * kMcBlockSize, k1 = std::min(n_samples, k0 + kMcBlockSize);
            for (int k = k0; k < k1; ++k) {
                const double cnt = double(k - k0 + 1);
                sim.run(static_cast<std::uint64_t>(k),
                        [&](int t, const Vec& x, const Vec& xh, const Vec& xa, const Vec&) {
                            z.head(n) = x;
                            z.segment(n, n) = xh;
                            if (automation)
                                z.segment(2 * n, n) = xa;
                            const Vec delta = z - acc.mean[t];
                            acc.mean[t] += delta / cnt;
                            acc.m2[t].selfadjointView<Eigen::Lower>().rankUpdate(delta, (cnt - 1.0) / cnt);
                        });
            }
            acc.count = k1 - k0;
        });
        for (const auto& a : wave)
            total.merge(a);
    }

    EnsembleStats es;
    es.layout = automation ? Layout::Coupled : Layout::HumanAlone;
    es.n_samples = n_samples;
    es.means = total.mean;
    es.covs.resize(steps);
    es.stderr_mean.resize(steps);
    for (int t = 0; t < steps; ++t) {
        Mat c = total.m2[t].selfadjointView<Eigen::Lower>();
        c /= double(n_samples - 1);
        es.stderr_mean[t] = (c.diagonal().cwiseMax(0.0) / double(n_samples)).cwiseSqrt();
        es.covs[t] = std::move(c);
    }
    return es;
}

double sample_cost(const PlantModel& plant, const CostSpec& cost, const HumanPolicy& human,
                   int n_samples, std::uint64_t seed, const SimulateOptions& opts)
{
    if (n_samples < 1)
        throw Error("sample_cost needs at least one sample");
    cost.validate(plant.n, plant.m_H, plant.N);
    const Simulator sim(plant, human, nullptr, seed);
    const int blocks = (n_samples + kMcBlockSize - 1) / kMcBlockSize;
    std::vector<double> block_sum(blocks, 0.0);
    parallel_blocks(0, blocks, opts.threads, [&](int b) {
        const int k0 = b * kMcBlockSize, k1 = std::min(n_samples, k0 + kMcBlockSize);
        double sum = 0.0;
        for (int k = k0; k < k1; ++k) {
            double c = 0.0;
            sim.run(static_cast<std::uint64_t>(k),
                    [&](int t, const Vec& x, const Vec&, const Vec&, const Vec& u) {
                        c += x.dot(cost.Q[t] * x);
                        if (u.size())
                            c += u.dot(cost.R * u);
                    });
            sum += c;
        }
        block_sum[b] = sum;
    });
    double total = 0.0;
    for (double s : block_sum)
        total += s;
    return total / n_samples;
}

OracleVerdict compare_moments(const MomentTrajectory& analytic, const EnsembleStats& ens,
                              const OracleTolerances& tol)
{
    if (analytic.means.size() != ens.means.size() || analytic.layout != ens.layout)
        throw DimensionError("analytic and sampled moments differ in horizon or layout");
    OracleVerdict v;
    for (std::size_t t = 0; t < analytic.means.size(); ++t) {
        const Vec& am = analytic.means[t];
        const Vec& sm = ens.means[t];
        const Vec& se = ens.stderr_mean[t];
        for (Eigen::Index i = 0; i < am.size(); ++i) {
            const double diff = std::abs(sm(i) - am(i));
            ++v.mean_pairs;
            if (se(i) > 0.0) {
                const double z = diff / se(i);
                v.worst_z = std::max(v.worst_z, z);
                if (z < tol.z_max)
                    ++v.mean_ok;
            } else if (diff <= 1e-9 * (1.0 + std::abs(am(i)))) {
                ++v.mean_ok;
            }
            const double a = analytic.covs[t](i, i);
            if (a > tol.var_floor) {
                ++v.var_pairs;
                const double rel = std::abs(ens.covs[t](i, i) - a) / a;
                v.worst_var_rel = std::max(v.worst_var_rel, rel);
                if (rel <= tol.var_rel)
                    ++v.var_ok;
            }
        }
    }
    v.pass = v.mean_fraction() >= tol.min_fraction && v.var_fraction() >= tol.min_fraction;
    return v;
}

} // namespace hvroc
