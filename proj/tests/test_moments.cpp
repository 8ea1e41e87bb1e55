#include "test_util.hpp"

#include <doctest.h>

using namespace hvroc;
using namespace testutil;

namespace {

HumanPolicy random_policy(std::mt19937_64& g, const PlantModel& p, double scale)
{
    HumanPolicy h;
    for (int t = 0; t < p.N; ++t) {
        h.L.push_back(random_matrix(g, p.m_H, p.n, scale));
        h.K.push_back(random_matrix(g, p.n, p.r_H, scale));
    }
    return h;
}

AutomationPolicy random_automation(std::mt19937_64& g, const PlantModel& p, double scale)
{
    AutomationPolicy a;
    for (int t = 0; t < p.N; ++t) {
        a.L.push_back(random_matrix(g, p.m_A, p.n, scale));
        a.K.push_back(random_matrix(g, p.n, p.r_A, scale));
    }
    return a;
}

} // namespace

TEST_CASE("noise-free propagation is the deterministic closed loop")
{
    std::mt19937_64 g(31);
    const PlantModel p = random_plant(g, 5, 2, 2, 3, 20, 0, 0, false);
    const HumanPolicy h = random_policy(g, p, 0.2);
    const AutomationPolicy a = random_automation(g, p, 0.2);
    const auto tr = propagate_coupled(p, h, a);
    const auto det = noise_free_loop(p, h, &a);
    for (int t = 0; t <= p.N; ++t) {
        CHECK(tr.covs[t].isZero());
        Vec z(15);
        z << det.x[t], det.xh[t], det.xa[t];
        CHECK((tr.means[t] - z).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, z.cwiseAbs().maxCoeff()));
    }
    const auto ha = propagate_human_alone(p, h);
    const auto dh = noise_free_loop(p, h, nullptr);
    for (int t = 0; t <= p.N; ++t)
        CHECK((ha.means[t].head(5) - dh.x[t]).norm() <= 1e-10 * std::max(1.0, dh.x[t].norm()));
}

TEST_CASE("means follow the noise-free loop even with noise")
{
    std::mt19937_64 g(32);
    const PlantModel p = random_plant(g, 4, 2, 1, 3, 25, 2, 2);
    const HumanPolicy h = random_policy(g, p, 0.2);
    const AutomationPolicy a = random_automation(g, p, 0.2);
    const auto tr = propagate_coupled(p, h, a);
    const auto det = noise_free_loop(p, h, &a);
    for (int t = 0; t <= p.N; ++t) {
        Vec z(12);
        z << det.x[t], det.xh[t], det.xa[t];
        CHECK((tr.means[t] - z).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, z.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("zero automation reproduces the human-alone moments")
{
    std::mt19937_64 g(33);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + rep % 5, c = rep % 3, d = (rep / 3) % 3;
        const PlantModel p = random_plant(g, n, 1 + rep % 2, 1 + rep % 3, 1 + rep % 3, 12, c, d);
        const HumanPolicy h = random_policy(g, p, 0.3);
        const auto ha = propagate_human_alone(p, h);
        const auto co = propagate_coupled(p, h, AutomationPolicy::zero(p));
        double worst = 0.0;
        for (int t = 0; t <= p.N; ++t) {
            const double s = std::max(1.0, ha.covs[t].cwiseAbs().maxCoeff());
            worst = std::max(worst, (co.covs[t].topLeftCorner(2 * n, 2 * n) - ha.covs[t]).cwiseAbs().maxCoeff() / s);
            worst = std::max(worst, (co.means[t].head(2 * n) - ha.means[t]).cwiseAbs().maxCoeff() /
                                        std::max(1.0, ha.means[t].cwiseAbs().maxCoeff()));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("covariances stay symmetric PSD with mirrored blocks")
{
    std::mt19937_64 g(34);
    for (int rep = 0; rep < 20; ++rep) {
        const PlantModel p = random_plant(g, 4, 2, 2, 2, 15, 2, 1);
        const auto tr = propagate_coupled(p, random_policy(g, p, 0.2), random_automation(g, p, 0.2));
        for (const auto& S : tr.covs) {
            CHECK(min_eigenvalue(S) >= -1e-9);
            CHECK(S.block(0, 4, 4, 4) == S.block(4, 0, 4, 4).transpose());
        }
    }
}

TEST_CASE("larger control-dependent noise never shrinks the state covariance")
{
    std::mt19937_64 g(35);
    const PlantModel p = random_plant(g, 4, 2, 1, 2, 20, 2, 1);
    const HumanPolicy h = random_policy(g, p, 0.3);
    PlantModel q = p;
    for (auto& C : q.C)
        C *= 1.5;
    const auto a = propagate_human_alone(p, h), b = propagate_human_alone(q, h);
    for (int t = 0; t <= p.N; ++t)
        CHECK(b.covs[t].topLeftCorner(4, 4).trace() >= a.covs[t].topLeftCorner(4, 4).trace() * (1 - 1e-12));
}

TEST_CASE("initial conditions and position extraction")
{
    const auto cfg = example("example1");
    const auto h = setup_human(cfg);
    const auto& tr = h.baseline.trajectory;
    CHECK(tr.stacked_dim == 20);
    CHECK(tr.N() == 42);
    const PositionStats s0 = position_stats(tr, 0);
    CHECK(s0.mean.isZero());
    CHECK(s0.cov.isZero());
    CHECK(tr.means[0].segment(10, 10) == h.plant.x0_mean);
    CHECK_THROWS_AS(position_stats(tr, 43), std::out_of_range);
    CHECK_THROWS_AS(position_stats(tr, -1), std::out_of_range);
    const PositionStats mid = position_stats(tr, 21);
    CHECK(mid.cov(0, 1) == doctest::Approx(mid.cov(1, 0)));
    CHECK(mid_index(42) == 21);
    CHECK(mid_index(43) == 21);
}

TEST_CASE("settling time")
{
    MomentTrajectory tr;
    tr.n = 2;
    tr.stacked_dim = 4;
    for (int t = 0; t <= 10; ++t) {
        Vec m = Vec::Zero(4);
        m(0) = 0.1;
        m(1) = t < 6 ? 0.0 : 0.099;
        tr.means.push_back(m);
        tr.covs.push_back(Mat::Zero(4, 4));
    }
    CHECK(settling_time(tr, 0, 0.1) == 0);
    CHECK(settling_time(tr, 1, 0.1) == 6);
    CHECK_FALSE(settling_time(tr, 1, 0.5).has_value());
    CHECK_THROWS_AS(settling_time(tr, 0, 0.0), Error);
    tr.means[10](0) = 0.2;
    CHECK_FALSE(settling_time(tr, 0, 0.1).has_value());
}
