#include "test_util.hpp"

#include <doctest.h>

using namespace hvroc;
using namespace testutil;

namespace {

struct Fixture {
    ScenarioConfig cfg = example("example1");
    HumanSetup h = setup_human(cfg);
};

} // namespace

TEST_CASE("inert automation gives unit accuracy ratio and zero variance gap")
{
    Fixture f;
    const AutomationParams inert{Vec::Zero(6), Vec::Ones(2)};
    CHECK(evaluate_objective(inert, f.h.plant, f.h.solution.policy, f.h.baseline, {0, 0, 0, 1}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(evaluate_objective(inert, f.h.plant, f.h.solution.policy, f.h.baseline, {1, 0, 0, 0}) ==
          doctest::Approx(0.0));
    CHECK(evaluate_objective(inert, f.h.plant, f.h.solution.policy, f.h.baseline, {0, 1, 0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("objective at the initial parameters")
{
    Fixture f;
    const auto w = ObjectiveWeights::lowvar();
    const double J = evaluate_objective(f.cfg.init, f.h.plant, f.h.solution.policy, f.h.baseline, w);
    CHECK(std::isfinite(J));
    CHECK(J > 0.0);
    // Regression baseline of the composed pipeline.
    CHECK(J == doctest::Approx(0.73526979506842749).epsilon(1e-9));
    const double J2 = evaluate_objective(f.cfg.init, f.h.plant, f.h.solution.policy, f.h.baseline, w);
    CHECK(J == J2);
}

TEST_CASE("objective terms follow the formula")
{
    Fixture f;
    const auto pol = design_automation(f.h.plant, f.cfg.init);
    const auto tr = propagate_coupled(f.h.plant, f.h.solution.policy, pol);
    const int N = f.h.plant.N;
    const double vm = tr.covs[N / 2](0, 0), ve = tr.covs[N](0, 0);
    const double hm = f.h.baseline.mid.cov(0, 0), he = f.h.baseline.end.cov(0, 0);
    const Eigen::Vector2d pr(0.1, 0.1);
    const double err = (tr.means[N].head<2>() - pr).norm();
    const double herr = (f.h.baseline.trajectory.means[N].head<2>() - pr).norm();
    const double expect = 2.0 * (vm - hm) * (vm - hm) + 3.0 * (vm / hm) * (vm / hm) +
                          5.0 * (ve / he) * (ve / he) + 7.0 * (err / herr) * (err / herr);
    CHECK(objective_from_moments(tr, f.h.baseline, {2, 3, 5, 7}) == doctest::Approx(expect).epsilon(1e-13));

    HumanBaseline tb = make_baseline(f.h.plant, f.h.solution.policy, pr, Scalarization::Trace);
    const double tm = 0.5 * tr.covs[N / 2].topLeftCorner<2, 2>().trace();
    const double thm = 0.5 * tb.mid.cov.trace();
    CHECK(objective_from_moments(tr, tb, {0, 1, 0, 0}) == doctest::Approx((tm / thm) * (tm / thm)));
}

TEST_CASE("invalid weights are rejected")
{
    CHECK_THROWS_AS(ObjectiveWeights({0, 0, 0, 0}).validate(), InvalidCost);
    CHECK_THROWS_AS(ObjectiveWeights({-1, 0, 0, 1}).validate(), InvalidCost);
    CHECK_THROWS_AS(parse_scalarization("both"), Error);
}

TEST_CASE("nelder-mead minimizes the Rosenbrock function")
{
    auto rosen = [](const Vec& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
    const auto r = nelder_mead(rosen, Vec::Constant(2, -1.2), 0.5, 5000, 1e-10);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.f < 1e-12);

    const auto bad = nelder_mead([](const Vec&) { return std::nan(""); }, Vec::Zero(2), 1.0, 20, 1e-6);
    CHECK(std::isinf(bad.f));
}

TEST_CASE("optimizer is reproducible, feasible and improves on the start")
{
    Fixture f;
    OptimizeOptions o;
    o.max_evals = 300;
    o.restarts = 3;
    o.seed = 7;
    const auto w = ObjectiveWeights::lowvar();
    const auto a = optimize(f.h.plant, f.h.solution.policy, f.h.baseline, w, f.cfg.init, o);
    o.threads = 3;
    const auto b = optimize(f.h.plant, f.h.solution.policy, f.h.baseline, w, f.cfg.init, o);
    CHECK(a.J_star == b.J_star);
    CHECK(a.q_star == b.q_star);
    CHECK(a.r_star == b.r_star);
    CHECK(a.evaluations == b.evaluations);

    const double J0 = evaluate_objective(f.cfg.init, f.h.plant, f.h.solution.policy, f.h.baseline, w);
    CHECK(a.J_star <= J0);
    const double Js = evaluate_objective({a.q_star, a.r_star}, f.h.plant, f.h.solution.policy, f.h.baseline, w);
    CHECK(std::abs(a.J_star - Js) <= 1e-12);
    REQUIRE_FALSE(a.trace.empty());
    CHECK(a.trace.front().J == doctest::Approx(J0));
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK((a.trace[i].q.array() >= 0.0).all());
        CHECK((a.trace[i].r.array() > 0.0).all());
        if (i > 0)
            CHECK(a.trace[i].J <= a.trace[i - 1].J);
    }

    o.seed = 8;
    const auto c = optimize(f.h.plant, f.h.solution.policy, f.h.baseline, w, f.cfg.init, o);
    CHECK(c.J_star <= J0);
}

TEST_CASE("automation without actuation cannot change the objective")
{
    Fixture f;
    PlantModel p = f.h.plant;
    p.B_A.setZero();
    OptimizeOptions o;
    o.max_evals = 100;
    o.restarts = 2;
    const auto r = optimize(p, f.h.solution.policy, f.h.baseline, {0, 0, 0, 1}, f.cfg.init, o);
    CHECK(r.J_star == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimizer reports when every evaluation fails")
{
    std::mt19937_64 g(41);
    const PlantModel p = random_plant(g, 4, 2, 2, 2, 6, 0, 0);
    const auto sol = solve_lqs(p, random_cost(g, 4, 2, 6));
    const HumanBaseline b = make_baseline(p, sol.policy, Eigen::Vector2d(1, 1));
    OptimizeOptions o;
    o.max_evals = 20;
    o.restarts = 1;
    CHECK_THROWS_AS(optimize(p, sol.policy, b, {0, 0, 0, 1}, {Vec::Ones(6), Vec::Ones(2)}, o),
                    OptimizationFailed);
}
