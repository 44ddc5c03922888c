#include <gtest/gtest.h>

#include <cmath>

#include "bre/optimizer.hpp"

using namespace bre;

TEST(Bfgs, Rosenbrock)
{
    const Objective rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
        g(0) = -2.0 * a - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    BfgsOptions opt;
    opt.relative_tolerance = 0.0;
    const auto r = minimize_bfgs(rosen, Eigen::Vector2d(-1.2, 1.0), opt);
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_NEAR(r.x(0), 1.0, 1e-5);
    EXPECT_NEAR(r.x(1), 1.0, 1e-5);
    EXPECT_LT(r.gradient.lpNorm<Eigen::Infinity>(), opt.gradient_tolerance);
}

TEST(Bfgs, IllScaledQuadratic)
{
    const Eigen::Vector4d scale(1e-2, 1.0, 10.0, 1e3);
    const Eigen::Vector4d target(1.0, -2.0, 3.0, 0.5);
    const Objective quad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const Eigen::Vector4d d = x - target;
        g = scale.cwiseProduct(d);
        return 0.5 * d.dot(scale.cwiseProduct(d));
    };
    BfgsOptions opt;
    opt.relative_tolerance = 0.0;
    opt.gradient_tolerance = 1e-10;
    const auto r = minimize_bfgs(quad, Eigen::Vector4d::Zero(), opt);
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_LT((r.x - target).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Bfgs, BarrierRegionIsAvoided)
{
    // x - log(x), defined for x > 0 only; minimum at 1
    const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        if (x(0) <= 0.0) {
            g.setZero();
            return 1e15;
        }
        g(0) = 1.0 - 1.0 / x(0);
        return x(0) - std::log(x(0));
    };
    BfgsOptions opt;
    opt.relative_tolerance = 0.0;
    Eigen::VectorXd x0(1);
    x0 << 40.0;
    const auto r = minimize_bfgs(f, x0, opt);
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_NEAR(r.x(0), 1.0, 1e-4);
}

TEST(Bfgs, IterationLimitReportsFailure)
{
    const Objective rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
        g(0) = -2.0 * a - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    BfgsOptions opt;
    opt.max_iterations = 2;
    opt.relative_tolerance = 0.0;
    const auto r = minimize_bfgs(rosen, Eigen::Vector2d(-1.2, 1.0), opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 2);
}

TEST(Bfgs, NonFiniteStart)
{
    const Objective f = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
        g.setZero();
        return std::nan("");
    };
    const auto r = minimize_bfgs(f, Eigen::VectorXd::Zero(2));
    EXPECT_FALSE(r.converged);
}
