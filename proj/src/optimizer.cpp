#include "bre/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bre {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

struct Probe {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;  // directional derivative at alpha
    Eigen::VectorXd x;
    Eigen::VectorXd g;
};

class LineSearch {
public:
    LineSearch(const Objective& objective, const Eigen::VectorXd& x0, double f0,
               const Eigen::VectorXd& direction, double slope0, int budget)
        : objective_(objective), x0_(x0), f0_(f0), dir_(direction), slope0_(slope0),
          budget_(budget)
    {
    }

    // Returns false if no acceptable step was found within the budget.
    bool run(double alpha_init, Probe& out)
    {
        Probe prev{0.0, f0_, slope0_, x0_, {}};
        double alpha = alpha_init;
        for (int i = 0; budget_ > 0; ++i) {
            Probe cur = eval(alpha);
            if (!sufficient(cur) || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur, out);
            if (std::abs(cur.slope) <= -kCurvature * slope0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.slope >= 0.0) return zoom(cur, prev, out);
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return false;
    }

private:
    Probe eval(double alpha)
    {
        --budget_;
        Probe p;
        p.alpha = alpha;
        p.x = x0_ + alpha * dir_;
        p.g.resize(x0_.size());
        p.f = objective_(p.x, p.g);
        if (!std::isfinite(p.f)) p.f = std::numeric_limits<double>::max();
        p.slope = p.g.allFinite() ? p.g.dot(dir_) : 0.0;
        return p;
    }

    bool sufficient(const Probe& p) const { return p.f <= f0_ + kArmijo * p.alpha * slope0_; }

    bool zoom(Probe lo, Probe hi, Probe& out)
    {
        Probe best_ok;
        bool have_ok = false;
        while (budget_ > 0) {
            const double width = hi.alpha - lo.alpha;
            // quadratic interpolation from (f_lo, slope_lo, f_hi), safeguarded
            double alpha = lo.alpha + 0.5 * width;
            const double denom = 2.0 * (hi.f - lo.f - lo.slope * width);
            if (denom != 0.0 && std::isfinite(denom)) {
                const double step = -lo.slope * width * width / denom;
                const double cand = lo.alpha + step;
                const double a = std::min(lo.alpha, hi.alpha) + 0.1 * std::abs(width);
                const double b = std::max(lo.alpha, hi.alpha) - 0.1 * std::abs(width);
                if (std::isfinite(cand)) alpha = std::clamp(cand, a, b);
            }
            Probe cur = eval(alpha);
            if (!sufficient(cur) || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.slope) <= -kCurvature * slope0_) {
                    out = std::move(cur);
                    return true;
                }
                best_ok = cur;
                have_ok = true;
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(cur);
            }
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
        }
        // fall back to any Armijo-acceptable point
        if (have_ok) {
            out = std::move(best_ok);
            return true;
        }
        if (lo.alpha > 0.0 && lo.f < f0_) {
            out = std::move(lo);
            return true;
        }
        return false;
    }

    const Objective& objective_;
    const Eigen::VectorXd& x0_;
    double f0_;
    const Eigen::VectorXd& dir_;
    double slope0_;
    int budget_;
};

}  // namespace

BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0, const BfgsOptions& options)
{
    const auto n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    res.gradient.resize(n);
    res.value = objective(res.x, res.gradient);
    if (!std::isfinite(res.value) || !res.gradient.allFinite()) {
        res.message = "objective not finite at the starting point";
        return res;
    }

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    bool fresh_hessian = true;

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        if (res.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            res.converged = true;
            res.message = "gradient tolerance reached";
            return res;
        }
        Eigen::VectorXd dir = -inv_hessian * res.gradient;
        double slope = res.gradient.dot(dir);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            fresh_hessian = true;
            dir = -res.gradient;
            slope = res.gradient.dot(dir);
        }
        double alpha0 = 1.0;
        if (fresh_hessian) alpha0 = std::min(1.0, 1.0 / dir.lpNorm<Eigen::Infinity>());

        Probe step;
        LineSearch ls(objective, res.x, res.value, dir, slope, options.max_line_search);
        if (!ls.run(alpha0, step)) {
            if (!fresh_hessian) {
                // retry along steepest descent before giving up
                inv_hessian.setIdentity();
                fresh_hessian = true;
                continue;
            }
            res.message = "line search failed";
            return res;
        }

        const Eigen::VectorXd s = step.x - res.x;
        const Eigen::VectorXd y = step.g - res.gradient;
        const double f_prev = res.value;
        res.x = std::move(step.x);
        res.gradient = std::move(step.g);
        res.value = step.f;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_hessian) {
                inv_hessian *= sy / y.squaredNorm();
                fresh_hessian = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = inv_hessian * y;
            inv_hessian += (rho * rho * y.dot(hy) + rho) * s * s.transpose()
                           - rho * (hy * s.transpose() + s * hy.transpose());
        }

        if (std::abs(f_prev - res.value)
            <= options.relative_tolerance * std::max(std::abs(res.value), 1.0)) {
            ++res.iterations;
            res.converged = true;
            res.message = "relative function change below tolerance";
            return res;
        }
    }
    res.converged = res.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
    res.message = res.converged ? "gradient tolerance reached" : "iteration limit reached";
    return res;
}

}  // namespace bre
