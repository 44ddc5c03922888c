#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace bre {

/// Objective returning f(x) and writing the gradient into `grad`.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BfgsOptions {
    int max_iterations = 500;
    /// stop when max |grad| falls below this
    double gradient_tolerance = 1e-5;
    /// or when |f_k - f_{k+1}| <= tol * max(|f_{k+1}|, 1)
    double relative_tolerance = 1e-9;
    int max_line_search = 40;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Dense BFGS minimizer with a strong-Wolfe line search. A non-finite or
/// very large f is treated as "outside the domain" and simply shrinks the step.
BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options = {});

}  // namespace bre
