#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bre/lgm_model.hpp"
#include "bre/optimizer.hpp"
#include "bre/rng.hpp"

namespace bre {

/// Free parameters of the fitted growth model, raw (unconstrained) scale:
///
///   [0, 4)    growth means            I_B, S_B, I_H, S_H
///   [4, 14)   growth covariance       lower triangle, row-major
///   [14, 24)  wave residual variances construct-major, wave-minor
///   [24, 28)  free loadings           B2, B3, H2, H3
///   [28, 32)  free intercepts         B2, B3, H2, H3
///   [32, 38)  indicator residual var  B1, B2, B3, H1, H2, H3
using ParamVector = Eigen::VectorXd;

inline constexpr std::size_t kNumFreeParams = 38;

const std::vector<std::string>& parameter_names();

/// Index of (row, col) of the growth covariance inside a ParamVector.
std::size_t growth_cov_index(std::size_t row, std::size_t col);

PopulationParams unpack(const ParamVector& theta);
ParamVector pack(const PopulationParams& params);

/// Rows sharing one observed-cell pattern, reduced to sufficient statistics.
struct MissingPattern {
    std::vector<Eigen::Index> observed;  // observed column indices
    std::size_t count = 0;
    Eigen::VectorXd mean;                // mean of observed values
    Eigen::MatrixXd scatter;             // biased covariance about `mean`
};

struct PatternData {
    std::vector<MissingPattern> patterns;
    std::size_t rows = 0;
};

/// Groups rows by mask. Masked cells are never read. Throws RowWithoutData
/// if a row has no observed cell.
PatternData group_patterns(const DataMatrix& data);

struct LoglikValue {
    double value = 0.0;
    /// true when some pattern covariance was not positive definite and the
    /// barrier value was returned instead of a log-likelihood
    bool penalized = false;
};

inline constexpr double kBarrierLoglik = -1e15;

/// Pattern log-likelihood for arbitrary implied moments (any column count).
struct MomentsLoglik {
    double value = 0.0;
    bool penalized = false;
    Eigen::VectorXd grad_mu;     // d loglik / d mu
    Eigen::MatrixXd grad_sigma;  // d loglik / d sigma, entries treated as free
};

MomentsLoglik moments_loglik(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                             const PatternData& data, bool want_gradient);

/// Observed-data normal log-likelihood summed over patterns; fills `gradient`
/// (d loglik / d theta) when non-null.
LoglikValue pattern_loglik(const ParamVector& theta, const PatternData& data,
                           Eigen::VectorXd* gradient = nullptr);

LoglikValue pattern_loglik(const ParamVector& theta, const DataMatrix& data);

/// Row-by-row evaluation without pattern grouping; the serial reference for
/// pattern_loglik.
LoglikValue casewise_loglik(const ParamVector& theta, const DataMatrix& data);

struct FitOptions {
    BfgsOptions bfgs{};
    int max_restarts = 3;
    double restart_jitter = 0.1;
};

struct FitResult {
    ParamVector theta_hat;
    double loglik = 0.0;
    bool converged = false;
    bool admissible = false;
    int n_iterations = 0;
    int n_restarts = 0;
    double gradient_norm = 0.0;
};

/// Observed-moment starting values: growth factors from per-row OLS of the
/// marker indicator on time, measurement parameters from column moments with
/// a 0.8 reliability split.
ParamVector start_values(const DataMatrix& data);

/// Variances >= 0, growth correlations in [-1, 1], implied sigma PD.
bool is_admissible(const ParamVector& theta);

/// Maximizes the observed-data likelihood by BFGS; on failure retries from
/// jittered starts. Never throws for non-convergence.
FitResult fit(const DataMatrix& data, const std::optional<ParamVector>& start,
              RandomStream& stream, const FitOptions& options = {});

/// "slope_slope_corr" or any name from parameter_names().
double extract_param(const FitResult& fit, std::string_view name);

double slope_slope_corr(const ParamVector& theta);

}  // namespace bre
