#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bre/rng.hpp"

namespace bre {

// Bivariate latent growth model: two constructs (B, H), five waves, three
// indicators per construct-wave. Observed columns are ordered
// construct-major, wave-minor, indicator-innermost.
inline constexpr std::size_t kConstructs = 2;
inline constexpr std::size_t kWaves = 5;
inline constexpr std::size_t kIndicators = 3;
inline constexpr std::size_t kFirstOrder = kConstructs * kWaves;  // 10
inline constexpr std::size_t kObserved = kFirstOrder * kIndicators;  // 30
inline constexpr std::size_t kGrowthFactors = 4;

// Growth factor order: I_B, S_B, I_H, S_H.
inline constexpr std::size_t kInterceptB = 0;
inline constexpr std::size_t kSlopeB = 1;
inline constexpr std::size_t kInterceptH = 2;
inline constexpr std::size_t kSlopeH = 3;

constexpr std::size_t column_index(std::size_t construct, std::size_t wave, std::size_t indicator)
{
    return construct * kWaves * kIndicators + wave * kIndicators + indicator;
}

constexpr std::size_t wave_of_column(std::size_t col) { return (col / kIndicators) % kWaves; }

std::vector<std::string> observed_column_names();

using ConstructWave = std::array<std::array<double, kWaves>, kConstructs>;
using ConstructIndicator = std::array<std::array<double, kIndicators>, kConstructs>;

/// Generating (or fitted) parameters of the growth model.
///
/// First-order factor: eta[c,t] = I_c + time_scores[t] * S_c + zeta[c,t].
/// Indicator:          y[c,t,k] = intercept[c,k] + loading[c,k] * eta[c,t] + eps[c,t,k].
/// Loadings, intercepts and residual variances are invariant across waves.
/// The first indicator of each construct is the marker (loading 1, intercept 0).
struct PopulationParams {
    Eigen::Vector4d growth_means = Eigen::Vector4d::Zero();
    Eigen::Matrix4d growth_cov = Eigen::Matrix4d::Identity();
    std::array<double, kWaves> time_scores{0.0, 1.0, 2.0, 3.0, 4.0};
    ConstructWave wave_residual_var{};
    ConstructIndicator loadings{};
    ConstructIndicator indicator_residual_var{};
    ConstructIndicator indicator_intercepts{};

    /// Artifact defaults (not empirical values): intercept means 1.0, slope
    /// means 0.2, intercept variances 1.0, slope variances 0.25,
    /// within-construct intercept-slope correlation 0.2, cross-construct
    /// intercept correlation 0.3, wave residual variance 0.5, loadings
    /// (1.0, 0.9, 0.8), indicator residual variances (0.8, 0.65, 0.5) which
    /// put every indicator near 0.8 reliability at the average wave.
    static PopulationParams defaults(double slope_slope_corr = 0.3);

    double slope_slope_corr() const;
    /// Rewrites cov(S_B, S_H) so the slope correlation equals `rho`.
    void set_slope_slope_corr(double rho);

    /// Throws ConfigError / NotPositiveDefinite if an invariant is broken.
    void validate() const;
};

struct ModelMoments {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
};

/// Pure moment algebra, no definiteness checks.
ModelMoments implied_moments(const PopulationParams& params);

/// Validated moments; throws NotPositiveDefinite if growth_cov or sigma is
/// not positive definite.
ModelMoments build_moments(const PopulationParams& params);

/// n x 30 observations plus an observed-cell mask (true = observed).
struct DataMatrix {
    Eigen::MatrixXd values;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
    std::vector<std::string> column_names;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
    bool complete() const { return mask.all(); }
};

/// n iid draws from N(mu, sigma) through the Cholesky factor.
DataMatrix generate_dataset(const ModelMoments& moments, std::size_t n, RandomStream& stream);

}  // namespace bre
