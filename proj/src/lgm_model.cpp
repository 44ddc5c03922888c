#include "bre/lgm_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bre/errors.hpp"

namespace bre {

std::vector<std::string> observed_column_names()
{
    static constexpr std::array<char, kConstructs> construct_tag{'B', 'H'};
    std::vector<std::string> names;
    names.reserve(kObserved);
    for (std::size_t c = 0; c < kConstructs; ++c)
        for (std::size_t t = 0; t < kWaves; ++t)
            for (std::size_t k = 0; k < kIndicators; ++k)
                names.push_back(fmt::format("{}_t{}_y{}", construct_tag[c], t + 1, k + 1));
    return names;
}

PopulationParams PopulationParams::defaults(double slope_slope_corr)
{
    PopulationParams p;
    p.growth_means << 1.0, 0.2, 1.0, 0.2;

    const Eigen::Vector4d sd(1.0, 0.5, 1.0, 0.5);
    Eigen::Matrix4d corr = Eigen::Matrix4d::Identity();
    corr(kInterceptB, kSlopeB) = corr(kSlopeB, kInterceptB) = 0.2;
    corr(kInterceptH, kSlopeH) = corr(kSlopeH, kInterceptH) = 0.2;
    corr(kInterceptB, kInterceptH) = corr(kInterceptH, kInterceptB) = 0.3;
    p.growth_cov = sd.asDiagonal() * corr * sd.asDiagonal();

    for (std::size_t c = 0; c < kConstructs; ++c) {
        p.wave_residual_var[c].fill(0.5);
        p.loadings[c] = {1.0, 0.9, 0.8};
        p.indicator_residual_var[c] = {0.8, 0.65, 0.5};
        p.indicator_intercepts[c] = {0.0, 0.2, 0.4};
    }
    p.set_slope_slope_corr(slope_slope_corr);
    return p;
}

double PopulationParams::slope_slope_corr() const
{
    return growth_cov(kSlopeB, kSlopeH)
           / std::sqrt(growth_cov(kSlopeB, kSlopeB) * growth_cov(kSlopeH, kSlopeH));
}

void PopulationParams::set_slope_slope_corr(double rho)
{
    if (!(rho > -1.0 && rho < 1.0)) {
        throw Error(ErrorKind::ConfigError,
                    fmt::format("rho must lie in (-1, 1), got {}", rho));
    }
    const double vb = growth_cov(kSlopeB, kSlopeB);
    const double vh = growth_cov(kSlopeH, kSlopeH);
    if (!(vb > 0.0 && vh > 0.0)) {
        throw Error(ErrorKind::ConfigError, "slope variances must be positive to set rho");
    }
    growth_cov(kSlopeB, kSlopeH) = growth_cov(kSlopeH, kSlopeB) = rho * std::sqrt(vb * vh);
}

void PopulationParams::validate() const
{
    if (!growth_means.allFinite() || !growth_cov.allFinite()) {
        throw Error(ErrorKind::ConfigError, "growth parameters must be finite");
    }
    if (!growth_cov.isApprox(growth_cov.transpose(), 0.0)) {
        throw Error(ErrorKind::ConfigError, "growth_cov must be symmetric");
    }
    for (std::size_t t = 1; t < kWaves; ++t) {
        if (!(time_scores[t] > time_scores[t - 1])) {
            throw Error(ErrorKind::ConfigError, "time_scores must be strictly increasing");
        }
    }
    for (std::size_t c = 0; c < kConstructs; ++c) {
        for (double v : wave_residual_var[c]) {
            if (!(v >= 0.0)) throw Error(ErrorKind::ConfigError, "wave_residual_var must be >= 0");
        }
        for (std::size_t k = 0; k < kIndicators; ++k) {
            if (!(indicator_residual_var[c][k] >= 0.0)) {
                throw Error(ErrorKind::ConfigError, "indicator_residual_var must be >= 0");
            }
            if (!std::isfinite(loadings[c][k]) || !std::isfinite(indicator_intercepts[c][k])) {
                throw Error(ErrorKind::ConfigError, "loadings and intercepts must be finite");
            }
        }
        if (loadings[c][0] != 1.0) {
            throw Error(ErrorKind::ConfigError, "the first loading of each construct is fixed at 1");
        }
        if (indicator_intercepts[c][0] != 0.0) {
            throw Error(ErrorKind::ConfigError, "the first intercept of each construct is fixed at 0");
        }
    }
    if (growth_cov.llt().info() != Eigen::Success) {
        throw Error(ErrorKind::NotPositiveDefinite, "growth_cov is not positive definite");
    }
}

ModelMoments implied_moments(const PopulationParams& p)
{
    // first-order factors from growth factors
    Eigen::Matrix<double, kFirstOrder, kGrowthFactors> growth_loadings;
    growth_loadings.setZero();
    Eigen::Matrix<double, kFirstOrder, 1> psi;
    for (std::size_t c = 0; c < kConstructs; ++c) {
        for (std::size_t t = 0; t < kWaves; ++t) {
            const auto row = c * kWaves + t;
            growth_loadings(row, 2 * c) = 1.0;
            growth_loadings(row, 2 * c + 1) = p.time_scores[t];
            psi(row) = p.wave_residual_var[c][t];
        }
    }
    const Eigen::Matrix<double, kFirstOrder, 1> eta_mean = growth_loadings * p.growth_means;
    Eigen::Matrix<double, kFirstOrder, kFirstOrder> eta_cov =
        growth_loadings * p.growth_cov * growth_loadings.transpose();
    eta_cov.diagonal() += psi;

    ModelMoments m;
    m.mu.resize(kObserved);
    m.sigma.resize(kObserved, kObserved);
    for (std::size_t i = 0; i < kObserved; ++i) {
        const auto ci = i / (kWaves * kIndicators);
        const auto ki = i % kIndicators;
        const auto fi = i / kIndicators;
        const double li = p.loadings[ci][ki];
        m.mu(i) = p.indicator_intercepts[ci][ki] + li * eta_mean(fi);
        for (std::size_t j = 0; j <= i; ++j) {
            const auto cj = j / (kWaves * kIndicators);
            const auto kj = j % kIndicators;
            const auto fj = j / kIndicators;
            double s = li * p.loadings[cj][kj] * eta_cov(fi, fj);
            if (i == j) s += p.indicator_residual_var[ci][ki];
            m.sigma(i, j) = m.sigma(j, i) = s;
        }
    }
    return m;
}

ModelMoments build_moments(const PopulationParams& params)
{
    params.validate();
    auto m = implied_moments(params);
    if (m.sigma.llt().info() != Eigen::Success) {
        throw Error(ErrorKind::NotPositiveDefinite, "implied covariance is not positive definite");
    }
    return m;
}

DataMatrix generate_dataset(const ModelMoments& moments, std::size_t n, RandomStream& stream)
{
    if (n == 0) throw Error(ErrorKind::InsufficientSample, "dataset needs at least one row");
    const auto p = moments.mu.size();
    const Eigen::LLT<Eigen::MatrixXd> llt(moments.sigma);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NotPositiveDefinite, "covariance is not positive definite");
    }
    const Eigen::MatrixXd lower = llt.matrixL();

    DataMatrix data;
    data.values.resize(static_cast<Eigen::Index>(n), p);
    data.mask.setConstant(static_cast<Eigen::Index>(n), p, true);
    data.column_names = p == static_cast<Eigen::Index>(kObserved)
                            ? observed_column_names()
                            : std::vector<std::string>{};
    Eigen::VectorXd z(p);
    for (std::size_t r = 0; r < n; ++r) {
        for (Eigen::Index j = 0; j < p; ++j) z(j) = stream.normal();
        data.values.row(static_cast<Eigen::Index>(r)) =
            (moments.mu + lower.triangularView<Eigen::Lower>() * z).transpose();
    }
    return data;
}

}  // namespace bre
