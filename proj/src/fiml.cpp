#include "bre/fiml.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "bre/errors.hpp"

namespace bre {
namespace {

constexpr std::size_t kMeansAt = 0;
constexpr std::size_t kCovAt = 4;
constexpr std::size_t kWaveResidualAt = 14;
constexpr std::size_t kLoadingsAt = 24;
constexpr std::size_t kInterceptsAt = 28;
constexpr std::size_t kIndicatorResidualAt = 32;

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// growth-factor loadings on first-order factors (10 x 4)
Eigen::Matrix<double, kFirstOrder, kGrowthFactors> growth_design(const PopulationParams& p)
{
    Eigen::Matrix<double, kFirstOrder, kGrowthFactors> m;
    m.setZero();
    for (std::size_t c = 0; c < kConstructs; ++c) {
        for (std::size_t t = 0; t < kWaves; ++t) {
            m(c * kWaves + t, 2 * c) = 1.0;
            m(c * kWaves + t, 2 * c + 1) = p.time_scores[t];
        }
    }
    return m;
}

// indicator loadings on first-order factors (30 x 10)
Eigen::MatrixXd indicator_design(const PopulationParams& p)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kObserved, kFirstOrder);
    for (std::size_t i = 0; i < kObserved; ++i) {
        m(i, i / kIndicators) = p.loadings[i / (kWaves * kIndicators)][i % kIndicators];
    }
    return m;
}

}  // namespace

const std::vector<std::string>& parameter_names()
{
    static const std::vector<std::string> names = [] {
        static constexpr std::array<const char*, kGrowthFactors> factor{"I_B", "S_B", "I_H", "S_H"};
        static constexpr std::array<char, kConstructs> construct{'B', 'H'};
        std::vector<std::string> out;
        for (auto f : factor) out.push_back(fmt::format("mean_{}", f));
        for (std::size_t r = 0; r < kGrowthFactors; ++r)
            for (std::size_t c = 0; c <= r; ++c)
                out.push_back(r == c ? fmt::format("var_{}", factor[r])
                                     : fmt::format("cov_{}_{}", factor[r], factor[c]));
        for (auto c : construct)
            for (std::size_t t = 0; t < kWaves; ++t) out.push_back(fmt::format("psi_{}_t{}", c, t + 1));
        for (auto c : construct)
            for (std::size_t k = 1; k < kIndicators; ++k) out.push_back(fmt::format("loading_{}{}", c, k + 1));
        for (auto c : construct)
            for (std::size_t k = 1; k < kIndicators; ++k) out.push_back(fmt::format("intercept_{}{}", c, k + 1));
        for (auto c : construct)
            for (std::size_t k = 0; k < kIndicators; ++k) out.push_back(fmt::format("theta_{}{}", c, k + 1));
        return out;
    }();
    return names;
}

std::size_t growth_cov_index(std::size_t row, std::size_t col)
{
    if (row < col) std::swap(row, col);
    return kCovAt + row * (row + 1) / 2 + col;
}

PopulationParams unpack(const ParamVector& theta)
{
    PopulationParams p;
    p.growth_means = theta.segment<kGrowthFactors>(kMeansAt);
    for (std::size_t r = 0; r < kGrowthFactors; ++r)
        for (std::size_t c = 0; c <= r; ++c)
            p.growth_cov(r, c) = p.growth_cov(c, r) = theta(growth_cov_index(r, c));
    for (std::size_t c = 0; c < kConstructs; ++c) {
        for (std::size_t t = 0; t < kWaves; ++t)
            p.wave_residual_var[c][t] = theta(kWaveResidualAt + c * kWaves + t);
        p.loadings[c][0] = 1.0;
        p.indicator_intercepts[c][0] = 0.0;
        for (std::size_t k = 1; k < kIndicators; ++k) {
            p.loadings[c][k] = theta(kLoadingsAt + c * 2 + (k - 1));
            p.indicator_intercepts[c][k] = theta(kInterceptsAt + c * 2 + (k - 1));
        }
        for (std::size_t k = 0; k < kIndicators; ++k)
            p.indicator_residual_var[c][k] = theta(kIndicatorResidualAt + c * kIndicators + k);
    }
    return p;
}

ParamVector pack(const PopulationParams& p)
{
    ParamVector theta(kNumFreeParams);
    theta.segment<kGrowthFactors>(kMeansAt) = p.growth_means;
    for (std::size_t r = 0; r < kGrowthFactors; ++r)
        for (std::size_t c = 0; c <= r; ++c) theta(growth_cov_index(r, c)) = p.growth_cov(r, c);
    for (std::size_t c = 0; c < kConstructs; ++c) {
        for (std::size_t t = 0; t < kWaves; ++t)
            theta(kWaveResidualAt + c * kWaves + t) = p.wave_residual_var[c][t];
        for (std::size_t k = 1; k < kIndicators; ++k) {
            theta(kLoadingsAt + c * 2 + (k - 1)) = p.loadings[c][k];
            theta(kInterceptsAt + c * 2 + (k - 1)) = p.indicator_intercepts[c][k];
        }
        for (std::size_t k = 0; k < kIndicators; ++k)
            theta(kIndicatorResidualAt + c * kIndicators + k) = p.indicator_residual_var[c][k];
    }
    return theta;
}

PatternData group_patterns(const DataMatrix& data)
{
    const auto n = static_cast<Eigen::Index>(data.rows());
    const auto p = static_cast<Eigen::Index>(data.cols());
    std::map<std::vector<bool>, std::vector<Eigen::Index>> groups;
    for (Eigen::Index r = 0; r < n; ++r) {
        std::vector<bool> key(static_cast<std::size_t>(p));
        bool any = false;
        for (Eigen::Index c = 0; c < p; ++c) {
            key[static_cast<std::size_t>(c)] = data.mask(r, c);
            any = any || data.mask(r, c);
        }
        if (!any) throw Error(ErrorKind::RowWithoutData, fmt::format("row {} has no observed cell", r));
        groups[std::move(key)].push_back(r);
    }

    PatternData out;
    out.rows = data.rows();
    for (const auto& [key, rows] : groups) {
        MissingPattern pat;
        for (Eigen::Index c = 0; c < p; ++c)
            if (key[static_cast<std::size_t>(c)]) pat.observed.push_back(c);
        const auto k = static_cast<Eigen::Index>(pat.observed.size());
        pat.count = rows.size();
        pat.mean = Eigen::VectorXd::Zero(k);
        for (auto r : rows) pat.mean += data.values(r, pat.observed).transpose();
        pat.mean /= static_cast<double>(pat.count);
        pat.scatter = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd dev(k);
        for (auto r : rows) {
            dev = data.values(r, pat.observed).transpose() - pat.mean;
            pat.scatter.selfadjointView<Eigen::Lower>().rankUpdate(dev);
        }
        pat.scatter = pat.scatter.selfadjointView<Eigen::Lower>();
        pat.scatter /= static_cast<double>(pat.count);
        out.patterns.push_back(std::move(pat));
    }
    return out;
}

MomentsLoglik moments_loglik(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                             const PatternData& data, bool want_gradient)
{
    MomentsLoglik out;
    if (want_gradient) {
        out.grad_sigma = Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
        out.grad_mu = Eigen::VectorXd::Zero(mu.size());
    }
    for (const auto& pat : data.patterns) {
        const auto k = static_cast<Eigen::Index>(pat.observed.size());
        const double n = static_cast<double>(pat.count);
        const Eigen::LLT<Eigen::MatrixXd> llt(sigma(pat.observed, pat.observed));
        const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
        if (llt.info() != Eigen::Success || (diag.array() <= 0.0).any()) {
            out.value = kBarrierLoglik;
            out.penalized = true;
            if (want_gradient) {
                out.grad_sigma.setZero();
                out.grad_mu.setZero();
            }
            return out;
        }
        const double logdet = 2.0 * diag.array().log().sum();
        const Eigen::VectorXd d = pat.mean - mu(pat.observed);
        const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(k, k));
        const Eigen::VectorXd inv_d = inv * d;
        // tr(inv (S + d d')) = <inv, S> + d' inv d
        const double quad = inv.cwiseProduct(pat.scatter).sum() + d.dot(inv_d);
        out.value += -0.5 * n * (static_cast<double>(k) * kLog2Pi + logdet + quad);

        if (want_gradient) {
            const Eigen::MatrixXd w = pat.scatter + d * d.transpose();
            out.grad_sigma(pat.observed, pat.observed) += -0.5 * n * (inv - inv * w * inv);
            out.grad_mu(pat.observed) += n * inv_d;
        }
    }
    return out;
}

LoglikValue pattern_loglik(const ParamVector& theta, const PatternData& data,
                           Eigen::VectorXd* gradient)
{
    const PopulationParams p = unpack(theta);
    const ModelMoments m = implied_moments(p);
    const MomentsLoglik ml = moments_loglik(m.mu, m.sigma, data, gradient != nullptr);
    if (ml.penalized) {
        if (gradient) gradient->setZero(theta.size());
        return {ml.value, true};
    }
    const double ll = ml.value;
    const Eigen::MatrixXd& g_sigma = ml.grad_sigma;
    const Eigen::VectorXd& g_mu = ml.grad_mu;

    if (gradient) {
        // chain rule: sigma = Ly (Lg Phi Lg' + Psi) Ly' + Theta,
        //             mu    = nu + Ly Lg m
        const auto lg = growth_design(p);
        const Eigen::MatrixXd ly = indicator_design(p);
        Eigen::Matrix<double, kFirstOrder, kFirstOrder> eta_cov =
            lg * p.growth_cov * lg.transpose();
        for (std::size_t c = 0; c < kConstructs; ++c)
            for (std::size_t t = 0; t < kWaves; ++t)
                eta_cov(c * kWaves + t, c * kWaves + t) += p.wave_residual_var[c][t];
        const Eigen::Matrix<double, kFirstOrder, 1> eta_mean = lg * p.growth_means;

        const Eigen::MatrixXd h = ly.transpose() * g_sigma * ly;
        const Eigen::Matrix4d mg = lg.transpose() * h * lg;
        const Eigen::MatrixXd pl = g_sigma * ly * eta_cov;
        const Eigen::VectorXd mu_eta = ly.transpose() * g_mu;

        Eigen::VectorXd& g = *gradient;
        g.setZero(kNumFreeParams);
        g.segment<kGrowthFactors>(kMeansAt) = lg.transpose() * mu_eta;
        for (std::size_t r = 0; r < kGrowthFactors; ++r)
            for (std::size_t c = 0; c <= r; ++c)
                g(growth_cov_index(r, c)) = r == c ? mg(r, r) : 2.0 * mg(r, c);
        for (std::size_t f = 0; f < kFirstOrder; ++f) g(kWaveResidualAt + f) = h(f, f);
        for (std::size_t c = 0; c < kConstructs; ++c) {
            for (std::size_t k = 0; k < kIndicators; ++k) {
                double d_load = 0.0, d_int = 0.0, d_res = 0.0;
                for (std::size_t t = 0; t < kWaves; ++t) {
                    const auto i = column_index(c, t, k);
                    const auto f = c * kWaves + t;
                    d_load += 2.0 * pl(i, f) + g_mu(i) * eta_mean(f);
                    d_int += g_mu(i);
                    d_res += g_sigma(i, i);
                }
                if (k > 0) {
                    g(kLoadingsAt + c * 2 + (k - 1)) = d_load;
                    g(kInterceptsAt + c * 2 + (k - 1)) = d_int;
                }
                g(kIndicatorResidualAt + c * kIndicators + k) = d_res;
            }
        }
    }
    return {ll, false};
}

LoglikValue pattern_loglik(const ParamVector& theta, const DataMatrix& data)
{
    return pattern_loglik(theta, group_patterns(data));
}

LoglikValue casewise_loglik(const ParamVector& theta, const DataMatrix& data)
{
    const ModelMoments m = implied_moments(unpack(theta));
    double ll = 0.0;
    for (Eigen::Index r = 0; r < data.values.rows(); ++r) {
        std::vector<Eigen::Index> obs;
        for (Eigen::Index c = 0; c < data.values.cols(); ++c)
            if (data.mask(r, c)) obs.push_back(c);
        if (obs.empty()) throw Error(ErrorKind::RowWithoutData, fmt::format("row {} has no observed cell", r));
        const Eigen::LLT<Eigen::MatrixXd> llt(m.sigma(obs, obs));
        if (llt.info() != Eigen::Success) return {kBarrierLoglik, true};
        const Eigen::VectorXd d = data.values(r, obs).transpose() - m.mu(obs);
        const Eigen::VectorXd z = llt.matrixL().solve(d);
        const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        ll += -0.5 * (static_cast<double>(obs.size()) * kLog2Pi + logdet + z.squaredNorm());
    }
    return {ll, false};
}

ParamVector start_values(const DataMatrix& data)
{
    const auto n = static_cast<Eigen::Index>(data.rows());
    PopulationParams p;

    // observed-cell column moments
    Eigen::VectorXd col_mean = Eigen::VectorXd::Zero(kObserved);
    Eigen::VectorXd col_var = Eigen::VectorXd::Zero(kObserved);
    for (std::size_t j = 0; j < kObserved; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        double s = 0.0, ss = 0.0;
        double cnt = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (!data.mask(r, col)) continue;
            s += data.values(r, col);
            cnt += 1.0;
        }
        const double mean = cnt > 0.0 ? s / cnt : 0.0;
        for (Eigen::Index r = 0; r < n; ++r)
            if (data.mask(r, col)) ss += (data.values(r, col) - mean) * (data.values(r, col) - mean);
        col_mean(col) = mean;
        col_var(col) = cnt > 1.0 ? ss / (cnt - 1.0) : 1.0;
    }

    // per-row OLS of the marker indicator on time
    std::vector<Eigen::Vector4d> person;
    std::array<double, kConstructs> resid_ss{};
    std::array<double, kConstructs> resid_df{};
    for (Eigen::Index r = 0; r < n; ++r) {
        Eigen::Vector4d est;
        bool ok = true;
        for (std::size_t c = 0; c < kConstructs && ok; ++c) {
            double st = 0, sy = 0, stt = 0, sty = 0, cnt = 0;
            for (std::size_t t = 0; t < kWaves; ++t) {
                const auto col = static_cast<Eigen::Index>(column_index(c, t, 0));
                if (!data.mask(r, col)) continue;
                const double x = p.time_scores[t];
                const double y = data.values(r, col);
                st += x; sy += y; stt += x * x; sty += x * y; cnt += 1.0;
            }
            const double sxx = stt - st * st / std::max(cnt, 1.0);
            if (cnt < 2.0 || sxx <= 0.0) { ok = false; break; }
            const double slope = (sty - st * sy / cnt) / sxx;
            const double icept = (sy - slope * st) / cnt;
            est(2 * c) = icept;
            est(2 * c + 1) = slope;
            for (std::size_t t = 0; t < kWaves; ++t) {
                const auto col = static_cast<Eigen::Index>(column_index(c, t, 0));
                if (!data.mask(r, col)) continue;
                const double e = data.values(r, col) - icept - slope * p.time_scores[t];
                resid_ss[c] += e * e;
            }
            resid_df[c] += cnt - 2.0;
        }
        if (ok) person.push_back(est);
    }

    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
    if (person.size() >= 2) {
        for (const auto& e : person) mean += e;
        mean /= static_cast<double>(person.size());
        cov.setZero();
        for (const auto& e : person) cov += (e - mean) * (e - mean).transpose();
        cov /= static_cast<double>(person.size() - 1);
    } else {
        mean << col_mean(column_index(0, 0, 0)), 0.0, col_mean(column_index(1, 0, 0)), 0.0;
    }
    cov.diagonal().array() = cov.diagonal().array().max(0.05);
    if (cov.llt().info() != Eigen::Success) cov = Eigen::Matrix4d(cov.diagonal().asDiagonal());
    p.growth_means = mean;
    p.growth_cov = cov;

    for (std::size_t c = 0; c < kConstructs; ++c) {
        const double marker_resid = resid_df[c] > 0.0 ? resid_ss[c] / resid_df[c] : 0.5;
        p.wave_residual_var[c].fill(std::max(0.5 * marker_resid, 0.05));
        for (std::size_t k = 0; k < kIndicators; ++k) {
            double ratio = 0.0, shift = 0.0, var = 0.0;
            for (std::size_t t = 0; t < kWaves; ++t) {
                const auto ik = column_index(c, t, k);
                const auto i1 = column_index(c, t, 0);
                const double lam = std::sqrt(col_var(ik) / std::max(col_var(i1), 1e-8));
                ratio += lam;
                shift += col_mean(ik) - lam * col_mean(i1);
                var += col_var(ik);
            }
            ratio /= kWaves;
            shift /= kWaves;
            var /= kWaves;
            p.loadings[c][k] = k == 0 ? 1.0 : ratio;
            p.indicator_intercepts[c][k] = k == 0 ? 0.0 : shift;
            p.indicator_residual_var[c][k] =
                k == 0 ? std::max(0.5 * marker_resid, 0.05) : std::max(0.2 * var, 0.05);
        }
    }
    return pack(p);
}

bool is_admissible(const ParamVector& theta)
{
    if (!theta.allFinite()) return false;
    const PopulationParams p = unpack(theta);
    for (std::size_t a = 0; a < kGrowthFactors; ++a) {
        if (p.growth_cov(a, a) < 0.0) return false;
        for (std::size_t b = 0; b < a; ++b) {
            const double bound = std::sqrt(p.growth_cov(a, a) * p.growth_cov(b, b));
            if (std::abs(p.growth_cov(a, b)) > bound) return false;
        }
    }
    for (std::size_t c = 0; c < kConstructs; ++c) {
        for (double v : p.wave_residual_var[c]) if (v < 0.0) return false;
        for (double v : p.indicator_residual_var[c]) if (v < 0.0) return false;
    }
    return implied_moments(p).sigma.llt().info() == Eigen::Success;
}

FitResult fit(const DataMatrix& data, const std::optional<ParamVector>& start,
              RandomStream& stream, const FitOptions& options)
{
    const PatternData stats = group_patterns(data);
    const double scale = 1.0 / static_cast<double>(stats.rows);

    // minimize the per-row negative log-likelihood
    const Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const auto ll = pattern_loglik(x, stats, &grad);
        grad *= -scale;
        return -ll.value * scale;
    };
    const auto penalized = [&](const ParamVector& x) {
        return pattern_loglik(x, stats).penalized;
    };

    const ParamVector base = start ? *start : start_values(data);
    FitResult best;
    bool have_best = false;

    for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
        ParamVector x0 = base;
        if (attempt > 0) {
            for (int tries = 0; tries < 50; ++tries) {
                x0 = base;
                for (Eigen::Index j = 0; j < x0.size(); ++j)
                    x0(j) += options.restart_jitter * std::max(std::abs(base(j)), 0.1) * stream.normal();
                if (!penalized(x0)) break;
            }
        }
        if (penalized(x0)) continue;

        const BfgsResult r = minimize_bfgs(objective, x0, options.bfgs);
        FitResult cur;
        cur.theta_hat = r.x;
        cur.loglik = -r.value / scale;
        cur.converged = r.converged && !penalized(r.x);
        cur.n_iterations = r.iterations;
        cur.n_restarts = attempt;
        cur.gradient_norm = r.gradient.lpNorm<Eigen::Infinity>();
        if (!have_best || (cur.converged && !best.converged)
            || (cur.converged == best.converged && cur.loglik > best.loglik)) {
            best = std::move(cur);
            have_best = true;
        }
        if (best.converged) break;
    }

    if (!have_best) {
        best.theta_hat = base;
        best.loglik = kBarrierLoglik;
        best.converged = false;
        best.n_restarts = options.max_restarts;
        best.gradient_norm = std::numeric_limits<double>::infinity();
    }
    best.admissible = is_admissible(best.theta_hat);
    return best;
}

double slope_slope_corr(const ParamVector& theta)
{
    const double vb = theta(growth_cov_index(kSlopeB, kSlopeB));
    const double vh = theta(growth_cov_index(kSlopeH, kSlopeH));
    if (!(vb > 0.0 && vh > 0.0)) {
        throw Error(ErrorKind::InadmissibleForParam,
                    fmt::format("slope variances must be positive (got {}, {})", vb, vh));
    }
    return theta(growth_cov_index(kSlopeH, kSlopeB)) / std::sqrt(vb * vh);
}

double extract_param(const FitResult& fit, std::string_view name)
{
    if (!fit.converged) throw Error(ErrorKind::NonConverged, "fit did not converge");
    if (name == "slope_slope_corr") return slope_slope_corr(fit.theta_hat);
    const auto& names = parameter_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw Error(ErrorKind::ConfigError, fmt::format("unknown parameter '{}'", name));
    }
    return fit.theta_hat(std::distance(names.begin(), it));
}

}  // namespace bre
