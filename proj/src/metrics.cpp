#include "bre/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bre/errors.hpp"

namespace bre {
namespace {

void check_sample(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(ErrorKind::EmptySample, "estimate sample is empty");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::InvalidEstimate, "estimate sample contains a non-finite value");
        }
    }
}

std::vector<double> sorted_copy(std::span<const double> values)
{
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    return out;
}

void check_quartiles(const Quartiles& q)
{
    if (!std::isfinite(q.q1) || !std::isfinite(q.median) || !std::isfinite(q.q3)) {
        throw Error(ErrorKind::InvalidEstimate, "quartiles must be finite");
    }
    if (!(q.q1 <= q.median && q.median <= q.q3)) {
        throw Error(ErrorKind::InvalidEstimate, "quartiles must satisfy q1 <= median <= q3");
    }
}

}  // namespace

std::string_view to_string(OverlapMode mode)
{
    return mode == OverlapMode::Paper ? "paper" : "symmetric";
}

std::string_view to_string(OverlapCase kind)
{
    switch (kind) {
    case OverlapCase::Partial: return "PARTIAL";
    case OverlapCase::Containment: return "CONTAINMENT";
    case OverlapCase::Disjoint: return "DISJOINT";
    }
    return "PARTIAL";
}

OverlapMode parse_overlap_mode(std::string_view text)
{
    if (text == "paper" || text == "PAPER") return OverlapMode::Paper;
    if (text == "symmetric" || text == "SYMMETRIC") return OverlapMode::Symmetric;
    throw Error(ErrorKind::ConfigError,
                "overlap_mode must be 'paper' or 'symmetric', got '" + std::string(text) + "'");
}

double quantile_sorted(std::span<const double> sorted, double p)
{
    const auto n = sorted.size();
    if (n == 0) throw Error(ErrorKind::EmptySample, "estimate sample is empty");
    // zero-based position of h = (n - 1) p + 1
    const double pos = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n || frac == 0.0) return sorted[std::min(lo, n - 1)];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Quartiles quartiles(std::span<const double> values)
{
    check_sample(values);
    const auto s = sorted_copy(values);
    return {quantile_sorted(s, 0.25), quantile_sorted(s, 0.5), quantile_sorted(s, 0.75)};
}

double median(std::span<const double> values)
{
    check_sample(values);
    const auto s = sorted_copy(values);
    return quantile_sorted(s, 0.5);
}

double sample_variance(std::span<const double> values)
{
    check_sample(values);
    if (values.size() < 2) {
        throw Error(ErrorKind::InsufficientSample, "variance needs at least 2 values");
    }
    // two-pass for accuracy
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

Overlap iqr_overlap(const Quartiles& comparison, const Quartiles& reference, OverlapMode mode)
{
    check_quartiles(comparison);
    check_quartiles(reference);
    const double iqr_c = comparison.iqr();
    const double iqr_r = reference.iqr();

    if (mode == OverlapMode::Paper) {
        const bool contained = comparison.q1 >= reference.q1 && comparison.q3 <= reference.q3
                               && iqr_c < iqr_r;
        if (contained) {
            if (iqr_c == 0.0) {
                throw Error(ErrorKind::DegenerateDistribution,
                            "comparison IQR is zero inside the reference IQR");
            }
            return {iqr_r / iqr_c, OverlapCase::Containment};
        }
    }

    const double sum = iqr_c + iqr_r;
    if (sum == 0.0) {
        if (comparison.median == reference.median) return {1.0, OverlapCase::Partial};
        throw Error(ErrorKind::DegenerateDistribution,
                    "both IQRs are zero and the medians differ");
    }
    const double intersection = std::min(comparison.q3, reference.q3)
                                - std::max(comparison.q1, reference.q1);
    if (intersection <= 0.0) return {0.0, OverlapCase::Disjoint};
    return {2.0 * intersection / sum, OverlapCase::Partial};
}

double median_relative_bias(std::span<const double> estimates, double theta_true)
{
    if (theta_true == 0.0) {
        throw Error(ErrorKind::ZeroTrueParameter,
                    "relative bias is undefined for a true value of 0");
    }
    if (!std::isfinite(theta_true)) {
        throw Error(ErrorKind::InvalidEstimate, "true parameter value must be finite");
    }
    check_sample(estimates);
    std::vector<double> rb;
    rb.reserve(estimates.size());
    for (double e : estimates) rb.push_back((e - theta_true) / theta_true);
    std::sort(rb.begin(), rb.end());
    return quantile_sorted(rb, 0.5);
}

double traditional_re(std::span<const double> reference, std::span<const double> comparison)
{
    if (reference.size() < 2 || comparison.size() < 2) {
        throw Error(ErrorKind::InsufficientSample,
                    "traditional RE needs at least 2 estimates per arm");
    }
    const double var_ref = sample_variance(reference);
    const double var_comp = sample_variance(comparison);
    if (var_comp == 0.0) {
        throw Error(ErrorKind::DegenerateDistribution, "comparison variance is zero");
    }
    return 100.0 * var_ref / var_comp;
}

double bre_score(double iqr_overlap, double median_rb)
{
    if (!std::isfinite(iqr_overlap) || !std::isfinite(median_rb)) {
        throw Error(ErrorKind::InvalidEstimate, "BRE inputs must be finite");
    }
    // + 0.0 turns a -0 from a zero overlap into 0
    return iqr_overlap * (1.0 - std::abs(median_rb)) + 0.0;
}

MetricReport compute_report(std::span<const double> reference,
                            std::span<const double> comparison,
                            double theta_true,
                            OverlapMode mode)
{
    MetricReport r;
    r.n_reference = reference.size();
    r.n_comparison = comparison.size();
    r.re_percent = traditional_re(reference, comparison);
    const auto ov = iqr_overlap(quartiles(comparison), quartiles(reference), mode);
    r.iqr_overlap = ov.ratio;
    r.overlap_case = ov.kind;
    r.median_rb = median_relative_bias(comparison, theta_true);
    r.amrb = std::abs(r.median_rb);
    r.bre = bre_score(r.iqr_overlap, r.median_rb);
    return r;
}

}  // namespace bre
