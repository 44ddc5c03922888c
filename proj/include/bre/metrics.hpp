#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace bre {

/// (Q1, median, Q3) of an estimate distribution.
struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;

    double iqr() const noexcept { return q3 - q1; }
    bool operator==(const Quartiles&) const = default;
};

/// How the precision component treats a comparison IQR nested inside the
/// reference IQR. `Paper` returns IQR_ref / IQR_comp for strict containment;
/// `Symmetric` always uses the bounded 2|A∩B| / (|A| + |B|) form.
enum class OverlapMode { Paper, Symmetric };

enum class OverlapCase { Partial, Containment, Disjoint };

struct Overlap {
    double ratio = 0.0;
    OverlapCase kind = OverlapCase::Partial;
};

struct MetricReport {
    double re_percent = 0.0;
    double iqr_overlap = 0.0;
    OverlapCase overlap_case = OverlapCase::Partial;
    double median_rb = 0.0;
    double amrb = 0.0;
    double bre = 0.0;
    std::size_t n_reference = 0;
    std::size_t n_comparison = 0;
};

std::string_view to_string(OverlapMode mode);
std::string_view to_string(OverlapCase kind);
OverlapMode parse_overlap_mode(std::string_view text);

/// Quantile of an ascending-sorted, non-empty sample by linear interpolation
/// between order statistics at plotting position h = (n - 1) p + 1.
double quantile_sorted(std::span<const double> sorted, double p);

/// Quartiles of the whole sample (nothing is trimmed). Order of `values`
/// does not matter.
Quartiles quartiles(std::span<const double> values);

double median(std::span<const double> values);

/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> values);

Overlap iqr_overlap(const Quartiles& comparison, const Quartiles& reference,
                    OverlapMode mode = OverlapMode::Paper);

/// Median over replications of (estimate - theta) / theta.
double median_relative_bias(std::span<const double> estimates, double theta_true);

/// 100 * var(reference) / var(comparison).
double traditional_re(std::span<const double> reference, std::span<const double> comparison);

/// overlap * (1 - |median_rb|). Deliberately unclamped: negative values flag
/// an estimator whose median relative bias exceeds 100%.
double bre_score(double iqr_overlap, double median_rb);

/// Full report. Only the comparison sample enters the bias factor.
MetricReport compute_report(std::span<const double> reference,
                            std::span<const double> comparison,
                            double theta_true,
                            OverlapMode mode = OverlapMode::Paper);

}  // namespace bre
