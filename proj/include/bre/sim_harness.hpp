#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bre/fiml.hpp"
#include "bre/lgm_model.hpp"
#include "bre/metrics.hpp"
#include "bre/missing_design.hpp"

namespace bre {

inline constexpr std::size_t kMinUsableEstimates = 10;

struct ConditionSpec {
    std::size_t condition_index = 0;
    double rho = 0.3;
    std::size_t n = 100;
    std::size_t replications = 200;
    MissingDesign design = swmd6();
    PopulationParams population = PopulationParams::defaults(0.3);
    OverlapMode overlap_mode = OverlapMode::Paper;
    std::vector<std::string> params{"slope_slope_corr"};
    std::uint64_t master_seed = 0;
    FitOptions fit_options{};

    /// Population value of a tracked parameter.
    double true_value(const std::string& param) const;
};

struct ArmOutcome {
    bool converged = false;
    bool admissible = false;
    /// one entry per tracked parameter; NaN where the fit gives no value
    std::vector<double> estimates;

    bool usable(std::size_t param) const;
};

struct RepRecord {
    std::size_t rep = 0;
    ArmOutcome reference;   // complete data
    ArmOutcome comparison;  // same draw, design-masked, FIML
};

struct ExclusionCounts {
    std::size_t nonconverged_ref = 0;
    std::size_t nonconverged_comp = 0;
    std::size_t inadmissible_ref = 0;
    std::size_t inadmissible_comp = 0;
};

struct ParamMetrics {
    std::string param;
    double theta_true = 0.0;
    std::vector<double> reference;   // usable estimates in replication order
    std::vector<double> comparison;
    std::optional<MetricReport> report;
    std::string suppressed_reason;  // set when report is empty
};

struct ConditionResult {
    ConditionSpec spec;
    std::vector<RepRecord> reps;
    ExclusionCounts exclusions;
    std::vector<ParamMetrics> metrics;

    /// true when some tracked parameter's metrics were suppressed
    bool degenerate() const;
};

/// One generated dataset feeds both arms: the complete-data fit is the
/// reference, the design-masked FIML fit is the comparison.
RepRecord run_replication(const ConditionSpec& spec, const ModelMoments& moments,
                          std::size_t rep_index);
RepRecord run_replication(const ConditionSpec& spec, std::size_t rep_index);

/// Pools replication records into exclusion counts and metrics.
ConditionResult summarize_condition(const ConditionSpec& spec, std::vector<RepRecord> reps);

/// Replications spread over `workers` OpenMP threads; records are merged by
/// replication index, so the result does not depend on `workers`.
ConditionResult run_condition(const ConditionSpec& spec, int workers);

/// Single-threaded reference for run_condition.
ConditionResult run_condition_serial(const ConditionSpec& spec);

struct GridSpec {
    std::uint64_t master_seed = 0;
    std::vector<double> rho_levels{0.1, 0.3, 0.55};
    std::vector<std::size_t> n_levels{40, 60, 80, 100, 300, 500, 800, 1000};
    std::size_t replications = 200;
    MissingDesign design = swmd6();
    /// population template; rho is inserted per condition
    PopulationParams population = PopulationParams::defaults(0.3);
    OverlapMode overlap_mode = OverlapMode::Paper;
    std::vector<std::string> params{"slope_slope_corr"};
    FitOptions fit_options{};
};

/// Cartesian product, rho-major: condition_index = rho_index * |n| + n_index.
std::vector<ConditionSpec> expand_grid(const GridSpec& grid);

std::vector<ConditionResult> run_grid(const GridSpec& grid, int workers);

std::string summary_line(const ConditionResult& result);

}  // namespace bre
