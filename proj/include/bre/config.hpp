#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bre/lgm_model.hpp"
#include "bre/sim_harness.hpp"

namespace bre {

/// Scalar knobs the growth population is assembled from. Pairs are (B, H).
struct PopulationSettings {
    std::array<double, 2> intercept_means{1.0, 1.0};
    std::array<double, 2> slope_means{0.2, 0.2};
    std::array<double, 2> intercept_var{1.0, 1.0};
    std::array<double, 2> slope_var{0.25, 0.25};
    std::array<double, 2> intercept_slope_corr{0.2, 0.2};
    double cross_intercept_corr = 0.3;
    double cross_intercept_slope_corr = 0.0;
    ConstructWave wave_residual_var{{{0.5, 0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5, 0.5}}};
    ConstructIndicator loadings{{{1.0, 0.9, 0.8}, {1.0, 0.9, 0.8}}};
    ConstructIndicator indicator_residual_var{{{0.8, 0.65, 0.5}, {0.8, 0.65, 0.5}}};
    ConstructIndicator indicator_intercepts{{{0.0, 0.2, 0.4}, {0.0, 0.2, 0.4}}};
    std::array<double, kWaves> time_scores{0.0, 1.0, 2.0, 3.0, 4.0};

    PopulationParams build(double slope_slope_corr) const;
};

/// Simulation run configuration.
///
/// Plain text, one `key = value` per line, `#` starts a comment, lists are
/// comma separated. Recognized keys:
///
///   master_seed            unsigned 64-bit (required here or via --seed)
///   rho_levels             e.g. 0.1, 0.3, 0.55
///   n_levels               e.g. 40, 60, 80, 100, 300, 500, 800, 1000
///   replications           >= 1 (default 200)
///   overlap_mode           paper | symmetric
///   design                 swmd6 | complete | custom
///   design_mask            custom groups as 0/1 wave strings, e.g. 11111;11110
///   params                 tracked parameters (default slope_slope_corr)
///   output_dir             directory for estimates.csv, metrics.csv, plotdata.json
///   workers                worker threads (BRE_SIM_WORKERS overrides)
///   intercept_means, slope_means, intercept_var, slope_var,
///   intercept_slope_corr   1 value (both constructs) or 2 values (B, H)
///   cross_intercept_corr, cross_intercept_slope_corr   1 value
///   wave_residual_var      1, 2 (per construct) or 10 values
///   loadings, indicator_residual_var, indicator_intercepts   3 or 6 values
///   time_scores            5 strictly increasing values
///
/// Unknown keys are errors.
struct RunConfig {
    std::optional<std::uint64_t> master_seed;
    std::vector<double> rho_levels{0.1, 0.3, 0.55};
    std::vector<std::size_t> n_levels{40, 60, 80, 100, 300, 500, 800, 1000};
    std::size_t replications = 200;
    OverlapMode overlap_mode = OverlapMode::Paper;
    std::string design_name = "swmd6";
    std::vector<std::string> design_mask;
    std::vector<std::string> params{"slope_slope_corr"};
    std::filesystem::path output_dir = "bre_out";
    int workers = 1;
    PopulationSettings population;

    /// Checks every invariant, naming the offending key on failure.
    void validate() const;
    MissingDesign design() const;
    GridSpec to_grid() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace bre
