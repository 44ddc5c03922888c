#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bre/sim_harness.hpp"

namespace bre {

/// 17 significant digits, "nan" for NaN. Round-trips every finite double.
std::string format_double(double x);

inline constexpr const char* kEstimatesHeader =
    "condition_id,rho,n,rep,arm,converged,admissible,param,estimate";
inline constexpr const char* kMetricsHeader =
    "condition_id,rho,n,param,re_percent,iqr_overlap,overlap_case,median_rb,amrb,bre,"
    "n_ref,n_comp,excluded_ref,excluded_comp";

/// One row per (replication, arm, tracked parameter), reference arm first.
void write_estimates_csv(std::ostream& out, const std::vector<ConditionResult>& results);

/// One row per (condition, tracked parameter). Suppressed metrics are written
/// as "nan" with overlap_case "NA".
void write_metrics_csv(std::ostream& out, const std::vector<ConditionResult>& results);

/// Per-condition arrays of usable estimates and relative biases for
/// ridgeline / boxplot rendering.
void write_plotdata_json(std::ostream& out, const std::vector<ConditionResult>& results);

/// Writes estimates.csv, metrics.csv and plotdata.json into `dir` (created if
/// needed). Throws IoError if the directory cannot be written.
void emit_outputs(const std::filesystem::path& dir, const std::vector<ConditionResult>& results);

/// Minimal CSV table: header names plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Fixed-width summary of a metrics.csv table.
std::string render_metrics_summary(const CsvTable& metrics);

}  // namespace bre
