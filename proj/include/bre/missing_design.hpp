#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bre/lgm_model.hpp"
#include "bre/rng.hpp"

namespace bre {

/// Planned wave-missingness design: one row per group, one column per wave,
/// true = the group is measured at that wave.
struct MissingDesign {
    std::string name;
    std::vector<std::vector<bool>> group_wave_mask;
    std::vector<double> group_allocation;

    std::size_t groups() const { return group_wave_mask.size(); }
    void validate() const;
};

/// Simple wave missing design with six groups: group 1 complete, group g
/// (g = 2..6) skips wave 7 - g.
MissingDesign swmd6();

/// Single complete group; masked and complete arms coincide.
MissingDesign no_missing();

/// Builds a design from rows of '0'/'1' characters (e.g. "11110").
MissingDesign custom_design(std::string name, const std::vector<std::string>& rows);

/// Looks up a shipped design ("swmd6", "complete").
MissingDesign design_by_name(std::string_view name);

/// Balanced allocation: floor(n / G) rows per group, the n mod G remainder
/// to the lowest-indexed groups, then a uniform shuffle of the labels.
/// Labels are zero-based.
std::vector<std::size_t> assign_groups(std::size_t n, const MissingDesign& design,
                                       RandomStream& stream);

/// Masks every indicator of both constructs at the waves a row's group skips.
/// Values are untouched.
DataMatrix apply_design(const DataMatrix& data, const std::vector<std::size_t>& labels,
                        const MissingDesign& design);

}  // namespace bre
