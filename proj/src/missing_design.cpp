#include "bre/missing_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "bre/errors.hpp"

namespace bre {

void MissingDesign::validate() const
{
    if (group_wave_mask.empty()) {
        throw Error(ErrorKind::ConfigError, fmt::format("design '{}' has no groups", name));
    }
    for (const auto& row : group_wave_mask) {
        if (row.size() != kWaves) {
            throw Error(ErrorKind::ConfigError,
                        fmt::format("design '{}' rows must have {} waves", name, kWaves));
        }
        if (std::none_of(row.begin(), row.end(), [](bool b) { return b; })) {
            throw Error(ErrorKind::ConfigError,
                        fmt::format("design '{}' has a group observed at no wave", name));
        }
    }
    if (group_allocation.size() != group_wave_mask.size()) {
        throw Error(ErrorKind::ConfigError,
                    fmt::format("design '{}' allocation size mismatch", name));
    }
    const double total = std::accumulate(group_allocation.begin(), group_allocation.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorKind::ConfigError,
                    fmt::format("design '{}' allocation must sum to 1", name));
    }
}

MissingDesign swmd6()
{
    MissingDesign d;
    d.name = "swmd6";
    constexpr std::size_t groups = 6;
    d.group_wave_mask.assign(groups, std::vector<bool>(kWaves, true));
    // group index g (0-based 1..5) skips wave 5 - g (0-based)
    for (std::size_t g = 1; g < groups; ++g) d.group_wave_mask[g][kWaves - g] = false;
    d.group_allocation.assign(groups, 1.0 / groups);
    return d;
}

MissingDesign no_missing()
{
    return MissingDesign{"complete", {std::vector<bool>(kWaves, true)}, {1.0}};
}

MissingDesign custom_design(std::string name, const std::vector<std::string>& rows)
{
    MissingDesign d;
    d.name = std::move(name);
    for (const auto& row : rows) {
        std::vector<bool> waves;
        for (char ch : row) {
            if (ch == '1') waves.push_back(true);
            else if (ch == '0') waves.push_back(false);
            else throw Error(ErrorKind::ConfigError,
                             fmt::format("design mask rows may contain only 0/1, got '{}'", row));
        }
        d.group_wave_mask.push_back(std::move(waves));
    }
    d.group_allocation.assign(d.group_wave_mask.size(),
                              d.group_wave_mask.empty() ? 0.0 : 1.0 / d.group_wave_mask.size());
    d.validate();
    return d;
}

MissingDesign design_by_name(std::string_view name)
{
    if (name == "swmd6") return swmd6();
    if (name == "complete") return no_missing();
    throw Error(ErrorKind::ConfigError, fmt::format("unknown design '{}'", name));
}

std::vector<std::size_t> assign_groups(std::size_t n, const MissingDesign& design,
                                       RandomStream& stream)
{
    const auto g = design.groups();
    if (n < g) {
        throw Error(ErrorKind::InsufficientSample,
                    fmt::format("n = {} is smaller than the {} design groups", n, g));
    }
    std::vector<std::size_t> labels;
    labels.reserve(n);
    const auto base = n / g;
    const auto extra = n % g;
    for (std::size_t grp = 0; grp < g; ++grp) {
        labels.insert(labels.end(), base + (grp < extra ? 1 : 0), grp);
    }
    // Fisher-Yates on our own stream; std::shuffle's algorithm is unspecified
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(labels[i], labels[stream.below(i + 1)]);
    }
    return labels;
}

DataMatrix apply_design(const DataMatrix& data, const std::vector<std::size_t>& labels,
                        const MissingDesign& design)
{
    if (labels.size() != data.rows()) {
        throw Error(ErrorKind::InvalidGroup,
                    fmt::format("{} labels for {} rows", labels.size(), data.rows()));
    }
    if (data.cols() != kObserved) {
        throw Error(ErrorKind::InvalidGroup, "designs apply to the 30-column growth layout");
    }
    DataMatrix out = data;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] >= design.groups()) {
            throw Error(ErrorKind::InvalidGroup,
                        fmt::format("row {} has group {} but the design has {}", r, labels[r],
                                    design.groups()));
        }
        const auto& waves = design.group_wave_mask[labels[r]];
        for (std::size_t col = 0; col < kObserved; ++col) {
            if (!waves[wave_of_column(col)]) {
                out.mask(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = false;
            }
        }
    }
    return out;
}

}  // namespace bre
