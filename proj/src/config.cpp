#include "bre/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bre/errors.hpp"

namespace bre {
namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, const std::string& why)
{
    throw Error(ErrorKind::ConfigError, fmt::format("{}: {}", key, why));
}

std::vector<std::string> split_list(std::string_view value, std::string_view seps = ",")
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto pos = value.find_first_of(seps, start);
        const auto item = trim(value.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (!item.empty()) out.emplace_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view key, const std::string& s)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        bad(key, fmt::format("'{}' is not a finite number", s));
    }
}

std::uint64_t to_unsigned(std::string_view key, const std::string& s)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        bad(key, fmt::format("'{}' is not a non-negative integer", s));
    }
    return v;
}

std::vector<double> doubles(std::string_view key, std::string_view value)
{
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
    if (out.empty()) bad(key, "expected at least one value");
    return out;
}

std::array<double, 2> pair_of(std::string_view key, std::string_view value)
{
    const auto v = doubles(key, value);
    if (v.size() == 1) return {v[0], v[0]};
    if (v.size() == 2) return {v[0], v[1]};
    bad(key, "expected 1 value or 2 values (B, H)");
}

double single(std::string_view key, std::string_view value)
{
    const auto v = doubles(key, value);
    if (v.size() != 1) bad(key, "expected exactly one value");
    return v[0];
}

ConstructIndicator per_indicator(std::string_view key, std::string_view value)
{
    const auto v = doubles(key, value);
    ConstructIndicator out{};
    if (v.size() == kIndicators) {
        for (std::size_t c = 0; c < kConstructs; ++c)
            for (std::size_t k = 0; k < kIndicators; ++k) out[c][k] = v[k];
    } else if (v.size() == kConstructs * kIndicators) {
        for (std::size_t c = 0; c < kConstructs; ++c)
            for (std::size_t k = 0; k < kIndicators; ++k) out[c][k] = v[c * kIndicators + k];
    } else {
        bad(key, "expected 3 values (shared) or 6 values (B then H)");
    }
    return out;
}

}  // namespace

PopulationParams PopulationSettings::build(double slope_slope_corr) const
{
    PopulationParams p;
    p.growth_means << intercept_means[0], slope_means[0], intercept_means[1], slope_means[1];
    const Eigen::Vector4d sd(std::sqrt(intercept_var[0]), std::sqrt(slope_var[0]),
                             std::sqrt(intercept_var[1]), std::sqrt(slope_var[1]));
    Eigen::Matrix4d corr = Eigen::Matrix4d::Identity();
    const auto set = [&](std::size_t a, std::size_t b, double r) { corr(a, b) = corr(b, a) = r; };
    set(kInterceptB, kSlopeB, intercept_slope_corr[0]);
    set(kInterceptH, kSlopeH, intercept_slope_corr[1]);
    set(kInterceptB, kInterceptH, cross_intercept_corr);
    set(kInterceptB, kSlopeH, cross_intercept_slope_corr);
    set(kInterceptH, kSlopeB, cross_intercept_slope_corr);
    p.growth_cov = sd.asDiagonal() * corr * sd.asDiagonal();
    p.time_scores = time_scores;
    p.wave_residual_var = wave_residual_var;
    p.loadings = loadings;
    p.indicator_residual_var = indicator_residual_var;
    p.indicator_intercepts = indicator_intercepts;
    p.set_slope_slope_corr(slope_slope_corr);
    return p;
}

void RunConfig::validate() const
{
    if (!master_seed) bad("master_seed", "a seed is required (config key or --seed)");
    if (rho_levels.empty()) bad("rho_levels", "must list at least one level");
    if (n_levels.empty()) bad("n_levels", "must list at least one level");
    if (replications < 1) bad("replications", "must be >= 1");
    if (workers < 1) bad("workers", "must be >= 1");
    if (params.empty()) bad("params", "must list at least one parameter");
    for (double rho : rho_levels) {
        if (!(rho > -1.0 && rho < 1.0)) {
            bad("rho_levels", fmt::format("rho must lie in (-1, 1), got {}", rho));
        }
    }
    for (auto v : population.intercept_var)
        if (!(v > 0.0)) bad("intercept_var", "must be > 0");
    for (auto v : population.slope_var)
        if (!(v > 0.0)) bad("slope_var", "must be > 0");
    const MissingDesign d = design();
    for (auto n : n_levels) {
        if (n < d.groups()) {
            bad("n_levels", fmt::format("n = {} is smaller than the {} groups of design '{}'", n,
                                        d.groups(), d.name));
        }
    }
    for (double rho : rho_levels) {
        try {
            build_moments(population.build(rho));
        } catch (const Error& e) {
            bad("population", fmt::format("invalid at rho = {}: {}", rho, e.what()));
        }
    }
    ConditionSpec probe;
    probe.population = population.build(rho_levels.front());
    for (const auto& p : params) {
        try {
            probe.true_value(p);
        } catch (const Error& e) {
            bad("params", e.what());
        }
    }
}

MissingDesign RunConfig::design() const
{
    if (design_name == "custom") {
        if (design_mask.empty()) bad("design_mask", "required when design = custom");
        return custom_design("custom", design_mask);
    }
    if (!design_mask.empty()) bad("design_mask", "only allowed when design = custom");
    try {
        return design_by_name(design_name);
    } catch (const Error&) {
        bad("design", fmt::format("unknown design '{}' (swmd6, complete, custom)", design_name));
    }
}

GridSpec RunConfig::to_grid() const
{
    validate();
    GridSpec g;
    g.master_seed = *master_seed;
    g.rho_levels = rho_levels;
    g.n_levels = n_levels;
    g.replications = replications;
    g.design = design();
    g.population = population.build(rho_levels.front());
    g.overlap_mode = overlap_mode;
    g.params = params;
    return g;
}

RunConfig parse_config(std::string_view text)
{
    RunConfig cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::ConfigError,
                        fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        auto& pop = cfg.population;

        if (key == "master_seed") {
            cfg.master_seed = to_unsigned(key, std::string(value));
        } else if (key == "rho_levels") {
            cfg.rho_levels = doubles(key, value);
        } else if (key == "n_levels") {
            cfg.n_levels.clear();
            for (const auto& item : split_list(value)) cfg.n_levels.push_back(to_unsigned(key, item));
        } else if (key == "replications") {
            cfg.replications = to_unsigned(key, std::string(value));
        } else if (key == "overlap_mode") {
            try {
                cfg.overlap_mode = parse_overlap_mode(value);
            } catch (const Error&) {
                bad(key, fmt::format("must be paper or symmetric, got '{}'", value));
            }
        } else if (key == "design") {
            cfg.design_name = std::string(value);
        } else if (key == "design_mask") {
            cfg.design_mask = split_list(value, ";, \t");
        } else if (key == "params") {
            cfg.params = split_list(value);
        } else if (key == "output_dir") {
            cfg.output_dir = std::string(value);
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(to_unsigned(key, std::string(value)));
        } else if (key == "intercept_means") {
            pop.intercept_means = pair_of(key, value);
        } else if (key == "slope_means") {
            pop.slope_means = pair_of(key, value);
        } else if (key == "intercept_var") {
            pop.intercept_var = pair_of(key, value);
        } else if (key == "slope_var") {
            pop.slope_var = pair_of(key, value);
        } else if (key == "intercept_slope_corr") {
            pop.intercept_slope_corr = pair_of(key, value);
        } else if (key == "cross_intercept_corr") {
            pop.cross_intercept_corr = single(key, value);
        } else if (key == "cross_intercept_slope_corr") {
            pop.cross_intercept_slope_corr = single(key, value);
        } else if (key == "wave_residual_var") {
            const auto v = doubles(key, value);
            for (std::size_t c = 0; c < kConstructs; ++c) {
                for (std::size_t t = 0; t < kWaves; ++t) {
                    if (v.size() == 1) pop.wave_residual_var[c][t] = v[0];
                    else if (v.size() == 2) pop.wave_residual_var[c][t] = v[c];
                    else if (v.size() == kFirstOrder) pop.wave_residual_var[c][t] = v[c * kWaves + t];
                    else bad(key, "expected 1, 2 or 10 values");
                }
            }
        } else if (key == "loadings") {
            pop.loadings = per_indicator(key, value);
        } else if (key == "indicator_residual_var") {
            pop.indicator_residual_var = per_indicator(key, value);
        } else if (key == "indicator_intercepts") {
            pop.indicator_intercepts = per_indicator(key, value);
        } else if (key == "time_scores") {
            const auto v = doubles(key, value);
            if (v.size() != kWaves) bad(key, "expected 5 values");
            std::copy(v.begin(), v.end(), pop.time_scores.begin());
        } else {
            throw Error(ErrorKind::ConfigError,
                        fmt::format("{}: unknown key (line {})", key, line_no));
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::ConfigError, fmt::format("config: cannot read '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace bre
