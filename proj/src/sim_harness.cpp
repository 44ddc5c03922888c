#include "bre/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <omp.h>

#include "bre/errors.hpp"
#include "bre/rng.hpp"

namespace bre {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ArmOutcome fit_arm(const ConditionSpec& spec, const DataMatrix& data, RandomStream& stream)
{
    ArmOutcome out;
    out.estimates.assign(spec.params.size(), kNaN);
    FitResult f;
    try {
        f = fit(data, std::nullopt, stream, spec.fit_options);
    } catch (const Error&) {
        return out;
    }
    out.converged = f.converged;
    out.admissible = f.admissible;
    if (!f.converged) return out;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        try {
            out.estimates[i] = extract_param(f, spec.params[i]);
        } catch (const Error&) {
            out.estimates[i] = kNaN;
        }
    }
    return out;
}

void check_spec(const ConditionSpec& spec)
{
    spec.design.validate();
    if (spec.n < spec.design.groups()) {
        throw Error(ErrorKind::InsufficientSample,
                    fmt::format("n = {} is smaller than the {} design groups", spec.n,
                                spec.design.groups()));
    }
    if (spec.replications < 1) throw Error(ErrorKind::ConfigError, "replications must be >= 1");
}

}  // namespace

double ConditionSpec::true_value(const std::string& param) const
{
    if (param == "slope_slope_corr") return population.slope_slope_corr();
    const auto& names = parameter_names();
    const auto it = std::find(names.begin(), names.end(), param);
    if (it == names.end()) throw Error(ErrorKind::ConfigError, fmt::format("unknown parameter '{}'", param));
    return pack(population)(std::distance(names.begin(), it));
}

bool ArmOutcome::usable(std::size_t param) const
{
    return converged && admissible && param < estimates.size() && std::isfinite(estimates[param]);
}

bool ConditionResult::degenerate() const
{
    return std::any_of(metrics.begin(), metrics.end(),
                       [](const ParamMetrics& m) { return !m.report.has_value(); });
}

RepRecord run_replication(const ConditionSpec& spec, const ModelMoments& moments,
                          std::size_t rep_index)
{
    const auto seed = [&](StreamPurpose purpose) {
        return derive_seed(spec.master_seed, spec.condition_index, rep_index, purpose);
    };
    RepRecord rec;
    rec.rep = rep_index;

    RandomStream data_stream(seed(StreamPurpose::Data));
    const DataMatrix complete = generate_dataset(moments, spec.n, data_stream);

    RandomStream ref_stream(seed(StreamPurpose::ReferenceFit));
    rec.reference = fit_arm(spec, complete, ref_stream);

    RandomStream group_stream(seed(StreamPurpose::GroupAssignment));
    const auto labels = assign_groups(spec.n, spec.design, group_stream);
    const DataMatrix masked = apply_design(complete, labels, spec.design);

    RandomStream comp_stream(seed(StreamPurpose::ComparisonFit));
    rec.comparison = fit_arm(spec, masked, comp_stream);
    return rec;
}

RepRecord run_replication(const ConditionSpec& spec, std::size_t rep_index)
{
    return run_replication(spec, build_moments(spec.population), rep_index);
}

ConditionResult summarize_condition(const ConditionSpec& spec, std::vector<RepRecord> reps)
{
    ConditionResult res;
    res.spec = spec;
    res.reps = std::move(reps);

    for (const auto& r : res.reps) {
        if (!r.reference.converged) ++res.exclusions.nonconverged_ref;
        else if (!r.reference.admissible) ++res.exclusions.inadmissible_ref;
        if (!r.comparison.converged) ++res.exclusions.nonconverged_comp;
        else if (!r.comparison.admissible) ++res.exclusions.inadmissible_comp;
    }

    for (std::size_t p = 0; p < spec.params.size(); ++p) {
        ParamMetrics pm;
        pm.param = spec.params[p];
        pm.theta_true = spec.true_value(pm.param);
        for (const auto& r : res.reps) {
            if (r.reference.usable(p)) pm.reference.push_back(r.reference.estimates[p]);
            if (r.comparison.usable(p)) pm.comparison.push_back(r.comparison.estimates[p]);
        }
        if (pm.reference.size() < kMinUsableEstimates || pm.comparison.size() < kMinUsableEstimates) {
            pm.suppressed_reason = fmt::format(
                "{}: {} reference and {} comparison usable estimates (need {})",
                to_string(ErrorKind::ConditionDegenerate), pm.reference.size(),
                pm.comparison.size(), kMinUsableEstimates);
        } else {
            try {
                pm.report = compute_report(pm.reference, pm.comparison, pm.theta_true,
                                           spec.overlap_mode);
            } catch (const Error& e) {
                pm.suppressed_reason = e.what();
            }
        }
        res.metrics.push_back(std::move(pm));
    }
    return res;
}

ConditionResult run_condition(const ConditionSpec& spec, int workers)
{
    check_spec(spec);
    const ModelMoments moments = build_moments(spec.population);
    std::vector<RepRecord> reps(spec.replications);
    const auto count = static_cast<std::int64_t>(spec.replications);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(workers, 1))
    for (std::int64_t i = 0; i < count; ++i) {
        reps[static_cast<std::size_t>(i)] =
            run_replication(spec, moments, static_cast<std::size_t>(i));
    }
    return summarize_condition(spec, std::move(reps));
}

ConditionResult run_condition_serial(const ConditionSpec& spec)
{
    check_spec(spec);
    const ModelMoments moments = build_moments(spec.population);
    std::vector<RepRecord> reps;
    reps.reserve(spec.replications);
    for (std::size_t i = 0; i < spec.replications; ++i) {
        reps.push_back(run_replication(spec, moments, i));
    }
    return summarize_condition(spec, std::move(reps));
}

std::vector<ConditionSpec> expand_grid(const GridSpec& grid)
{
    if (grid.rho_levels.empty() || grid.n_levels.empty()) {
        throw Error(ErrorKind::ConfigError, "rho_levels and n_levels must be non-empty");
    }
    if (grid.replications < 1) throw Error(ErrorKind::ConfigError, "replications must be >= 1");
    std::vector<ConditionSpec> out;
    for (std::size_t ri = 0; ri < grid.rho_levels.size(); ++ri) {
        PopulationParams pop = grid.population;
        pop.set_slope_slope_corr(grid.rho_levels[ri]);
        for (std::size_t ni = 0; ni < grid.n_levels.size(); ++ni) {
            ConditionSpec s;
            s.condition_index = ri * grid.n_levels.size() + ni;
            s.rho = grid.rho_levels[ri];
            s.n = grid.n_levels[ni];
            s.replications = grid.replications;
            s.design = grid.design;
            s.population = pop;
            s.overlap_mode = grid.overlap_mode;
            s.params = grid.params;
            s.master_seed = grid.master_seed;
            s.fit_options = grid.fit_options;
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<ConditionResult> run_grid(const GridSpec& grid, int workers)
{
    std::vector<ConditionResult> out;
    for (const auto& spec : expand_grid(grid)) out.push_back(run_condition(spec, workers));
    return out;
}

std::string summary_line(const ConditionResult& r)
{
    std::string line = fmt::format("condition {:>3}  rho={:<5g} n={:<5}", r.spec.condition_index,
                                   r.spec.rho, r.spec.n);
    for (const auto& m : r.metrics) {
        if (m.report) {
            const auto& rep = *m.report;
            line += fmt::format("  {}: RE={:.1f}% BRE={:.3f} overlap={:.3f} ({}) AMRB={:.4f}",
                                m.param, rep.re_percent, rep.bre, rep.iqr_overlap,
                                to_string(rep.overlap_case), rep.amrb);
        } else {
            line += fmt::format("  {}: suppressed [{}]", m.param, m.suppressed_reason);
        }
    }
    const auto& e = r.exclusions;
    line += fmt::format("  excluded ref={}+{} comp={}+{} (nonconverged+inadmissible) of {}",
                        e.nonconverged_ref, e.inadmissible_ref, e.nonconverged_comp,
                        e.inadmissible_comp, r.spec.replications);
    return line;
}

}  // namespace bre
