// bre_sim: simulation grid runner and standalone efficiency-metric calculator.
//
//   bre_sim simulate --config run.cfg [--seed S] [--reps R] [--out DIR] [--workers W]
//   bre_sim metrics  --input estimates.csv --truth THETA [--mode paper|symmetric]
//   bre_sim report   --input-dir DIR
//
// Exit codes: 0 success, 2 configuration / input error, 3 some condition had
// too few usable estimates, 4 output directory not writable.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bre/config.hpp"
#include "bre/errors.hpp"
#include "bre/metrics.hpp"
#include "bre/output.hpp"
#include "bre/sim_harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitIo = 4;

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out;
    std::optional<int> workers;
};

int run_simulate(const SimulateArgs& args)
{
    bre::RunConfig cfg;
    bre::GridSpec grid;
    try {
        cfg = bre::load_config(args.config);
        if (args.seed) cfg.master_seed = *args.seed;
        if (args.reps) cfg.replications = *args.reps;
        if (args.out) cfg.output_dir = *args.out;
        if (const char* env = std::getenv("BRE_SIM_WORKERS")) {
            try {
                cfg.workers = std::stoi(env);
            } catch (const std::exception&) {
                throw bre::Error(bre::ErrorKind::ConfigError,
                                 fmt::format("BRE_SIM_WORKERS: '{}' is not an integer", env));
            }
        }
        if (args.workers) cfg.workers = *args.workers;
        grid = cfg.to_grid();
    } catch (const bre::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
        std::cerr << "cannot create output directory '" << cfg.output_dir.string() << "'\n";
        return kExitIo;
    }

    std::vector<bre::ConditionResult> results;
    bool degenerate = false;
    for (const auto& spec : bre::expand_grid(grid)) {
        results.push_back(bre::run_condition(spec, cfg.workers));
        degenerate = degenerate || results.back().degenerate();
        std::cout << bre::summary_line(results.back()) << std::endl;
    }

    try {
        bre::emit_outputs(cfg.output_dir, results);
    } catch (const bre::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitIo;
    }
    return degenerate ? kExitDegenerate : kExitOk;
}

int run_metrics(const std::string& input, double truth, const std::string& mode_text)
{
    try {
        const auto mode = bre::parse_overlap_mode(mode_text);
        std::ifstream in(input);
        if (!in) {
            std::cerr << "cannot read '" << input << "'\n";
            return kExitConfig;
        }
        std::vector<double> reference;
        std::vector<double> comparison;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) {
                std::cerr << "line " << line_no << ": expected 'label,estimate'\n";
                return kExitConfig;
            }
            const std::string label = line.substr(0, comma);
            const std::string value = line.substr(comma + 1);
            if (line_no == 1 && label == "label") continue;
            double v = 0.0;
            try {
                v = std::stod(value);
            } catch (const std::exception&) {
                std::cerr << "line " << line_no << ": '" << value << "' is not a number\n";
                return kExitConfig;
            }
            if (label == "reference") reference.push_back(v);
            else if (label == "comparison") comparison.push_back(v);
            else {
                std::cerr << "line " << line_no << ": label must be reference or comparison\n";
                return kExitConfig;
            }
        }
        const auto r = bre::compute_report(reference, comparison, truth, mode);
        std::cout << "re_percent: " << bre::format_double(r.re_percent) << '\n'
                  << "iqr_overlap: " << bre::format_double(r.iqr_overlap) << '\n'
                  << "overlap_case: " << bre::to_string(r.overlap_case) << '\n'
                  << "median_rb: " << bre::format_double(r.median_rb) << '\n'
                  << "amrb: " << bre::format_double(r.amrb) << '\n'
                  << "bre: " << bre::format_double(r.bre) << '\n'
                  << "n_reference: " << r.n_reference << '\n'
                  << "n_comparison: " << r.n_comparison << '\n';
        return kExitOk;
    } catch (const bre::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int run_report(const std::string& dir)
{
    try {
        const auto table = bre::read_csv(std::filesystem::path(dir) / "metrics.csv");
        std::cout << bre::render_metrics_summary(table);
        return kExitOk;
    } catch (const bre::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"BRE / RE Monte Carlo simulation and metrics"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run the condition grid");
    simulate->add_option("--config", sim.config, "run configuration file")->required();
    simulate->add_option("--seed", sim.seed, "master seed (overrides config)");
    simulate->add_option("--reps", sim.reps, "replications per condition (overrides config)");
    simulate->add_option("--out", sim.out, "output directory (overrides config)");
    simulate->add_option("--workers", sim.workers, "worker threads (overrides config and env)");

    std::string metrics_input;
    double truth = 0.0;
    std::string mode = "paper";
    auto* metrics = app.add_subcommand("metrics", "compute RE and BRE from a label,estimate CSV");
    metrics->add_option("--input", metrics_input, "CSV of label,estimate rows")->required();
    metrics->add_option("--truth", truth, "true parameter value")->required();
    metrics->add_option("--mode", mode, "overlap mode: paper or symmetric");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "print the summary table of an existing run");
    report->add_option("--input-dir", report_dir, "directory holding metrics.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (*simulate) return run_simulate(sim);
    if (*metrics) return run_metrics(metrics_input, truth, mode);
    return run_report(report_dir);
}
