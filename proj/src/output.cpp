#include "bre/output.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "bre/errors.hpp"

namespace bre {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write '{}'", path.string()));
    return out;
}

void write_array(std::ostream& out, const std::vector<double>& values)
{
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_double(values[i]);
    }
    out << ']';
}

std::vector<double> relative_bias(const std::vector<double>& values, double theta)
{
    std::vector<double> out;
    if (theta == 0.0) return out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - theta) / theta);
    return out;
}

}  // namespace

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

void write_estimates_csv(std::ostream& out, const std::vector<ConditionResult>& results)
{
    out << kEstimatesHeader << '\n';
    for (const auto& r : results) {
        const auto prefix = fmt::format("{},{},{}", r.spec.condition_index,
                                        format_double(r.spec.rho), r.spec.n);
        for (const auto& rec : r.reps) {
            for (const auto* arm : {&rec.reference, &rec.comparison}) {
                const char* arm_name = arm == &rec.reference ? "reference" : "comparison";
                for (std::size_t p = 0; p < r.spec.params.size(); ++p) {
                    out << prefix << ',' << rec.rep << ',' << arm_name << ','
                        << (arm->converged ? 1 : 0) << ',' << (arm->admissible ? 1 : 0) << ','
                        << r.spec.params[p] << ',' << format_double(arm->estimates[p]) << '\n';
                }
            }
        }
    }
}

void write_metrics_csv(std::ostream& out, const std::vector<ConditionResult>& results)
{
    out << kMetricsHeader << '\n';
    const std::string nan = format_double(std::nan(""));
    for (const auto& r : results) {
        for (const auto& m : r.metrics) {
            out << r.spec.condition_index << ',' << format_double(r.spec.rho) << ',' << r.spec.n
                << ',' << m.param << ',';
            if (m.report) {
                const auto& rep = *m.report;
                out << format_double(rep.re_percent) << ',' << format_double(rep.iqr_overlap) << ','
                    << to_string(rep.overlap_case) << ',' << format_double(rep.median_rb) << ','
                    << format_double(rep.amrb) << ',' << format_double(rep.bre) << ',';
            } else {
                out << nan << ',' << nan << ",NA," << nan << ',' << nan << ',' << nan << ',';
            }
            out << m.reference.size() << ',' << m.comparison.size() << ','
                << r.spec.replications - m.reference.size() << ','
                << r.spec.replications - m.comparison.size() << '\n';
        }
    }
}

void write_plotdata_json(std::ostream& out, const std::vector<ConditionResult>& results)
{
    out << "{\"conditions\":[";
    bool first = true;
    for (const auto& r : results) {
        for (const auto& m : r.metrics) {
            if (!first) out << ',';
            first = false;
            out << "\n{\"condition_id\":" << r.spec.condition_index
                << ",\"rho\":" << format_double(r.spec.rho) << ",\"n\":" << r.spec.n
                << ",\"param\":\"" << m.param << "\",\"theta_true\":" << format_double(m.theta_true)
                << ",\"reference\":";
            write_array(out, m.reference);
            out << ",\"comparison\":";
            write_array(out, m.comparison);
            out << ",\"reference_rb\":";
            write_array(out, relative_bias(m.reference, m.theta_true));
            out << ",\"comparison_rb\":";
            write_array(out, relative_bias(m.comparison, m.theta_true));
            out << '}';
        }
    }
    out << "\n]}\n";
}

void emit_outputs(const std::filesystem::path& dir, const std::vector<ConditionResult>& results)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::IoError,
                    fmt::format("cannot create output directory '{}'", dir.string()));
    }
    {
        auto out = open_for_write(dir / "estimates.csv");
        write_estimates_csv(out, results);
    }
    {
        auto out = open_for_write(dir / "metrics.csv");
        write_metrics_csv(out, results);
    }
    {
        auto out = open_for_write(dir / "plotdata.json");
        write_plotdata_json(out, results);
        out.flush();
        if (!out) throw Error(ErrorKind::IoError, "failed writing plotdata.json");
    }
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error(ErrorKind::ConfigError, fmt::format("missing column '{}'", name));
}

CsvTable read_csv(std::istream& in)
{
    const auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (header) {
            t.header = split(line);
            header = false;
        } else {
            t.rows.push_back(split(line));
        }
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot read '{}'", path.string()));
    return read_csv(in);
}

std::string render_metrics_summary(const CsvTable& metrics)
{
    const auto col = [&](const char* name) { return metrics.column(name); };
    const auto rho = col("rho"), n = col("n"), param = col("param"), re = col("re_percent"),
               ov = col("iqr_overlap"), kind = col("overlap_case"), amrb = col("amrb"),
               bre = col("bre"), nref = col("n_ref"), ncomp = col("n_comp");
    std::string out = fmt::format("{:>6} {:>6} {:<18} {:>9} {:>9} {:>9} {:<12} {:>8} {:>6} {:>6}\n",
                                  "rho", "n", "param", "RE%", "100*BRE", "overlap", "case", "AMRB",
                                  "n_ref", "n_comp");
    const auto num = [](const std::string& s) {
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            return std::nan("");
        }
    };
    for (const auto& r : metrics.rows) {
        if (r.size() < metrics.header.size()) {
            throw Error(ErrorKind::ConfigError, "metrics.csv row has too few cells");
        }
        out += fmt::format("{:>6.3g} {:>6} {:<18} {:>9.2f} {:>9.2f} {:>9.4f} {:<12} {:>8.4f} {:>6} {:>6}\n",
                           num(r[rho]), r[n], r[param], num(r[re]), 100.0 * num(r[bre]), num(r[ov]),
                           r[kind], num(r[amrb]), r[nref], r[ncomp]);
    }
    return out;
}

}  // namespace bre
