#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lrh/harness.hpp"

namespace lrh::bench {

namespace {

// Table 1 column set; 15 columns with the algorithm label.
constexpr const char* kColumns[] = {
    "Algorithm", "K",       "Build_ms", "Query_ms",     "Thrpt_Mkeys",
    "Max/Avg",   "P99/Avg", "CV",       "Churn%",       "Excess%",
    "FailAff",   "MaxRecv", "Conc_x",   "ScanAvg",      "ScanMax",
};

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Algorithm labels carry commas; quote them in CSV output.
std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> row_fields(const RowMetrics& r) {
    return {r.label,
            fmt(r.k_used, 0),
            fmt(r.build_ms, 2),
            fmt(r.query_ms, 2),
            fmt(r.throughput_mkeys, 2),
            fmt(r.max_avg, 4),
            fmt(r.p99_avg, 4),
            fmt(r.cv, 4),
            fmt(r.churn_pct, 3),
            fmt(r.excess_pct, 3),
            fmt(r.fail_affected, 0),
            fmt(r.max_recv_share, 4),
            fmt(r.conc_x, 2),
            fmt(r.scan_avg, 2),
            fmt(r.scan_max, 0)};
}

void write_table(const std::vector<RowMetrics>& rows, ReportFormat format,
                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("emit_report: cannot open " + path.string());
    }
    const std::size_t n_cols = std::size(kColumns);
    if (format == ReportFormat::kCsv) {
        for (std::size_t i = 0; i < n_cols; ++i) {
            out << kColumns[i] << (i + 1 < n_cols ? "," : "\n");
        }
        for (const RowMetrics& r : rows) {
            if (!r.error.empty()) {
                out << "# ERROR " << r.label << ": " << r.error << '\n';
                continue;
            }
            auto fields = row_fields(r);
            fields[0] = csv_quote(fields[0]);
            for (std::size_t i = 0; i < fields.size(); ++i) {
                out << fields[i] << (i + 1 < fields.size() ? "," : "\n");
            }
        }
        return;
    }
    out << '|';
    for (const char* c : kColumns) {
        out << ' ' << c << " |";
    }
    out << "\n|";
    for (std::size_t i = 0; i < n_cols; ++i) {
        out << "---|";
    }
    out << '\n';
    for (const RowMetrics& r : rows) {
        if (!r.error.empty()) {
            out << "| " << r.label << " | ERROR: " << r.error;
            for (std::size_t i = 2; i < n_cols; ++i) {
                out << " |";
            }
            out << " |\n";
            continue;
        }
        out << '|';
        for (const std::string& f : row_fields(r)) {
            out << ' ' << f << " |";
        }
        out << '\n';
    }
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const SuiteResult& suite, ReportFormat format,
                                               const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const char* ext = format == ReportFormat::kCsv ? ".csv" : ".md";
    std::vector<std::filesystem::path> written;

    for (std::size_t fi = 0; fi < suite.fail_sizes.size(); ++fi) {
        const auto path =
            out_dir / ("results_f" + std::to_string(suite.fail_sizes[fi]) + ext);
        write_table(suite.per_f[fi], format, path);
        written.push_back(path);
    }
    const auto overall_path = out_dir / (std::string("results_overall") + ext);
    write_table(suite.overall, format, overall_path);
    written.push_back(overall_path);

    // Figure-ready scatter: throughput vs balance, one point per algorithm.
    const auto scatter_path = out_dir / "tradeoff_scatter.csv";
    {
        std::ofstream out(scatter_path, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("emit_report: cannot open " + scatter_path.string());
        }
        out << "Algorithm,Thrpt_Mkeys,MaxAvg\n";
        for (const RowMetrics& r : suite.overall) {
            if (r.error.empty()) {
                out << csv_quote(r.label) << ',' << fmt(r.throughput_mkeys, 3) << ','
                    << fmt(r.max_avg, 4) << '\n';
            }
        }
    }
    written.push_back(scatter_path);
    return written;
}

void emit_ablation_csv(std::span<const AblationRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("emit_ablation_csv: cannot open " + path.string());
    }
    out << "C,MaxAvg,P99Avg,CV,Query_ms,Thrpt_Mkeys\n";
    for (const AblationRow& r : rows) {
        out << r.c << ',' << fmt(r.max_avg, 4) << ',' << fmt(r.p99_avg, 4) << ',' << fmt(r.cv, 4)
            << ',' << fmt(r.query_ms, 2) << ',' << fmt(r.throughput_mkeys, 2) << '\n';
    }
}

void emit_vnode_csv(std::span<const VnodeRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("emit_vnode_csv: cannot open " + path.string());
    }
    out << "V,MaxAvg,P99Avg,CV,Build_ms,Query_ms,Thrpt_Mkeys\n";
    for (const VnodeRow& r : rows) {
        out << r.vnodes << ',' << fmt(r.max_avg, 4) << ',' << fmt(r.p99_avg, 4) << ','
            << fmt(r.cv, 4) << ',' << fmt(r.build_ms, 3) << ',' << fmt(r.query_ms, 2) << ','
            << fmt(r.throughput_mkeys, 2) << '\n';
    }
}

void emit_mpch_microbench_csv(const MpchMicrobench& mb, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("emit_mpch_microbench_csv: cannot open " + path.string());
    }
    out << "Case,Mkeys_per_s\n";
    out << "assign_only_mix64," << fmt(mb.assign_mix64_mkeys, 2) << '\n';
    out << "assign_only_double_hash," << fmt(mb.assign_double_hash_mkeys, 2) << '\n';
    out << "probe_gen_only_mix64," << fmt(mb.probe_gen_mix64_mkeys, 2) << '\n';
    out << "probe_gen_only_double_hash," << fmt(mb.probe_gen_double_hash_mkeys, 2) << '\n';
    out << "probe_gen_speedup," << fmt(mb.probe_gen_speedup(), 2) << '\n';
    out << "assign_speedup," << fmt(mb.assign_speedup(), 2) << '\n';
}

void emit_membership_csv(std::span<const MembershipRow> rows, const std::filesystem::path& path,
                         const std::string& theo_min_note) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("emit_membership_csv: cannot open " + path.string());
    }
    out << "# theoretical minimum: " << theo_min_note << '\n';
    out << "Algorithm,Direction,Churn%,Excess%,TheoMin%\n";
    for (const MembershipRow& r : rows) {
        out << csv_quote(r.label) << ',' << r.direction << ',' << fmt(r.churn_pct, 3) << ','
            << fmt(r.excess_pct, 3) << ',' << fmt(r.theo_min_pct, 3) << '\n';
    }
}

}  // namespace lrh::bench
