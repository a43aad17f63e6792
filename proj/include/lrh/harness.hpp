#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lrh/baselines.hpp"
#include "lrh/metrics.hpp"
#include "lrh/ring.hpp"

namespace lrh::bench {

struct CrushParams {
    std::uint32_t rack_size = 50;
    std::uint32_t bucket_probes = 8;
    std::uint32_t leaf_probes = 8;
    std::uint32_t tries = 16;
};

struct ExperimentConfig {
    std::uint32_t nodes = 200;
    std::uint64_t keys = 100000;
    std::uint32_t vnodes = 32;
    std::uint32_t candidates = 8;
    std::uint32_t maglev_m = 65537;
    std::vector<std::uint32_t> fail_list = {1, 5, 20};
    std::uint32_t repeats = 5;
    std::uint32_t warmup = 1;
    std::uint64_t seed = 20251226;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::uint32_t hrw_full_max_n = 2000;
    std::uint64_t hrw_sample_keys = 2000000;
    std::uint32_t max_scan = 4096;
    std::uint32_t mp_probes = 8;
    CrushParams crush;
    double membership_pct = 1.0;
    std::vector<std::uint32_t> ablation_c_list;
    std::vector<std::uint32_t> vnode_list;
    bool report_memory = false;
    bool report_mpch_probe_gen = false;
    bool report_membership = false;
    bool report_analysis = false;
    bool report_vnode_sweep = false;

    /// Global sanity checks (per-row conditions like Maglev primality are
    /// surfaced as row errors instead). Throws std::invalid_argument.
    void validate() const;
};

ExperimentConfig desk_profile();
ExperimentConfig paper_profile();

// One table row: every Table-style column for one algorithm x semantics,
// averaged over repeats (and over failure sizes for the overall table).
struct RowMetrics {
    std::string label;
    double k_used = 0.0;
    double build_ms = 0.0;
    double query_ms = 0.0;
    double throughput_mkeys = 0.0;
    double max_avg = 0.0;
    double p99_avg = 0.0;
    double cv = 0.0;
    double churn_pct = 0.0;
    double excess_pct = 0.0;
    double fail_affected = 0.0;
    double max_recv_share = 0.0;
    double conc_x = 0.0;
    double scan_avg = 0.0;
    double scan_max = 0.0;
    std::uint64_t key_fingerprint = 0;
    std::uint64_t fail_fingerprint = 0;
    std::string error;
};

struct SuiteResult {
    std::vector<std::uint32_t> fail_sizes;
    std::vector<std::vector<RowMetrics>> per_f;           // averaged over repeats
    std::vector<RowMetrics> overall;                      // averaged across failure sizes
    std::vector<std::vector<std::vector<RowMetrics>>> raw;  // [f][repeat][row], measured repeats
    double base_build_ms = 0.0;
    bool any_error = false;
};

/// Deterministic 64-bit benchmark keys: splitmix64 stream seeded with
/// mix64((base_seed ^ kKeyStreamDomain) + repeat_index * kGolden).
std::vector<std::uint64_t> generate_keys(std::uint64_t count, std::uint64_t base_seed,
                                         std::uint32_t repeat_index);

/// Uniform random f-subset of [0, n_nodes) without replacement (partial
/// Fisher-Yates), identical for every algorithm within a (f, repeat) cell.
/// Returned sorted ascending.
std::vector<std::uint32_t> generate_failure_set(std::uint32_t n_nodes, std::uint32_t f,
                                                std::uint64_t seed, std::uint32_t repeat_index);

/// Order-sensitive fingerprint of a value sequence (fairness checks).
std::uint64_t fingerprint64(std::span<const std::uint64_t> values);
std::uint64_t fingerprint32(std::span<const std::uint32_t> values);

/// Runs the full algorithm x semantics x failure-size grid. Row failures are
/// captured per row (error column) without aborting the suite.
SuiteResult run_suite(const ExperimentConfig& config);

struct AblationRow {
    std::uint32_t c = 0;
    double max_avg = 0.0;
    double p99_avg = 0.0;
    double cv = 0.0;
    double query_ms = 0.0;
    double throughput_mkeys = 0.0;
};

/// LRH all-alive balance/throughput per candidate count.
std::vector<AblationRow> run_ablation_c(const ExperimentConfig& config,
                                        std::span<const std::uint32_t> c_list);

struct VnodeRow {
    std::uint32_t vnodes = 0;
    double max_avg = 0.0;
    double p99_avg = 0.0;
    double cv = 0.0;
    double build_ms = 0.0;
    double query_ms = 0.0;
    double throughput_mkeys = 0.0;
};

/// Ring next-alive balance/build/throughput per vnode count.
std::vector<VnodeRow> run_vnode_sweep(const ExperimentConfig& config,
                                      std::span<const std::uint32_t> v_list);

struct MpchMicrobench {
    double probe_gen_mix64_mkeys = 0.0;
    double probe_gen_double_hash_mkeys = 0.0;
    double assign_mix64_mkeys = 0.0;
    double assign_double_hash_mkeys = 0.0;

    double probe_gen_speedup() const { return probe_gen_double_hash_mkeys / probe_gen_mix64_mkeys; }
    double assign_speedup() const { return assign_double_hash_mkeys / assign_mix64_mkeys; }
};

/// Times probe generation alone and the full assignment under both probe
/// modes (best of three runs each).
MpchMicrobench run_mpch_probe_microbench(const ExperimentConfig& config);

struct MembershipRow {
    std::string label;
    std::string direction;  // "+pct%" or "-pct%"
    double churn_pct = 0.0;
    double excess_pct = 0.0;
    double theo_min_pct = 0.0;
};

/// +-pct% membership change under rebuild semantics for LRH, Ring and
/// Maglev, averaged over config.repeats. Theoretical minimum: removal ->
/// share of keys whose initial owner was removed; addition -> token share
/// V*dN/|R'|.
std::vector<MembershipRow> run_membership(const ExperimentConfig& config, double pct);

enum class ReportFormat { kCsv, kMarkdown };

/// Writes one table per failure size plus the overall average, and the
/// figure-ready throughput-vs-balance scatter CSV. Returns written paths.
std::vector<std::filesystem::path> emit_report(const SuiteResult& suite, ReportFormat format,
                                               const std::filesystem::path& out_dir);

void emit_ablation_csv(std::span<const AblationRow> rows, const std::filesystem::path& path);
void emit_vnode_csv(std::span<const VnodeRow> rows, const std::filesystem::path& path);
void emit_mpch_microbench_csv(const MpchMicrobench& mb, const std::filesystem::path& path);
void emit_membership_csv(std::span<const MembershipRow> rows, const std::filesystem::path& path,
                         const std::string& theo_min_note);

}  // namespace lrh::bench
