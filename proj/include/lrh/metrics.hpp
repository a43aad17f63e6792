#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrh/assign.hpp"
#include "lrh/liveness.hpp"

namespace lrh {

struct BalanceReport {
    double max_avg = 0.0;  // peak-to-average load ratio
    double p99_avg = 0.0;  // 99th percentile (nearest-rank) / average
    double cv = 0.0;       // population stddev / mean
    std::vector<std::uint64_t> loads;
};

struct ChurnReport {
    std::uint64_t k_used = 0;
    std::uint64_t moved = 0;
    double churn_pct = 0.0;
    double excess_pct = 0.0;
    std::uint64_t fail_affected = 0;
    double max_recv_share = 0.0;
    double conc_x = 0.0;
    double scan_avg = 0.0;  // failure-pass scan statistics
    std::uint32_t scan_max = 0;
};

/// Per-node key counts for a snapshot, over node ids [0, id_bound).
std::vector<std::uint64_t> loads_from(const AssignmentSnapshot& snapshot, std::uint32_t id_bound);

/// Balance metrics over per-node loads (zero loads included in the average).
/// Throws std::invalid_argument when the total load is zero.
BalanceReport balance(std::span<const std::uint64_t> loads);

/// Churn metrics between an initial and a post-failure snapshot over the
/// same key array. fail_affected counts keys whose INITIAL owner is in
/// failed_set; excess floors at zero; receiver concentration counts only
/// affected keys. Scan columns carry the failure-pass statistics.
ChurnReport churn(const AssignmentSnapshot& init, const AssignmentSnapshot& fail,
                  std::span<const std::uint32_t> failed_set, const LivenessMask& mask);

/// (scan_avg, scan_max) of one pass; denom = lookups in that pass.
std::pair<double, std::uint32_t> scan_stats(const AssignmentSnapshot& snapshot);

}  // namespace lrh
