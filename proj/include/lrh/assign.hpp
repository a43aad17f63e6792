#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace lrh {

struct LookupResult {
    std::uint32_t node = 0;
    std::uint32_t scan_steps = 0;
    std::uint32_t fallback_blocks = 0;
};

// Owners plus scan-step statistics for one full mapping pass over a key array.
struct AssignmentSnapshot {
    std::vector<std::uint32_t> owners;
    std::uint64_t lookups = 0;
    std::uint64_t scan_sum = 0;
    std::uint32_t scan_max = 0;
    std::uint32_t scan_min = std::numeric_limits<std::uint32_t>::max();
    std::uint64_t fallback_lookups = 0;

    double scan_avg() const { return lookups == 0 ? 0.0 : static_cast<double>(scan_sum) / static_cast<double>(lookups); }
};

/// Maps every key through `fn` (key -> LookupResult), partitioning the key
/// range across `workers` threads (0 = hardware concurrency). Owners land in
/// disjoint slots and statistics merge associatively, so the result is
/// identical for any worker count. Exceptions from `fn` are rethrown.
AssignmentSnapshot map_keys(std::span<const std::uint64_t> keys,
                            const std::function<LookupResult(std::uint64_t)>& fn,
                            unsigned workers);

}  // namespace lrh
