#include "lrh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrh {

std::vector<std::uint64_t> loads_from(const AssignmentSnapshot& snapshot, std::uint32_t id_bound) {
    std::vector<std::uint64_t> loads(id_bound, 0);
    for (std::uint32_t owner : snapshot.owners) {
        loads.at(owner)++;
    }
    return loads;
}

BalanceReport balance(std::span<const std::uint64_t> loads) {
    if (loads.empty()) {
        throw std::invalid_argument("balance: no nodes");
    }
    std::uint64_t total = 0;
    std::uint64_t max_load = 0;
    for (std::uint64_t l : loads) {
        total += l;
        max_load = std::max(max_load, l);
    }
    if (total == 0) {
        throw std::invalid_argument("balance: zero total keys, metrics undefined");
    }
    const double n = static_cast<double>(loads.size());
    const double mean = static_cast<double>(total) / n;

    std::vector<std::uint64_t> sorted(loads.begin(), loads.end());
    std::sort(sorted.begin(), sorted.end());
    // Nearest-rank percentile: ceil(p * n)-th smallest.
    const std::size_t rank = static_cast<std::size_t>(std::ceil(0.99 * n));
    const std::uint64_t p99 = sorted[std::min(sorted.size() - 1, rank - 1)];

    double ss = 0.0;
    for (std::uint64_t l : loads) {
        const double d = static_cast<double>(l) - mean;
        ss += d * d;
    }
    const double stddev = std::sqrt(ss / n);

    BalanceReport report;
    report.max_avg = static_cast<double>(max_load) / mean;
    report.p99_avg = static_cast<double>(p99) / mean;
    report.cv = stddev / mean;
    report.loads.assign(loads.begin(), loads.end());
    return report;
}

ChurnReport churn(const AssignmentSnapshot& init, const AssignmentSnapshot& fail,
                  std::span<const std::uint32_t> failed_set, const LivenessMask& mask) {
    if (init.owners.size() != fail.owners.size()) {
        throw std::invalid_argument("churn: snapshots cover different key arrays");
    }
    const std::uint64_t k_used = init.owners.size();
    if (k_used == 0) {
        throw std::invalid_argument("churn: empty snapshots");
    }

    std::vector<std::uint8_t> failed(mask.size(), 0);
    for (std::uint32_t f : failed_set) {
        failed.at(f) = 1;
    }

    std::uint64_t moved = 0;
    std::uint64_t affected = 0;
    std::vector<std::uint64_t> recv(mask.size(), 0);
    for (std::size_t i = 0; i < k_used; ++i) {
        if (init.owners[i] != fail.owners[i]) {
            ++moved;
        }
        if (init.owners[i] < failed.size() && failed[init.owners[i]]) {
            ++affected;
            recv.at(fail.owners[i])++;
        }
    }

    ChurnReport report;
    report.k_used = k_used;
    report.moved = moved;
    report.fail_affected = affected;
    report.churn_pct = 100.0 * static_cast<double>(moved) / static_cast<double>(k_used);
    const double min_pct = 100.0 * static_cast<double>(affected) / static_cast<double>(k_used);
    report.excess_pct = std::max(0.0, report.churn_pct - min_pct);
    if (affected > 0) {
        std::uint64_t max_recv = 0;
        for (std::uint32_t n = 0; n < mask.size(); ++n) {
            if (mask.is_alive(n)) {
                max_recv = std::max(max_recv, recv[n]);
            }
        }
        report.max_recv_share = static_cast<double>(max_recv) / static_cast<double>(affected);
        report.conc_x = report.max_recv_share * static_cast<double>(mask.n_alive());
    }
    const auto [avg, mx] = scan_stats(fail);
    report.scan_avg = avg;
    report.scan_max = mx;
    return report;
}

std::pair<double, std::uint32_t> scan_stats(const AssignmentSnapshot& snapshot) {
    return {snapshot.scan_avg(), snapshot.lookups == 0 ? 0 : snapshot.scan_max};
}

}  // namespace lrh
