#include "lrh/assign.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace lrh {

namespace {

struct WorkerStats {
    std::uint64_t scan_sum = 0;
    std::uint32_t scan_max = 0;
    std::uint32_t scan_min = std::numeric_limits<std::uint32_t>::max();
    std::uint64_t fallbacks = 0;
    std::exception_ptr error;
};

}  // namespace

AssignmentSnapshot map_keys(std::span<const std::uint64_t> keys,
                            const std::function<LookupResult(std::uint64_t)>& fn,
                            unsigned workers) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    const std::size_t n = keys.size();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

    AssignmentSnapshot snap;
    snap.owners.resize(n);
    snap.lookups = n;
    if (n == 0) {
        snap.scan_min = 0;
        return snap;
    }

    std::vector<WorkerStats> stats(workers);
    auto run_range = [&](std::size_t lo, std::size_t hi, WorkerStats& st) {
        try {
            for (std::size_t i = lo; i < hi; ++i) {
                const LookupResult r = fn(keys[i]);
                snap.owners[i] = r.node;
                st.scan_sum += r.scan_steps;
                st.scan_max = std::max(st.scan_max, r.scan_steps);
                st.scan_min = std::min(st.scan_min, r.scan_steps);
                if (r.fallback_blocks > 0) {
                    ++st.fallbacks;
                }
            }
        } catch (...) {
            st.error = std::current_exception();
        }
    };

    if (workers == 1) {
        run_range(0, n, stats[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = std::min(n, static_cast<std::size_t>(w) * chunk);
            const std::size_t hi = std::min(n, lo + chunk);
            pool.emplace_back(run_range, lo, hi, std::ref(stats[w]));
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (const WorkerStats& st : stats) {
        if (st.error) {
            std::rethrow_exception(st.error);
        }
        snap.scan_sum += st.scan_sum;
        snap.scan_max = std::max(snap.scan_max, st.scan_max);
        snap.scan_min = std::min(snap.scan_min, st.scan_min);
        snap.fallback_lookups += st.fallbacks;
    }
    return snap;
}

}  // namespace lrh
