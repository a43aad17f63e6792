#include "lrh/lrh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrh {

namespace {

void check_candidate_count(const Ring& ring, std::uint32_t c) {
    if (ring.size() == 0) {
        throw std::invalid_argument("lookup: empty ring");
    }
    if (c < 1 || c > ring.node_count) {
        throw std::invalid_argument("lookup: candidate count must be in [1, distinct node count]");
    }
}

}  // namespace

CandidateSet candidates(const Ring& ring, std::uint64_t key, std::uint32_t c, HashSeed seed) {
    check_candidate_count(ring, c);
    const std::size_t m = ring.size();
    CandidateSet set;
    set.nodes.reserve(c);
    set.entry_indices.reserve(c);
    std::size_t idx = ring_lower_bound(ring, hash_pos(key, seed));
    for (std::uint32_t t = 0; t < c; ++t) {
        const RingEntry& e = ring.entries[idx];
        set.nodes.push_back(e.node);
        set.entry_indices.push_back(static_cast<std::uint32_t>(idx));
        idx = (idx + e.delta) % m;
    }
    return set;
}

LookupResult lookup(const Ring& ring, std::uint64_t key, std::uint32_t c, HashSeed seed) {
    check_candidate_count(ring, c);
    const std::size_t m = ring.size();
    const std::uint64_t key_mix = score_key_mix(key, seed);
    std::size_t idx = ring_lower_bound(ring, hash_pos(key, seed));

    std::uint32_t best_node = 0;
    std::uint64_t best_score = 0;
    bool have_best = false;
    for (std::uint32_t t = 0; t < c; ++t) {
        const RingEntry& e = ring.entries[idx];
        const std::uint64_t s = hash_score_premixed(key_mix, e.node);
        if (!have_best || s > best_score || (s == best_score && e.node < best_node)) {
            best_score = s;
            best_node = e.node;
            have_best = true;
        }
        idx = (idx + e.delta) % m;
    }
    return {best_node, c, 0};
}

LookupResult lookup_weighted(const Ring& ring, std::uint64_t key, std::uint32_t c,
                             const WeightTable& weights, HashSeed seed) {
    check_candidate_count(ring, c);
    const std::size_t m = ring.size();
    const std::uint64_t key_mix = score_key_mix(key, seed);
    std::size_t idx = ring_lower_bound(ring, hash_pos(key, seed));

    std::uint32_t best_node = 0;
    double best_score = 0.0;
    bool have_best = false;
    for (std::uint32_t t = 0; t < c; ++t) {
        const RingEntry& e = ring.entries[idx];
        const double w = weights.get(e.node);
        if (!(w > 0.0)) {
            throw std::domain_error("lookup_weighted: weight must be positive");
        }
        const double s = -std::log(unit_score(hash_score_premixed(key_mix, e.node))) / w;
        if (!have_best || s < best_score || (s == best_score && e.node < best_node)) {
            best_score = s;
            best_node = e.node;
            have_best = true;
        }
        idx = (idx + e.delta) % m;
    }
    return {best_node, c, 0};
}

LookupResult lookup_fixed_candidate(const Ring& ring, std::uint64_t key, std::uint32_t c,
                                    const LivenessMask& mask, HashSeed seed,
                                    std::uint32_t max_scan) {
    check_candidate_count(ring, c);
    if (mask.n_alive() < 1) {
        throw std::invalid_argument("lookup_fixed_candidate: no alive nodes");
    }
    if (max_scan < c) {
        throw std::invalid_argument("lookup_fixed_candidate: max_scan must be >= c");
    }
    const std::size_t m = ring.size();
    const std::uint64_t key_mix = score_key_mix(key, seed);
    std::size_t idx = ring_lower_bound(ring, hash_pos(key, seed));

    // First block: the fixed candidate window, exactly c entries.
    std::uint32_t best_node = 0;
    std::uint64_t best_score = 0;
    bool have_best = false;
    std::uint32_t scanned = 0;
    std::vector<std::uint32_t> seen;  // only needed if the whole window is dead
    seen.reserve(c);
    for (std::uint32_t t = 0; t < c; ++t) {
        const RingEntry& e = ring.entries[idx];
        seen.push_back(e.node);
        ++scanned;
        if (mask.is_alive(e.node)) {
            const std::uint64_t s = hash_score_premixed(key_mix, e.node);
            if (!have_best || s > best_score || (s == best_score && e.node < best_node)) {
                best_score = s;
                best_node = e.node;
                have_best = true;
            }
        }
        idx = (idx + e.delta) % m;
    }
    if (have_best) {
        return {best_node, scanned, 0};
    }

    // All candidates down: extend the window block by block. Each block adds
    // c candidates not seen in any earlier block; entries stepped over still
    // count against max_scan.
    auto already_seen = [&seen](std::uint32_t node) {
        return std::find(seen.begin(), seen.end(), node) != seen.end();
    };
    std::uint32_t blocks = 0;
    while (scanned < max_scan) {
        ++blocks;
        std::uint32_t fresh = 0;
        while (fresh < c && scanned < max_scan) {
            const RingEntry& e = ring.entries[idx];
            ++scanned;
            idx = (idx + e.delta) % m;
            if (already_seen(e.node)) {
                continue;
            }
            seen.push_back(e.node);
            ++fresh;
            if (mask.is_alive(e.node)) {
                const std::uint64_t s = hash_score_premixed(key_mix, e.node);
                if (!have_best || s > best_score || (s == best_score && e.node < best_node)) {
                    best_score = s;
                    best_node = e.node;
                    have_best = true;
                }
            }
        }
        if (have_best) {
            return {best_node, scanned, blocks};
        }
    }
    throw std::runtime_error("lookup_fixed_candidate: max_scan exhausted with no alive candidate");
}

AssignmentSnapshot assign_all(const Ring& ring, std::span<const std::uint64_t> keys,
                              AssignMode mode, std::uint32_t c, const LivenessMask* mask,
                              HashSeed seed, std::uint32_t max_scan, unsigned workers) {
    if (mode == AssignMode::kFixedCandidate && mask == nullptr) {
        throw std::invalid_argument("assign_all: fixed-candidate mode needs a liveness mask");
    }
    if (mode == AssignMode::kFixedCandidate) {
        return map_keys(
            keys,
            [&ring, c, mask, seed, max_scan](std::uint64_t k) {
                return lookup_fixed_candidate(ring, k, c, *mask, seed, max_scan);
            },
            workers);
    }
    return map_keys(
        keys, [&ring, c, seed](std::uint64_t k) { return lookup(ring, k, c, seed); }, workers);
}

}  // namespace lrh
