#include "lrh/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace lrh::baselines {

LookupResult ring_successor(const Ring& ring, std::uint64_t key) {
    if (ring.size() == 0) {
        throw std::invalid_argument("ring_successor: empty ring");
    }
    const std::size_t idx = ring_lower_bound(ring, hash_pos(key, ring.seed));
    return {ring.entries[idx].node, 0, 0};
}

LookupResult ring_lookup_next_alive(const Ring& ring, std::uint64_t key, const LivenessMask& mask,
                                    std::uint32_t max_scan) {
    if (mask.n_alive() < 1) {
        throw std::invalid_argument("ring_lookup_next_alive: no alive nodes");
    }
    const std::size_t m = ring.size();
    std::size_t idx = ring_lower_bound(ring, hash_pos(key, ring.seed));
    for (std::uint32_t steps = 1; steps <= max_scan; ++steps) {
        const RingEntry& e = ring.entries[idx];
        if (mask.is_alive(e.node)) {
            return {e.node, steps, 0};
        }
        idx = (idx + 1) % m;
    }
    throw std::runtime_error("ring_lookup_next_alive: max_scan exhausted");
}

namespace {

// Next-alive successor for an arbitrary position; shared by the probe loop.
struct ProbeSuccessor {
    std::uint64_t token;
    std::uint32_t node;
    std::uint32_t steps;
};

ProbeSuccessor next_alive_from(const Ring& ring, std::uint64_t pos, const LivenessMask& mask,
                               std::uint32_t max_scan) {
    const std::size_t m = ring.size();
    std::size_t idx = ring_lower_bound(ring, pos);
    for (std::uint32_t steps = 1; steps <= max_scan; ++steps) {
        const RingEntry& e = ring.entries[idx];
        if (mask.is_alive(e.node)) {
            return {e.token, e.node, steps};
        }
        idx = (idx + 1) % m;
    }
    throw std::runtime_error("mpch_lookup: max_scan exhausted");
}

}  // namespace

LookupResult mpch_lookup(const Ring& ring, std::uint64_t key, std::uint32_t probes,
                         const LivenessMask& mask, HashSeed seed, ProbeMode mode,
                         std::uint32_t max_scan) {
    if (probes < 1) {
        throw std::invalid_argument("mpch_lookup: probes must be >= 1");
    }
    if (mask.n_alive() < 1) {
        throw std::invalid_argument("mpch_lookup: no alive nodes");
    }
    std::uint32_t best_node = 0;
    std::uint64_t best_dist = 0;
    bool have_best = false;
    std::uint32_t scanned = 0;
    // Double-hash probes stride from two per-key hashes.
    const std::uint64_t h1 = mode == ProbeMode::kDoubleHash ? probe_h1(key, seed) : 0;
    const std::uint64_t h2 = mode == ProbeMode::kDoubleHash ? probe_h2(key, seed) : 0;
    for (std::uint32_t j = 0; j < probes; ++j) {
        const std::uint64_t pos = mode == ProbeMode::kDoubleHash
                                      ? h1 + j * h2
                                      : probe_hash(key, j, seed, ProbeMode::kMix64);
        const ProbeSuccessor s = next_alive_from(ring, pos, mask, max_scan);
        scanned += s.steps;
        const std::uint64_t dist = s.token - pos;  // mod 2^64
        if (!have_best || dist < best_dist) {
            best_dist = dist;
            best_node = s.node;
            have_best = true;
        }
    }
    return {best_node, scanned, 0};
}

namespace {

bool is_prime(std::uint32_t v) {
    if (v < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= v; ++d) {
        if (v % d == 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

MaglevTable maglev_build(std::uint32_t n_nodes, std::uint32_t m_size, const LivenessMask& mask,
                         HashSeed seed) {
    if (!is_prime(m_size)) {
        throw std::invalid_argument("maglev_build: table size must be prime");
    }
    if (mask.n_alive() < 1) {
        throw std::invalid_argument("maglev_build: no alive nodes");
    }

    struct BuildEntry {
        std::uint32_t node;
        std::uint64_t offset;
        std::uint64_t skip;
        std::uint64_t next = 0;
    };
    std::vector<BuildEntry> prefs;
    prefs.reserve(mask.n_alive());
    for (std::uint32_t n = 0; n < n_nodes; ++n) {
        if (!mask.is_alive(n)) {
            continue;
        }
        const std::uint64_t h1 = mix64(static_cast<std::uint64_t>(n) ^ seed.value ^
                                       hashconst::kMaglevOffsetDomain);
        const std::uint64_t h2 =
            mix64(static_cast<std::uint64_t>(n) ^ seed.value ^ hashconst::kMaglevSkipDomain);
        prefs.push_back({n, h1 % m_size, h2 % (m_size - 1) + 1, 0});
    }

    MaglevTable t;
    t.m_size = m_size;
    t.seed = seed;
    t.table.assign(m_size, UINT32_MAX);
    std::uint32_t filled = 0;
    while (filled < m_size) {
        for (BuildEntry& p : prefs) {
            std::uint64_t slot = (p.offset + p.skip * p.next) % m_size;
            while (t.table[slot] != UINT32_MAX) {
                ++p.next;
                slot = (p.offset + p.skip * p.next) % m_size;
            }
            t.table[slot] = p.node;
            ++p.next;
            ++filled;
            if (filled == m_size) {
                break;
            }
        }
    }
    return t;
}

std::uint32_t maglev_lookup(const MaglevTable& table, std::uint64_t key) {
    return table.table[hash_pos(key, table.seed) % table.m_size];
}

std::uint32_t jump_lookup(std::uint64_t key, std::uint32_t n_buckets) {
    if (n_buckets < 1) {
        throw std::invalid_argument("jump_lookup: need at least one bucket");
    }
    std::int64_t b = -1;
    std::int64_t j = 0;
    while (j < static_cast<std::int64_t>(n_buckets)) {
        b = j;
        key = key * 2862933555777941757ULL + 1;
        j = static_cast<std::int64_t>(
            static_cast<double>(b + 1) *
            (static_cast<double>(1LL << 31) / static_cast<double>((key >> 33) + 1)));
    }
    return static_cast<std::uint32_t>(b);
}

std::uint32_t hrw_lookup(std::uint64_t key, const LivenessMask& mask, std::uint32_t n_nodes,
                         HashSeed seed) {
    if (mask.n_alive() < 1) {
        throw std::invalid_argument("hrw_lookup: no alive nodes");
    }
    const std::uint64_t key_mix = score_key_mix(key, seed);
    std::uint32_t best_node = 0;
    std::uint64_t best_score = 0;
    bool have_best = false;
    for (std::uint32_t n = 0; n < n_nodes; ++n) {
        if (!mask.is_alive(n)) {
            continue;
        }
        const std::uint64_t s = hash_score_premixed(key_mix, n);
        if (!have_best || s > best_score) {
            best_score = s;
            best_node = n;
            have_best = true;
        }
    }
    return best_node;
}

namespace {

std::uint64_t crush_pick(std::uint64_t key, std::uint32_t attempt, std::uint32_t probe,
                         HashSeed seed, std::uint64_t domain) {
    return mix64((key ^ seed.value ^ domain) +
                 (static_cast<std::uint64_t>(attempt) * 0x10001ULL + probe + 1) *
                     hashconst::kGolden);
}

}  // namespace

LookupResult crush_lookup(const CrushTopology& topology, std::uint64_t key,
                          const LivenessMask& mask, HashSeed seed) {
    if (mask.n_alive() < 1) {
        throw std::invalid_argument("crush_lookup: no alive nodes");
    }
    const std::uint32_t n_racks = topology.n_racks();
    std::uint32_t scanned = 0;
    for (std::uint32_t attempt = 0; attempt < topology.tries; ++attempt) {
        // Rack level: best score among bucket_probes sampled racks.
        std::uint32_t best_rack = 0;
        std::uint64_t best_rack_score = 0;
        bool have_rack = false;
        for (std::uint32_t q = 0; q < topology.bucket_probes; ++q) {
            const std::uint32_t rack = static_cast<std::uint32_t>(
                crush_pick(key, attempt, q, seed, hashconst::kCrushRackPick) % n_racks);
            const std::uint64_t s =
                mix64((key ^ seed.value ^ hashconst::kCrushRackScore) +
                      (static_cast<std::uint64_t>(attempt) + 1) * hashconst::kGolden +
                      node_salt(rack));
            ++scanned;
            if (!have_rack || s > best_rack_score) {
                best_rack_score = s;
                best_rack = rack;
                have_rack = true;
            }
        }
        // Leaf level: best score among leaf_probes sampled members.
        const std::uint32_t members = topology.rack_members(best_rack);
        std::uint32_t best_node = 0;
        std::uint64_t best_node_score = 0;
        bool have_node = false;
        for (std::uint32_t q = 0; q < topology.leaf_probes; ++q) {
            const std::uint32_t member = static_cast<std::uint32_t>(
                crush_pick(key, attempt, q, seed, hashconst::kCrushLeafPick) % members);
            const std::uint32_t node = best_rack * topology.rack_size + member;
            const std::uint64_t s =
                mix64((key ^ seed.value ^ hashconst::kCrushLeafScore) +
                      (static_cast<std::uint64_t>(attempt) + 1) * hashconst::kGolden +
                      node_salt(node));
            ++scanned;
            if (!have_node || s > best_node_score) {
                best_node_score = s;
                best_node = node;
                have_node = true;
            }
        }
        if (mask.is_alive(best_node)) {
            return {best_node, scanned, attempt};
        }
    }
    // Global fallback guarantees success.
    scanned += mask.n_alive();
    return {hrw_lookup(key, mask, topology.n_nodes, seed), scanned, topology.tries};
}

}  // namespace lrh::baselines
