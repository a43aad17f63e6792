#pragma once

#include <cstdint>
#include <vector>

#include "lrh/assign.hpp"
#include "lrh/hashing.hpp"
#include "lrh/liveness.hpp"
#include "lrh/ring.hpp"

namespace lrh::baselines {

/// Plain ring successor owner (no liveness handling); scan_steps = 0, the
/// convention used by rebuild-mode rows where no liveness probing happens.
LookupResult ring_successor(const Ring& ring, std::uint64_t key);

/// Classic ring CH with next-alive failover: start at the successor entry
/// and step entry-by-entry (+1, not delta) past dead nodes. scan_steps
/// counts entries examined, so an all-alive lookup scans exactly 1.
LookupResult ring_lookup_next_alive(const Ring& ring, std::uint64_t key, const LivenessMask& mask,
                                    std::uint32_t max_scan);

/// Multi-probe CH on the shared ring: per probe j, position probe_hash(key,
/// j), next-alive successor, distance (token - position) mod 2^64; the
/// minimum-distance probe wins (ties -> lower probe index). scan_steps sums
/// entries examined across probes.
LookupResult mpch_lookup(const Ring& ring, std::uint64_t key, std::uint32_t probes,
                         const LivenessMask& mask, HashSeed seed, ProbeMode mode,
                         std::uint32_t max_scan);

struct MaglevTable {
    std::vector<std::uint32_t> table;  // slot -> node id
    std::uint32_t m_size = 0;
    HashSeed seed;
};

/// Standard Maglev population over the alive nodes: per node, offset =
/// h1 mod M, skip = h2 mod (M-1) + 1; round-robin fill of preference lists
/// until every slot is owned. m_size must be prime.
MaglevTable maglev_build(std::uint32_t n_nodes, std::uint32_t m_size, const LivenessMask& mask,
                         HashSeed seed);

std::uint32_t maglev_lookup(const MaglevTable& table, std::uint64_t key);

/// Lamping-Veach jump consistent hash over buckets 0..n_buckets-1.
std::uint32_t jump_lookup(std::uint64_t key, std::uint32_t n_buckets);

/// Full HRW over all alive nodes: O(N) per key.
std::uint32_t hrw_lookup(std::uint64_t key, const LivenessMask& mask, std::uint32_t n_nodes,
                         HashSeed seed);

// Two-level rack model: nodes are partitioned into racks of rack_size
// consecutive ids (the last rack may be short).
struct CrushTopology {
    std::uint32_t n_nodes = 0;
    std::uint32_t rack_size = 0;
    std::uint32_t bucket_probes = 0;
    std::uint32_t leaf_probes = 0;
    std::uint32_t tries = 0;

    std::uint32_t n_racks() const { return (n_nodes + rack_size - 1) / rack_size; }
    std::uint32_t rack_of(std::uint32_t node) const { return node / rack_size; }
    std::uint32_t rack_members(std::uint32_t rack) const {
        const std::uint32_t start = rack * rack_size;
        return std::min(rack_size, n_nodes - start);
    }
};

/// Two-level rendezvous placement: bucket_probes sampled rack candidates
/// (best score wins), then leaf_probes sampled members of that rack; a dead
/// choice retries with an incremented attempt salt up to `tries`, then falls
/// back to global HRW over alive nodes. scan_steps counts candidate
/// examinations.
LookupResult crush_lookup(const CrushTopology& topology, std::uint64_t key,
                          const LivenessMask& mask, HashSeed seed);

}  // namespace lrh::baselines
