#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lrh/hashing.hpp"

namespace lrh {

// One token on the ring. delta is the smallest positive index offset (with
// wrap-around) to an entry owned by a different physical node.
struct RingEntry {
    std::uint64_t token = 0;
    std::uint32_t node = 0;
    std::uint32_t delta = 0;

    friend bool operator==(const RingEntry&, const RingEntry&) = default;
};

// Sorted token ring. Immutable after build; concurrent readers need no
// synchronization.
struct Ring {
    std::vector<RingEntry> entries;  // sorted ascending by (token, node, replica)
    std::uint32_t node_count = 0;    // number of distinct node ids on the ring
    std::uint32_t id_bound = 0;      // max node id + 1 (ids may be sparse after removals)
    std::uint32_t vnodes_per_node = 0;
    HashSeed seed;

    std::size_t size() const { return entries.size(); }
};

// Cyclic gap lengths normalized by 2^64; gap i is the arc (token_i, token_{i+1}]
// whose keys resolve to successor entry (i+1) mod |R|. Sums to 1.
struct GapProfile {
    std::vector<double> gaps;
};

/// Collision-free input encoding of a (node, replica) pair: node in the high
/// 32 bits, replica in the low 32 bits.
constexpr std::uint64_t encode_vnode(std::uint32_t node, std::uint32_t replica) {
    return (static_cast<std::uint64_t>(node) << 32) | replica;
}

/// Fills delta for a sorted entry array in O(|R|) time, O(1) extra memory.
/// Throws std::invalid_argument unless at least 2 distinct node ids present.
void build_next_distinct(std::span<RingEntry> entries);

/// Builds the ring for node ids 0..n_nodes-1 with vnodes tokens each.
/// Token of (node n, replica r) = hash_pos(encode_vnode(n, r), seed).
Ring build_ring(std::uint32_t n_nodes, std::uint32_t vnodes, HashSeed seed);

/// Builds the ring over an explicit node id set (used for rebuilds over
/// survivors and membership changes); tokens of surviving (node, replica)
/// pairs are identical to the original build.
Ring build_ring(std::span<const std::uint32_t> node_ids, std::uint32_t vnodes, HashSeed seed);

/// Smallest index whose token >= h; wraps to 0 when h exceeds every token.
std::size_t ring_lower_bound(const Ring& ring, std::uint64_t h);

GapProfile gap_profile(const Ring& ring);

// Binary dump/load so a harness can reuse rings across runs. Little-endian
// layout: "LRHRING1" magic, u32 node_count, u32 id_bound, u32 vnodes, u64
// seed, u64 entry count, then per entry u64 token, u32 node, u32 delta.
void save_ring(const Ring& ring, const std::filesystem::path& path);
Ring load_ring(const std::filesystem::path& path);

}  // namespace lrh
