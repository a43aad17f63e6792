#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrh/assign.hpp"
#include "lrh/hashing.hpp"
#include "lrh/liveness.hpp"
#include "lrh/ring.hpp"

namespace lrh {

// The C entries visited by walking next-distinct offsets from a key's
// successor. Each step lands on a node different from the previous entry's;
// a node can still reappear non-adjacently when its tokens straddle the
// window, in which case re-scoring it is a no-op for the election.
struct CandidateSet {
    std::vector<std::uint32_t> nodes;          // node per visited entry, in visit order
    std::vector<std::uint32_t> entry_indices;  // ring index per visited entry
};

/// Enumerates the c-entry candidate window for a key. Deterministic in
/// (key, ring, c). Requires 2 <= c <= ring.node_count.
CandidateSet candidates(const Ring& ring, std::uint64_t key, std::uint32_t c, HashSeed seed);

/// C-way local HRW election: winner = argmax hash_score over the candidate
/// window (ties broken by smaller node id). scan_steps = c.
LookupResult lookup(const Ring& ring, std::uint64_t key, std::uint32_t c, HashSeed seed);

/// Weighted election: winner = argmin of -ln(u)/w over the window. With
/// uniform weights the winner matches lookup() for every key.
LookupResult lookup_weighted(const Ring& ring, std::uint64_t key, std::uint32_t c,
                             const WeightTable& weights, HashSeed seed);

/// Liveness failover confined to the key's fixed candidate window: best-
/// scoring alive candidate wins. If the whole window is dead, the walk is
/// extended one c-sized block of further (globally new) candidates at a time
/// until an alive node is found or max_scan entries have been visited, in
/// which case a std::runtime_error reports the availability failure.
LookupResult lookup_fixed_candidate(const Ring& ring, std::uint64_t key, std::uint32_t c,
                                    const LivenessMask& mask, HashSeed seed,
                                    std::uint32_t max_scan);

enum class AssignMode {
    kAllAlive,        // election over the window, liveness ignored
    kFixedCandidate,  // original ring + mask filtering
    kRebuild,         // caller supplies a ring rebuilt over alive nodes only
};

/// Maps a whole key array under one failure-handling semantics. kRebuild
/// expects `ring` to be the survivor rebuild and behaves like kAllAlive on
/// it. mask may be null for kAllAlive/kRebuild.
AssignmentSnapshot assign_all(const Ring& ring, std::span<const std::uint64_t> keys,
                              AssignMode mode, std::uint32_t c, const LivenessMask* mask,
                              HashSeed seed, std::uint32_t max_scan, unsigned workers);

}  // namespace lrh
