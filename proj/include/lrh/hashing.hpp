#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Deterministic 64-bit hashing primitives shared by every placement scheme.
// All constants and formulas are documented in HASHING.md; ports in other
// languages must reproduce these bit-exactly.

namespace lrh {

struct HashSeed {
    std::uint64_t value = 0;
};

namespace hashconst {
// splitmix64 finalizer multipliers (Steele/Lea/Flood, public domain).
inline constexpr std::uint64_t kMixA = 0xbf58476d1ce4e5b9ULL;
inline constexpr std::uint64_t kMixB = 0x94d049bb133111ebULL;
// 2^64 / golden ratio; odd, so multiplication by it is a bijection.
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Domain-separation constants (ASCII tags).
inline constexpr std::uint64_t kPosDomain = 0x706f736974696f6eULL;        // "position"
inline constexpr std::uint64_t kScoreDomain = 0x68727773636f7265ULL;      // "hrwscore"
inline constexpr std::uint64_t kProbeMixDomain = 0x70726f62656d6978ULL;   // "probemix"
inline constexpr std::uint64_t kProbeH1Domain = 0x64626c6861736831ULL;    // "dblhash1"
inline constexpr std::uint64_t kProbeH2Domain = 0x64626c6861736832ULL;    // "dblhash2"
inline constexpr std::uint64_t kMaglevOffsetDomain = 0x6d61676c65766831ULL; // "maglevh1"
inline constexpr std::uint64_t kMaglevSkipDomain = 0x6d61676c65766832ULL;   // "maglevh2"
inline constexpr std::uint64_t kCrushRackPick = 0x6372757368726b70ULL;    // "crushrkp"
inline constexpr std::uint64_t kCrushRackScore = 0x6372757368726b73ULL;   // "crushrks"
inline constexpr std::uint64_t kCrushLeafPick = 0x63727573686c6670ULL;    // "crushlfp"
inline constexpr std::uint64_t kCrushLeafScore = 0x63727573686c6673ULL;   // "crushlfs"
inline constexpr std::uint64_t kKeyStreamDomain = 0x6b65797374726561ULL;  // "keystrea"
inline constexpr std::uint64_t kFailSetDomain = 0x6661696c73657478ULL;    // "failsetx"
}  // namespace hashconst

/// splitmix64 finalizer: full-avalanche bijective mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= hashconst::kMixA;
    z ^= z >> 27;
    z *= hashconst::kMixB;
    z ^= z >> 31;
    return z;
}

/// Ring-position hash: full-range 64-bit position for a key (or vnode code).
constexpr std::uint64_t hash_pos(std::uint64_t key, HashSeed seed) {
    return mix64(key ^ seed.value ^ hashconst::kPosDomain);
}

/// Per-node salt folded into HRW scores; injective in the node id.
constexpr std::uint64_t node_salt(std::uint32_t node) {
    return (static_cast<std::uint64_t>(node) + 1) * hashconst::kGolden;
}

/// Key-side half of hash_score; hoist out of candidate loops.
constexpr std::uint64_t score_key_mix(std::uint64_t key, HashSeed seed) {
    return mix64(key ^ seed.value ^ hashconst::kScoreDomain);
}

constexpr std::uint64_t hash_score_premixed(std::uint64_t key_mix, std::uint32_t node) {
    return mix64(key_mix ^ node_salt(node));
}

/// Per-(key, node) HRW score; domain-separated from hash_pos.
constexpr std::uint64_t hash_score(std::uint64_t key, std::uint32_t node, HashSeed seed) {
    return hash_score_premixed(score_key_mix(key, seed), node);
}

/// Maps a 64-bit hash onto (0, 1]; u = (h + 1) / 2^64, so log(u) is finite.
inline double unit_score(std::uint64_t h) {
    return (static_cast<double>(h) + 1.0) * 0x1p-64;
}

/// Weighted HRW score -ln(u)/w. The winner of a candidate race is the
/// MINIMIZER. With equal weights the argmin coincides with the argmax of
/// hash_score over the same set.
inline double weighted_score(std::uint64_t key, std::uint32_t node, double weight, HashSeed seed) {
    if (!(weight > 0.0)) {
        throw std::domain_error("weighted_score: weight must be positive");
    }
    return -std::log(unit_score(hash_score(key, node, seed))) / weight;
}

enum class ProbeMode { kMix64, kDoubleHash };

constexpr std::uint64_t probe_h1(std::uint64_t key, HashSeed seed) {
    return mix64(key ^ seed.value ^ hashconst::kProbeH1Domain);
}

constexpr std::uint64_t probe_h2(std::uint64_t key, HashSeed seed) {
    // Forced odd so the probe stride is a unit mod 2^64.
    return mix64(key ^ seed.value ^ hashconst::kProbeH2Domain) | 1ULL;
}

/// Multi-probe position for (key, probe_index).
///   kMix64:      one full remix per probe.
///   kDoubleHash: h1(key) + j * h2(key); probe 0 is exactly h1(key).
constexpr std::uint64_t probe_hash(std::uint64_t key, std::uint32_t probe_index, HashSeed seed,
                                   ProbeMode mode) {
    if (mode == ProbeMode::kMix64) {
        return mix64((key ^ seed.value ^ hashconst::kProbeMixDomain) +
                     (static_cast<std::uint64_t>(probe_index) + 1) * hashconst::kGolden);
    }
    return probe_h1(key, seed) + static_cast<std::uint64_t>(probe_index) * probe_h2(key, seed);
}

// Optional keyed mode: substitute any 64-bit PRF (e.g. SipHash bound to a
// secret key) for the default mixer in adversarial settings. The PRF is
// applied to the same domain-separated input word.
template <class Prf>
std::uint64_t hash_pos_keyed(std::uint64_t key, const Prf& prf) {
    return prf(key ^ hashconst::kPosDomain);
}

template <class Prf>
std::uint64_t hash_score_keyed(std::uint64_t key, std::uint32_t node, const Prf& prf) {
    return prf(prf(key ^ hashconst::kScoreDomain) ^ node_salt(node));
}

}  // namespace lrh
