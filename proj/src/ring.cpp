#include "lrh/ring.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace lrh {

void build_next_distinct(std::span<RingEntry> entries) {
    const std::size_t m = entries.size();
    if (m < 2) {
        throw std::invalid_argument("build_next_distinct: need at least 2 entries");
    }
    const std::uint32_t first = entries[0].node;
    bool two_distinct = false;
    for (const RingEntry& e : entries) {
        if (e.node != first) {
            two_distinct = true;
            break;
        }
    }
    if (!two_distinct) {
        throw std::invalid_argument("build_next_distinct: need at least 2 distinct node ids");
    }

    // Two-pointer sweep: j persists across i, so the total work is O(m) even
    // though the inner loop wraps past the end for trailing entries.
    std::size_t j = 1;
    for (std::size_t i = 0; i < m; ++i) {
        if (j <= i) {
            j = i + 1;
        }
        while (entries[j % m].node == entries[i].node) {
            ++j;
        }
        entries[i].delta = static_cast<std::uint32_t>(j - i);
    }
}

Ring build_ring(std::uint32_t n_nodes, std::uint32_t vnodes, HashSeed seed) {
    std::vector<std::uint32_t> ids(n_nodes);
    std::iota(ids.begin(), ids.end(), 0);
    return build_ring(ids, vnodes, seed);
}

Ring build_ring(std::span<const std::uint32_t> node_ids, std::uint32_t vnodes, HashSeed seed) {
    if (node_ids.size() < 2) {
        throw std::invalid_argument("build_ring: need at least 2 nodes (delta is undefined otherwise)");
    }
    if (vnodes < 1) {
        throw std::invalid_argument("build_ring: vnodes must be >= 1");
    }

    struct Token {
        std::uint64_t token;
        std::uint32_t node;
        std::uint32_t replica;
    };
    std::vector<Token> tokens;
    tokens.reserve(node_ids.size() * vnodes);
    std::uint32_t max_id = 0;
    for (std::uint32_t n : node_ids) {
        max_id = std::max(max_id, n);
        for (std::uint32_t r = 0; r < vnodes; ++r) {
            tokens.push_back({hash_pos(encode_vnode(n, r), seed), n, r});
        }
    }
    // Total order on the triple keeps rebuilds byte-for-byte reproducible even
    // under 64-bit token collisions.
    std::sort(tokens.begin(), tokens.end(), [](const Token& a, const Token& b) {
        return std::tie(a.token, a.node, a.replica) < std::tie(b.token, b.node, b.replica);
    });

    Ring ring;
    ring.entries.reserve(tokens.size());
    for (const Token& t : tokens) {
        ring.entries.push_back({t.token, t.node, 0});
    }
    ring.node_count = static_cast<std::uint32_t>(node_ids.size());
    ring.id_bound = max_id + 1;
    ring.vnodes_per_node = vnodes;
    ring.seed = seed;
    build_next_distinct(ring.entries);
    return ring;
}

std::size_t ring_lower_bound(const Ring& ring, std::uint64_t h) {
    const auto& e = ring.entries;
    auto it = std::lower_bound(e.begin(), e.end(), h,
                               [](const RingEntry& a, std::uint64_t v) { return a.token < v; });
    if (it == e.end()) {
        return 0;  // wrap
    }
    return static_cast<std::size_t>(it - e.begin());
}

GapProfile gap_profile(const Ring& ring) {
    const std::size_t m = ring.size();
    GapProfile profile;
    if (m == 0) {
        throw std::invalid_argument("gap_profile: empty ring");
    }
    profile.gaps.resize(m);
    if (m == 1) {
        profile.gaps[0] = 1.0;  // full circle
        return profile;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t next = ring.entries[(i + 1) % m].token;
        const std::uint64_t gap = next - ring.entries[i].token;  // mod 2^64
        profile.gaps[i] = static_cast<double>(gap) * 0x1p-64;
    }
    return profile;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

constexpr char kMagic[8] = {'L', 'R', 'H', 'R', 'I', 'N', 'G', '1'};

}  // namespace

void save_ring(const Ring& ring, const std::filesystem::path& path) {
    std::string buf;
    buf.reserve(32 + ring.size() * 16);
    buf.append(kMagic, sizeof(kMagic));
    put_u32(buf, ring.node_count);
    put_u32(buf, ring.id_bound);
    put_u32(buf, ring.vnodes_per_node);
    put_u64(buf, ring.seed.value);
    put_u64(buf, static_cast<std::uint64_t>(ring.size()));
    for (const RingEntry& e : ring.entries) {
        put_u64(buf, e.token);
        put_u32(buf, e.node);
        put_u32(buf, e.delta);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("save_ring: cannot open " + path.string());
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw std::runtime_error("save_ring: write failed for " + path.string());
    }
}

Ring load_ring(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_ring: cannot open " + path.string());
    }
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 36 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_ring: bad header in " + path.string());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data()) + 8;
    Ring ring;
    ring.node_count = get_u32(p);
    ring.id_bound = get_u32(p + 4);
    ring.vnodes_per_node = get_u32(p + 8);
    ring.seed.value = get_u64(p + 12);
    const std::uint64_t count = get_u64(p + 20);
    if (buf.size() != 36 + count * 16) {
        throw std::runtime_error("load_ring: truncated file " + path.string());
    }
    p += 28;
    ring.entries.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i, p += 16) {
        ring.entries.push_back({get_u64(p), get_u32(p + 8), get_u32(p + 12)});
    }
    return ring;
}

}  // namespace lrh
