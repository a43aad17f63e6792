#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "lrh/ring.hpp"

using namespace lrh;

namespace {

struct Stream {
    std::uint64_t s;
    std::uint64_t next() {
        s += hashconst::kGolden;
        return mix64(s);
    }
};

// Independent O(m^2) oracle: for each index scan forward (wrapping) to the
// first entry with a different node id.
std::vector<std::uint32_t> naive_next_distinct(const std::vector<std::uint32_t>& nodes) {
    const std::size_t m = nodes.size();
    std::vector<std::uint32_t> delta(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t off = 1; off <= m; ++off) {
            if (nodes[(i + off) % m] != nodes[i]) {
                delta[i] = static_cast<std::uint32_t>(off);
                break;
            }
        }
    }
    return delta;
}

std::vector<RingEntry> entries_from_nodes(const std::vector<std::uint32_t>& nodes) {
    std::vector<RingEntry> entries;
    entries.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        entries.push_back({static_cast<std::uint64_t>(i), nodes[i], 0});
    }
    return entries;
}

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("build_next_distinct: hand-traceable sequences") {
    {
        std::vector<RingEntry> e = entries_from_nodes({0, 0, 1, 0, 1});  // A,A,B,A,B
        build_next_distinct(e);
        const std::vector<std::uint32_t> expect{2, 1, 1, 1, 1};
        for (std::size_t i = 0; i < e.size(); ++i) {
            CHECK(e[i].delta == expect[i]);
        }
    }
    {
        std::vector<RingEntry> e = entries_from_nodes({0, 1});  // A,B
        build_next_distinct(e);
        CHECK(e[0].delta == 1);
        CHECK(e[1].delta == 1);
    }
}

TEST_CASE("build_next_distinct: rejects single distinct node") {
    std::vector<RingEntry> e = entries_from_nodes({3, 3, 3});
    CHECK_THROWS_AS(build_next_distinct(e), std::invalid_argument);
    std::vector<RingEntry> one = entries_from_nodes({3});
    CHECK_THROWS_AS(build_next_distinct(one), std::invalid_argument);
}

TEST_CASE("build_next_distinct: 10^4 random sequences match the naive oracle") {
    Stream rng{11};
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n_nodes = 2 + rng.next() % 19;  // N <= 20
        const std::size_t vnodes = 1 + rng.next() % 8;    // V <= 8
        std::vector<std::uint32_t> nodes(n_nodes * vnodes);
        bool two = false;
        for (auto& n : nodes) {
            n = static_cast<std::uint32_t>(rng.next() % n_nodes);
            two = two || n != nodes[0];
        }
        if (!two) {
            nodes.back() = nodes[0] + 1;
        }
        std::vector<RingEntry> entries = entries_from_nodes(nodes);
        build_next_distinct(entries);
        const std::vector<std::uint32_t> expect = naive_next_distinct(nodes);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            REQUIRE(entries[i].delta == expect[i]);
        }
    }
}

TEST_CASE("build_ring: N=2, V=1 layout") {
    const Ring ring = build_ring(2, 1, HashSeed{0});
    REQUIRE(ring.size() == 2);
    // Tokens from the documented encoding, frozen golden values.
    CHECK(ring.entries[0].token == 0x4d66156fc29e57d0ULL);  // node 0, replica 0
    CHECK(ring.entries[1].token == 0x710f076cf197b7edULL);  // node 1, replica 0
    for (const RingEntry& e : ring.entries) {
        CHECK(e.delta == 1);
    }
    CHECK(ring.entries[0].node != ring.entries[1].node);
}

TEST_CASE("build_ring: sortedness and delta minimality (N=3, V=2 oracle)") {
    const Ring ring = build_ring(3, 2, HashSeed{42});
    REQUIRE(ring.size() == 6);
    std::vector<std::uint32_t> nodes;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (i + 1 < ring.size()) {
            CHECK(ring.entries[i].token <= ring.entries[i + 1].token);
        }
        nodes.push_back(ring.entries[i].node);
    }
    const auto expect = naive_next_distinct(nodes);
    for (std::size_t i = 0; i < ring.size(); ++i) {
        CHECK(ring.entries[i].delta == expect[i]);
    }
}

TEST_CASE("build_ring: paper-scale entry count") {
    const Ring ring = build_ring(5000, 256, HashSeed{20251226});
    CHECK(ring.size() == 1280000);
}

TEST_CASE("build_ring: rejects degenerate configs") {
    CHECK_THROWS_AS(build_ring(1, 4, HashSeed{0}), std::invalid_argument);
    CHECK_THROWS_AS(build_ring(4, 0, HashSeed{0}), std::invalid_argument);
}

TEST_CASE("build_ring: identical config reproduces byte-for-byte") {
    const Ring a = build_ring(40, 8, HashSeed{7});
    const Ring b = build_ring(40, 8, HashSeed{7});
    CHECK(a.entries == b.entries);

    const auto dir = std::filesystem::temp_directory_path();
    const auto pa = dir / "ring_a.bin";
    const auto pb = dir / "ring_b.bin";
    save_ring(a, pa);
    save_ring(b, pb);
    CHECK(file_bytes(pa) == file_bytes(pb));
    std::filesystem::remove(pa);
    std::filesystem::remove(pb);
}

TEST_CASE("save_ring/load_ring round trip") {
    const Ring a = build_ring(17, 5, HashSeed{99});
    const auto path = std::filesystem::temp_directory_path() / "ring_rt.bin";
    save_ring(a, path);
    const Ring b = load_ring(path);
    CHECK(a.entries == b.entries);
    CHECK(a.node_count == b.node_count);
    CHECK(a.id_bound == b.id_bound);
    CHECK(a.vnodes_per_node == b.vnodes_per_node);
    CHECK(a.seed.value == b.seed.value);
    std::filesystem::remove(path);
}

TEST_CASE("ring_lower_bound conventions") {
    Ring ring;
    ring.entries = {{5, 0, 1}, {5, 1, 1}, {9, 0, 1}};
    CHECK(ring_lower_bound(ring, 0) == 0);
    CHECK(ring_lower_bound(ring, 5) == 0);   // first occurrence of an equal token
    CHECK(ring_lower_bound(ring, 6) == 2);
    CHECK(ring_lower_bound(ring, 9) == 2);
    CHECK(ring_lower_bound(ring, 10) == 0);  // beyond max token wraps
}

TEST_CASE("gap_profile: wrap semantics and normalization") {
    {
        Ring ring;
        ring.entries = {{123, 0, 1}};
        const GapProfile g = gap_profile(ring);
        REQUIRE(g.gaps.size() == 1);
        CHECK(g.gaps[0] == 1.0);
    }
    {
        Ring ring;
        ring.entries = {{0, 0, 1}, {0x8000000000000000ULL, 1, 1}};
        const GapProfile g = gap_profile(ring);
        CHECK(g.gaps[0] == doctest::Approx(0.5));
        CHECK(g.gaps[1] == doctest::Approx(0.5));
    }
    {
        const Ring ring = build_ring(30, 16, HashSeed{3});
        const GapProfile g = gap_profile(ring);
        double sum = 0.0;
        for (double v : g.gaps) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("delta validity on built rings: intermediate entries share the node") {
    Stream rng{12};
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = static_cast<std::uint32_t>(2 + rng.next() % 15);
        const auto v = static_cast<std::uint32_t>(1 + rng.next() % 6);
        const Ring ring = build_ring(n, v, HashSeed{rng.next()});
        const std::size_t m = ring.size();
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint32_t d = ring.entries[i].delta;
            REQUIRE(d >= 1);
            CHECK(ring.entries[(i + d) % m].node != ring.entries[i].node);
            for (std::uint32_t off = 1; off < d; ++off) {
                CHECK(ring.entries[(i + off) % m].node == ring.entries[i].node);
            }
        }
    }
}
