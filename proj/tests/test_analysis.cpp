#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "lrh/analysis.hpp"
#include "lrh/lrh.hpp"

using namespace lrh;
using namespace lrh::analysis;

namespace {

struct Stream {
    std::uint64_t s;
    std::uint64_t next() {
        s += hashconst::kGolden;
        return mix64(s);
    }
};

// n-choose-k subset enumeration oracle for the hypergeometric check.
double enumerate_subset_probability(std::uint32_t n, std::uint32_t f, std::uint32_t c) {
    // Counts c-subsets of [0, n) fully contained in [0, f).
    std::vector<std::uint32_t> idx(c);
    for (std::uint32_t i = 0; i < c; ++i) {
        idx[i] = i;
    }
    std::uint64_t total = 0;
    std::uint64_t inside = 0;
    while (true) {
        ++total;
        bool all_in = true;
        for (std::uint32_t v : idx) {
            if (v >= f) {
                all_in = false;
                break;
            }
        }
        inside += all_in ? 1 : 0;
        // next combination
        int i = static_cast<int>(c) - 1;
        while (i >= 0 && idx[i] == n - c + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++idx[i];
        for (std::uint32_t j = i + 1; j < c; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("fluid_loads: two nodes split the circle evenly") {
    const Ring ring = build_ring(2, 1, HashSeed{0});
    const FluidLoads fl = fluid_loads(ring, 2);
    CHECK(fl.loads[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fl.loads[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fluid_loads: c=1 reduces to per-successor gap mass") {
    const Ring ring = build_ring(12, 4, HashSeed{101});
    const FluidLoads fl = fluid_loads(ring, 1);
    const GapProfile gaps = gap_profile(ring);
    std::vector<double> expect(ring.id_bound, 0.0);
    for (std::size_t i = 0; i < ring.size(); ++i) {
        expect[ring.entries[(i + 1) % ring.size()].node] += gaps.gaps[i];
    }
    for (std::size_t n = 0; n < expect.size(); ++n) {
        CHECK(fl.loads[n] == doctest::Approx(expect[n]).epsilon(1e-12));
    }
}

TEST_CASE("fluid_loads: shares sum to one") {
    for (std::uint64_t seed : {7ULL, 8ULL, 9ULL}) {
        const Ring ring = build_ring(20, 8, HashSeed{seed});
        for (std::uint32_t c : {1u, 2u, 4u, 8u}) {
            const FluidLoads fl = fluid_loads(ring, c);
            double sum = 0.0;
            for (double l : fl.loads) {
                CHECK(l >= 0.0);
                sum += l;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("fluid_loads: empirical key shares converge to the exact identity") {
    const Ring ring = build_ring(20, 8, HashSeed{102});
    const std::uint32_t c = 4;
    const FluidLoads fl = fluid_loads(ring, c);
    const std::uint64_t n_keys = 200000;
    std::vector<std::uint64_t> counts(20, 0);
    Stream rng{61};
    for (std::uint64_t i = 0; i < n_keys; ++i) {
        counts[lookup(ring, rng.next(), c, ring.seed).node]++;
    }
    for (std::uint32_t n = 0; n < 20; ++n) {
        const double share = static_cast<double>(counts[n]) / static_cast<double>(n_keys);
        const double sigma =
            std::sqrt(fl.loads[n] * (1.0 - fl.loads[n]) / static_cast<double>(n_keys));
        CHECK(std::abs(share - fl.loads[n]) <= 3.0 * sigma + 1e-12);
    }
}

TEST_CASE("coverage_counts: basics and the m*c sum") {
    {
        const Ring ring = build_ring(2, 1, HashSeed{0});
        const CoverageCounts cc = coverage_counts(ring, 2);
        CHECK(cc.counts[0] == 2);
        CHECK(cc.counts[1] == 2);
    }
    for (std::uint64_t seed : {5ULL, 6ULL}) {
        const Ring ring = build_ring(15, 6, HashSeed{seed});
        const std::uint32_t c = 4;
        const CoverageCounts cc = coverage_counts(ring, c);
        std::uint64_t sum = 0;
        for (std::uint64_t d : cc.counts) {
            CHECK(d <= ring.size());
            sum += d;
        }
        CHECK(sum == ring.size() * c);
    }
}

TEST_CASE("coverage_counts: matches a plain +1-scan enumeration oracle") {
    const Ring ring = build_ring(10, 4, HashSeed{103});
    const std::uint32_t c = 3;
    const CoverageCounts cc = coverage_counts(ring, c);
    std::vector<std::uint64_t> expect(ring.id_bound, 0);
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        std::set<std::uint32_t> distinct;
        std::size_t idx = (i + 1) % m;
        while (distinct.size() < c) {
            distinct.insert(ring.entries[idx].node);
            idx = (idx + 1) % m;
        }
        for (std::uint32_t n : distinct) {
            expect[n]++;
        }
    }
    for (std::size_t n = 0; n < expect.size(); ++n) {
        CHECK(cc.counts[n] == expect[n]);
    }
}

TEST_CASE("uniform-gap fluid shares equal d/(c*m) exactly") {
    const Ring ring = build_ring(18, 5, HashSeed{104});
    const std::uint32_t c = 4;
    const FluidLoads fl = fluid_loads_distinct(ring, c, /*uniform_gaps=*/true);
    const CoverageCounts cc = coverage_counts(ring, c);
    const double m = static_cast<double>(ring.size());
    for (std::uint32_t n = 0; n < 18; ++n) {
        const double expect = static_cast<double>(cc.counts[n]) / (c * m);
        CHECK(fl.loads[n] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("smoothing scaling: doubling C or V halves the fluid SD") {
    const std::uint32_t cs[] = {2, 4, 8};
    const auto rows = smoothing_scaling_probe(100, 16, cs, 8, 1234);
    REQUIRE(rows.size() == 3);
    const double ratio_c = rows[2].measured_sd / rows[0].measured_sd;  // c=8 vs c=2
    CHECK(ratio_c == doctest::Approx(0.5).epsilon(0.25));

    // Doubling V at fixed c matches doubling c at fixed V.
    const std::uint32_t c2[] = {2, 4};
    const auto v16 = smoothing_scaling_probe(100, 16, c2, 8, 1234);
    const auto v32 = smoothing_scaling_probe(100, 32, c2, 8, 1234);
    const double by_c = v16[1].measured_sd / v16[0].measured_sd;
    const double by_v = v32[0].measured_sd / v16[0].measured_sd;
    CHECK(by_c / by_v == doctest::Approx(1.0).epsilon(0.25));

    // c=1 reduces to the classic ring gap-variance scale 1/(N*sqrt(V)).
    const std::uint32_t c1[] = {1};
    const auto ring_scale = smoothing_scaling_probe(100, 16, c1, 8, 1234);
    CHECK(ring_scale[0].measured_sd ==
          doctest::Approx(ring_scale[0].predicted_sd).epsilon(0.25));
}

TEST_CASE("variance decomposition: compound term is second order") {
    const VarianceDecomposition vd = variance_decomposition_probe(400, 16, 4, 6, 999);
    CHECK(vd.mean_d == doctest::Approx(16.0 * 4.0).epsilon(0.05));
    CHECK(vd.ratio <= 10.0 * 4.0 * 4.0 / 400.0);
    CHECK(vd.structural_term > 0.0);
    CHECK(vd.compound_term >= 0.0);
    CHECK_THROWS_AS(variance_decomposition_probe(16, 4, 4, 2, 1), std::invalid_argument);
}

TEST_CASE("availability_independent: formula and domain") {
    CHECK(availability_independent(0.5, 3) == doctest::Approx(0.125));
    CHECK(availability_independent(0.0, 7) == 0.0);
    CHECK_THROWS_AS(availability_independent(1.0, 2), std::domain_error);
    CHECK_THROWS_AS(availability_independent(-0.1, 2), std::domain_error);
}

TEST_CASE("availability_hypergeometric: spot values and enumeration oracle") {
    {
        const auto hg = availability_hypergeometric(5, 2, 2);
        CHECK(hg.exact == doctest::Approx(0.1));
        CHECK(hg.bound == doctest::Approx(0.16));
    }
    CHECK(availability_hypergeometric(10, 2, 3).exact == 0.0);  // f < c
    {
        const auto hg = availability_hypergeometric(20, 8, 3);
        CHECK(hg.exact == doctest::Approx(enumerate_subset_probability(20, 8, 3)).epsilon(1e-12));
    }
}

TEST_CASE("expected_fallback_blocks: closed forms and divergence guard") {
    {
        const auto fb = expected_fallback_blocks(0.0, 5);
        CHECK(fb.blocks == doctest::Approx(1.0));
        CHECK(fb.candidates == doctest::Approx(5.0));
    }
    {
        const auto fb = expected_fallback_blocks(0.5, 1);
        CHECK(fb.blocks == doctest::Approx(2.0));
        CHECK(fb.candidates == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(expected_fallback_blocks(1.0, 3), std::domain_error);
}

TEST_CASE("monte carlo companions stay inside their 3-sigma bands") {
    const CheckResult av = availability_independent_mc(0.3, 4, 100, 16, 4000, 60, 777);
    CHECK(av.pass);
    const CheckResult fb = expected_fallback_blocks_mc(0.4, 3, 120, 800, 40, 777);
    CHECK(fb.pass);
    const CheckResult rack = rack_failure_probe(100, 20, 2, 40, 2000, 777);
    CHECK(rack.pass);
}

TEST_CASE("key variance probe: the two terms add up") {
    const KeyVariancePair kv = key_variance_probe(50, 8, 4, 5000, 10, 4242);
    CHECK(kv.measured_sampling ==
          doctest::Approx(kv.sampling_term).epsilon(0.3));
    CHECK(kv.measured_total ==
          doctest::Approx(kv.sampling_term + kv.structural_term).epsilon(0.3));
}

TEST_CASE("write_csv emits the five-column schema") {
    std::vector<CheckResult> results;
    results.push_back({"alpha", 1.0, 1.01, 0.02, true});
    results.push_back({"beta", 0.5, 0.4, 0.01, false});
    const auto path = std::filesystem::temp_directory_path() / "analysis_test.csv";
    write_csv(results, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "check_name,predicted,measured,sigma,pass");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
        ++rows;
    }
    CHECK(rows == 2);
    std::filesystem::remove(path);
}
