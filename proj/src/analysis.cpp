#include "lrh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lrh/liveness.hpp"
#include "lrh/lrh.hpp"

namespace lrh::analysis {

namespace {

// Deterministic sub-streams for probes: one splitmix64 stream per (tag, index).
struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t s) : state(s) {}
    std::uint64_t next() {
        state += hashconst::kGolden;
        return mix64(state);
    }
    double next_unit() { return unit_score(next()); }
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index) {
    return mix64((base ^ tag) + index * hashconst::kGolden);
}

// Distinct nodes of the c-entry window starting at the gap's successor.
// `buf` receives the distinct ids; returns their count (<= c).
std::size_t window_distinct(const Ring& ring, std::size_t successor, std::uint32_t c,
                            std::vector<std::uint32_t>& buf) {
    const std::size_t m = ring.size();
    buf.clear();
    std::size_t idx = successor;
    for (std::uint32_t t = 0; t < c; ++t) {
        const RingEntry& e = ring.entries[idx];
        if (std::find(buf.begin(), buf.end(), e.node) == buf.end()) {
            buf.push_back(e.node);
        }
        idx = (idx + e.delta) % m;
    }
    return buf.size();
}

// Idealized enumeration: keep delta-stepping until c distinct nodes found.
void window_distinct_exact(const Ring& ring, std::size_t successor, std::uint32_t c,
                           std::vector<std::uint32_t>& buf) {
    const std::size_t m = ring.size();
    buf.clear();
    std::size_t idx = successor;
    std::size_t guard = 0;
    while (buf.size() < c) {
        if (++guard > 2 * m + c) {
            throw std::logic_error("window_distinct_exact: walk failed to find c distinct nodes");
        }
        const RingEntry& e = ring.entries[idx];
        if (std::find(buf.begin(), buf.end(), e.node) == buf.end()) {
            buf.push_back(e.node);
        }
        idx = (idx + e.delta) % m;
    }
}

void check_fluid_args(const Ring& ring, std::uint32_t c) {
    if (ring.size() == 0) {
        throw std::invalid_argument("fluid_loads: empty ring");
    }
    if (c < 1 || c > ring.node_count) {
        throw std::invalid_argument("fluid_loads: c must be in [1, distinct node count]");
    }
}

}  // namespace

FluidLoads fluid_loads(const Ring& ring, std::uint32_t c) {
    check_fluid_args(ring, c);
    const std::size_t m = ring.size();
    const GapProfile gaps = gap_profile(ring);
    FluidLoads fl;
    fl.loads.assign(ring.id_bound, 0.0);
    std::vector<std::uint32_t> buf;
    buf.reserve(c);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t successor = (i + 1) % m;
        const std::size_t d = window_distinct(ring, successor, c, buf);
        const double share = gaps.gaps[i] / static_cast<double>(d);
        for (std::size_t t = 0; t < d; ++t) {
            fl.loads[buf[t]] += share;
        }
    }
    return fl;
}

FluidLoads fluid_loads_distinct(const Ring& ring, std::uint32_t c, bool uniform_gaps) {
    check_fluid_args(ring, c);
    const std::size_t m = ring.size();
    GapProfile gaps;
    if (!uniform_gaps) {
        gaps = gap_profile(ring);
    }
    FluidLoads fl;
    fl.loads.assign(ring.id_bound, 0.0);
    std::vector<std::uint32_t> buf;
    buf.reserve(c);
    const double uniform = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        window_distinct_exact(ring, (i + 1) % m, c, buf);
        const double share = (uniform_gaps ? uniform : gaps.gaps[i]) / static_cast<double>(c);
        for (std::uint32_t node : buf) {
            fl.loads[node] += share;
        }
    }
    return fl;
}

CoverageCounts coverage_counts(const Ring& ring, std::uint32_t c) {
    check_fluid_args(ring, c);
    const std::size_t m = ring.size();
    CoverageCounts cc;
    cc.counts.assign(ring.id_bound, 0);
    std::vector<std::uint32_t> buf;
    buf.reserve(c);
    for (std::size_t i = 0; i < m; ++i) {
        window_distinct_exact(ring, (i + 1) % m, c, buf);
        for (std::uint32_t node : buf) {
            cc.counts[node]++;
        }
    }
    return cc;
}

namespace {

// Population SD of fluid loads around their exact mean 1/N.
double fluid_sd(const FluidLoads& fl, std::uint32_t n_nodes) {
    const double mean = 1.0 / static_cast<double>(n_nodes);
    double ss = 0.0;
    for (double l : fl.loads) {
        const double d = l - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n_nodes));
}

constexpr std::uint64_t kRingTag = 0x72696e6773656564ULL;  // "ringseed"
constexpr std::uint64_t kKeyTag = 0x6b65797365656420ULL;   // "keyseed "
constexpr std::uint64_t kMaskTag = 0x6d61736b73656564ULL;  // "maskseed"

}  // namespace

std::vector<ScalingRow> smoothing_scaling_probe(std::uint32_t n_nodes, std::uint32_t vnodes,
                                                std::span<const std::uint32_t> c_list,
                                                std::uint32_t n_seeds, std::uint64_t base_seed) {
    if (!std::is_sorted(c_list.begin(), c_list.end())) {
        throw std::invalid_argument("smoothing_scaling_probe: c_list must be ascending");
    }
    std::vector<ScalingRow> rows;
    rows.reserve(c_list.size());
    for (std::uint32_t c : c_list) {
        double sum_sd = 0.0;
        for (std::uint32_t s = 0; s < n_seeds; ++s) {
            const Ring ring =
                build_ring(n_nodes, vnodes, HashSeed{derive_seed(base_seed, kRingTag, s)});
            sum_sd += fluid_sd(fluid_loads(ring, c), n_nodes);
        }
        ScalingRow row;
        row.c = c;
        row.measured_sd = sum_sd / static_cast<double>(n_seeds);
        row.predicted_sd = 1.0 / (static_cast<double>(n_nodes) *
                                  std::sqrt(static_cast<double>(vnodes) * static_cast<double>(c)));
        rows.push_back(row);
    }
    return rows;
}

VarianceDecomposition variance_decomposition_probe(std::uint32_t n_nodes, std::uint32_t vnodes,
                                                   std::uint32_t c, std::uint32_t n_seeds,
                                                   std::uint64_t base_seed) {
    if (static_cast<std::uint64_t>(c) * c >= n_nodes) {
        throw std::invalid_argument("variance_decomposition_probe: requires c^2 << n_nodes");
    }
    const double m = static_cast<double>(n_nodes) * vnodes;
    double sum_d = 0.0;
    double sum_d2 = 0.0;
    double sum_cond_var = 0.0;
    std::uint64_t samples = 0;
    for (std::uint32_t s = 0; s < n_seeds; ++s) {
        const Ring ring =
            build_ring(n_nodes, vnodes, HashSeed{derive_seed(base_seed, kRingTag, s)});
        const CoverageCounts cc = coverage_counts(ring, c);
        for (std::uint64_t d : cc.counts) {
            const double dd = static_cast<double>(d);
            sum_d += dd;
            sum_d2 += dd * dd;
            // Var(Beta(d, m-d)) / c^2, the conditional (structural) variance.
            sum_cond_var += dd * (m - dd) / (m * m * (m + 1.0)) / (static_cast<double>(c) * c);
            ++samples;
        }
    }
    const double n = static_cast<double>(samples);
    VarianceDecomposition out;
    out.mean_d = sum_d / n;
    out.var_d = sum_d2 / n - out.mean_d * out.mean_d;
    out.structural_term = sum_cond_var / n;
    out.compound_term = out.var_d / (static_cast<double>(c) * c * m * m);
    out.ratio = out.structural_term > 0.0 ? out.compound_term / out.structural_term : 0.0;
    return out;
}

double availability_independent(double p, std::uint32_t c) {
    if (!(p >= 0.0) || p >= 1.0) {
        throw std::domain_error("availability_independent: p must be in [0, 1)");
    }
    return std::pow(p, static_cast<double>(c));
}

CheckResult availability_independent_mc(double p, std::uint32_t c, std::uint32_t n_nodes,
                                        std::uint32_t vnodes, std::uint32_t n_keys,
                                        std::uint32_t n_masks, std::uint64_t base_seed) {
    const double predicted = availability_independent(p, c);
    const Ring ring = build_ring(n_nodes, vnodes, HashSeed{derive_seed(base_seed, kRingTag, 1)});

    // Keys whose window carries c distinct nodes (the model's hypothesis).
    SplitMix keygen(derive_seed(base_seed, kKeyTag, 1));
    std::vector<std::uint32_t> flat;  // c node ids per eligible key
    std::vector<std::uint32_t> buf;
    for (std::uint32_t k = 0; k < n_keys; ++k) {
        const std::size_t succ = ring_lower_bound(ring, hash_pos(keygen.next(), ring.seed));
        if (window_distinct(ring, succ, c, buf) == c) {
            flat.insert(flat.end(), buf.begin(), buf.end());
        }
    }
    const std::size_t eligible = flat.size() / c;
    if (eligible == 0) {
        throw std::runtime_error("availability_independent_mc: no eligible keys");
    }

    std::vector<std::uint8_t> dead(n_nodes);
    std::vector<double> per_mask(n_masks, 0.0);
    for (std::uint32_t t = 0; t < n_masks; ++t) {
        SplitMix coin(derive_seed(base_seed, kMaskTag, t));
        for (std::uint32_t n = 0; n < n_nodes; ++n) {
            dead[n] = coin.next_unit() <= p ? 1 : 0;
        }
        std::uint64_t all_dead = 0;
        for (std::size_t k = 0; k < eligible; ++k) {
            bool down = true;
            for (std::uint32_t j = 0; j < c; ++j) {
                if (!dead[flat[k * c + j]]) {
                    down = false;
                    break;
                }
            }
            all_dead += down ? 1 : 0;
        }
        per_mask[t] = static_cast<double>(all_dead) / static_cast<double>(eligible);
    }

    double mean = 0.0;
    for (double f : per_mask) {
        mean += f;
    }
    mean /= static_cast<double>(n_masks);
    double var = 0.0;
    for (double f : per_mask) {
        var += (f - mean) * (f - mean);
    }
    // Masks are iid, so the between-mask spread calibrates the band; keys
    // within a mask share candidates and are not independent samples.
    const double sigma = std::sqrt(var / (static_cast<double>(n_masks) - 1.0)) /
                         std::sqrt(static_cast<double>(n_masks));

    CheckResult r;
    r.name = "availability_independent_mc";
    r.predicted = predicted;
    r.measured = mean;
    r.sigma = sigma;
    r.pass = std::abs(mean - predicted) <= 3.0 * sigma;
    return r;
}

HypergeometricAvailability availability_hypergeometric(std::uint32_t n_nodes,
                                                       std::uint32_t f_failed, std::uint32_t c) {
    if (f_failed > n_nodes || c > n_nodes) {
        throw std::invalid_argument("availability_hypergeometric: need f <= n and c <= n");
    }
    HypergeometricAvailability out;
    out.bound = std::pow(static_cast<double>(f_failed) / static_cast<double>(n_nodes),
                         static_cast<double>(c));
    if (f_failed < c) {
        out.exact = 0.0;
        return out;
    }
    double exact = 1.0;
    for (std::uint32_t j = 0; j < c; ++j) {
        exact *= static_cast<double>(f_failed - j) / static_cast<double>(n_nodes - j);
    }
    out.exact = exact;
    return out;
}

FallbackExpectation expected_fallback_blocks(double p, std::uint32_t c) {
    if (!(p >= 0.0) || p >= 1.0) {
        throw std::domain_error("expected_fallback_blocks: p must be in [0, 1)");
    }
    const double pc = std::pow(p, static_cast<double>(c));
    if (pc >= 1.0) {
        throw std::domain_error("expected_fallback_blocks: diverges at p^c = 1");
    }
    return {1.0 / (1.0 - pc), static_cast<double>(c) / (1.0 - pc)};
}

CheckResult expected_fallback_blocks_mc(double p, std::uint32_t c, std::uint32_t n_nodes,
                                        std::uint32_t n_keys, std::uint32_t n_masks,
                                        std::uint64_t base_seed) {
    const double predicted = expected_fallback_blocks(p, c).blocks;
    // V=1: every window and every extension block holds exactly c fresh
    // distinct nodes, matching the geometric model.
    const Ring ring = build_ring(n_nodes, 1, HashSeed{derive_seed(base_seed, kRingTag, 2)});
    SplitMix keygen(derive_seed(base_seed, kKeyTag, 2));
    std::vector<std::uint64_t> keys(n_keys);
    for (auto& k : keys) {
        k = keygen.next();
    }

    std::vector<double> per_mask;
    per_mask.reserve(n_masks);
    for (std::uint32_t t = 0; t < n_masks; ++t) {
        SplitMix coin(derive_seed(base_seed, kMaskTag, 0x1000 + t));
        LivenessMask mask = LivenessMask::all_alive(n_nodes);
        for (std::uint32_t n = 0; n < n_nodes; ++n) {
            if (coin.next_unit() <= p) {
                mask.kill(n);
            }
        }
        if (mask.n_alive() == 0) {
            continue;  // geometric model conditions on eventual success
        }
        std::uint64_t blocks = 0;
        for (std::uint64_t k : keys) {
            const LookupResult r =
                lookup_fixed_candidate(ring, k, c, mask, ring.seed, n_nodes + c);
            blocks += r.fallback_blocks + 1;
        }
        per_mask.push_back(static_cast<double>(blocks) / static_cast<double>(n_keys));
    }
    if (per_mask.size() < 2) {
        throw std::runtime_error("expected_fallback_blocks_mc: not enough usable masks");
    }

    double mean = 0.0;
    for (double b : per_mask) {
        mean += b;
    }
    mean /= static_cast<double>(per_mask.size());
    double var = 0.0;
    for (double b : per_mask) {
        var += (b - mean) * (b - mean);
    }
    const double sigma = std::sqrt(var / (static_cast<double>(per_mask.size()) - 1.0)) /
                         std::sqrt(static_cast<double>(per_mask.size()));

    CheckResult r;
    r.name = "expected_fallback_blocks_mc";
    r.predicted = predicted;
    r.measured = mean;
    r.sigma = sigma;
    r.pass = std::abs(mean - predicted) <= 3.0 * sigma;
    return r;
}

CheckResult rack_failure_probe(std::uint32_t n_nodes, std::uint32_t rack_size, std::uint32_t c,
                               std::uint32_t n_seeds, std::uint32_t n_keys,
                               std::uint64_t base_seed) {
    if (rack_size == 0 || rack_size > n_nodes) {
        throw std::invalid_argument("rack_failure_probe: bad rack size");
    }
    // Exact hypergeometric for a random c-sample landing entirely in the
    // failed rack; (R/N)^c is its upper bound.
    const HypergeometricAvailability hg = availability_hypergeometric(n_nodes, rack_size, c);

    std::vector<double> per_ring;
    per_ring.reserve(n_seeds);
    std::vector<std::uint32_t> buf;
    for (std::uint32_t s = 0; s < n_seeds; ++s) {
        const Ring ring =
            build_ring(n_nodes, 1, HashSeed{derive_seed(base_seed, kRingTag, 0x2000 + s)});
        SplitMix keygen(derive_seed(base_seed, kKeyTag, 0x2000 + s));
        std::uint64_t hits = 0;
        for (std::uint32_t k = 0; k < n_keys; ++k) {
            const std::size_t succ = ring_lower_bound(ring, hash_pos(keygen.next(), ring.seed));
            const std::size_t d = window_distinct(ring, succ, c, buf);
            bool inside = true;
            for (std::size_t j = 0; j < d; ++j) {
                if (buf[j] >= rack_size) {  // rack 0 = nodes [0, rack_size)
                    inside = false;
                    break;
                }
            }
            hits += inside ? 1 : 0;
        }
        per_ring.push_back(static_cast<double>(hits) / static_cast<double>(n_keys));
    }

    double mean = 0.0;
    for (double f : per_ring) {
        mean += f;
    }
    mean /= static_cast<double>(per_ring.size());
    double var = 0.0;
    for (double f : per_ring) {
        var += (f - mean) * (f - mean);
    }
    const double sigma = std::sqrt(var / (static_cast<double>(per_ring.size()) - 1.0)) /
                         std::sqrt(static_cast<double>(per_ring.size()));

    CheckResult r;
    r.name = "rack_failure_probe";
    r.predicted = hg.exact;
    r.measured = mean;
    r.sigma = sigma;
    r.pass = std::abs(mean - hg.exact) <= 3.0 * sigma && hg.exact <= hg.bound + 1e-15;
    return r;
}

KeyVariancePair key_variance_probe(std::uint32_t n_nodes, std::uint32_t vnodes, std::uint32_t c,
                                   std::uint32_t n_keys, std::uint32_t n_trials,
                                   std::uint64_t base_seed) {
    if (n_keys < 10ULL * n_nodes) {
        throw std::invalid_argument("key_variance_probe: needs n_keys >= 10 * n_nodes");
    }
    const double k = static_cast<double>(n_keys);
    const double n = static_cast<double>(n_nodes);

    auto count_loads = [&](const Ring& ring, std::uint64_t key_seed,
                           std::vector<std::uint64_t>& loads) {
        loads.assign(n_nodes, 0);
        SplitMix keygen(key_seed);
        for (std::uint32_t i = 0; i < n_keys; ++i) {
            loads[lookup(ring, keygen.next(), c, ring.seed).node]++;
        }
    };

    KeyVariancePair out;

    // Sampling term on a fixed ring: repeated key draws.
    const Ring fixed = build_ring(n_nodes, vnodes, HashSeed{derive_seed(base_seed, kRingTag, 3)});
    const FluidLoads fl = fluid_loads(fixed, c);
    double pred_sampling = 0.0;
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        pred_sampling += k * fl.loads[i] * (1.0 - fl.loads[i]);
    }
    out.sampling_term = pred_sampling / n;

    std::vector<std::vector<std::uint64_t>> batches(n_trials);
    for (std::uint32_t t = 0; t < n_trials; ++t) {
        count_loads(fixed, derive_seed(base_seed, kKeyTag, 0x3000 + t), batches[t]);
    }
    double meas_sampling = 0.0;
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        double mean = 0.0;
        for (const auto& b : batches) {
            mean += static_cast<double>(b[i]);
        }
        mean /= static_cast<double>(n_trials);
        double var = 0.0;
        for (const auto& b : batches) {
            const double d = static_cast<double>(b[i]) - mean;
            var += d * d;
        }
        meas_sampling += var / (static_cast<double>(n_trials) - 1.0);
    }
    out.measured_sampling = meas_sampling / n;

    // Structural term: fluid-load variance across ring redraws.
    double struct_ss = 0.0;
    for (std::uint32_t t = 0; t < n_trials; ++t) {
        const Ring ring =
            build_ring(n_nodes, vnodes, HashSeed{derive_seed(base_seed, kRingTag, 0x4000 + t)});
        const FluidLoads f = fluid_loads(ring, c);
        for (double l : f.loads) {
            const double d = l - 1.0 / n;
            struct_ss += d * d;
        }
    }
    out.structural_term = k * k * struct_ss / (n * static_cast<double>(n_trials));

    // Total variance on joint (ring, keys) draws.
    double total_ss = 0.0;
    std::vector<std::uint64_t> loads;
    for (std::uint32_t t = 0; t < n_trials; ++t) {
        const Ring ring =
            build_ring(n_nodes, vnodes, HashSeed{derive_seed(base_seed, kRingTag, 0x5000 + t)});
        count_loads(ring, derive_seed(base_seed, kKeyTag, 0x5000 + t), loads);
        for (std::uint64_t l : loads) {
            const double d = static_cast<double>(l) - k / n;
            total_ss += d * d;
        }
    }
    out.measured_total = total_ss / (n * static_cast<double>(n_trials));
    return out;
}

std::vector<CheckResult> run_battery(std::uint64_t base_seed) {
    std::vector<CheckResult> results;

    {
        const std::uint32_t cs[] = {2, 8};
        const auto rows = smoothing_scaling_probe(200, 32, cs, 10, base_seed);
        CheckResult r;
        r.name = "sd_ratio_c8_over_c2";
        r.predicted = 0.5;
        r.measured = rows[1].measured_sd / rows[0].measured_sd;
        r.sigma = 0.25 * r.predicted / 3.0;  // 25% band expressed as 3 sigma
        r.pass = std::abs(r.measured - r.predicted) <= 0.25 * r.predicted;
        results.push_back(r);
    }
    {
        const VarianceDecomposition vd = variance_decomposition_probe(400, 16, 4, 12, base_seed);
        CheckResult r;
        r.name = "compound_over_structural_ratio";
        r.predicted = 10.0 * 16.0 / 400.0;  // bound 10 c^2 / N
        r.measured = vd.ratio;
        r.sigma = 0.0;
        r.pass = vd.ratio <= r.predicted;
        results.push_back(r);
    }
    results.push_back(availability_independent_mc(0.3, 4, 200, 32, 10000, 100, base_seed));
    {
        const HypergeometricAvailability hg = availability_hypergeometric(5, 2, 2);
        CheckResult r;
        r.name = "hypergeometric_5_2_2";
        r.predicted = 0.1;
        r.measured = hg.exact;
        r.sigma = 0.0;
        r.pass = std::abs(hg.exact - 0.1) < 1e-12 && hg.exact <= hg.bound;
        results.push_back(r);
    }
    results.push_back(expected_fallback_blocks_mc(0.4, 3, 200, 2000, 60, base_seed));
    results.push_back(rack_failure_probe(200, 40, 2, 60, 4000, base_seed));
    {
        const KeyVariancePair kv = key_variance_probe(100, 16, 4, 100000, 12, base_seed);
        CheckResult r;
        r.name = "key_variance_decomposition";
        r.predicted = kv.sampling_term + kv.structural_term;
        r.measured = kv.measured_total;
        // Relative 3 sigma of a variance estimate over ~n_trials*N samples.
        r.sigma = r.predicted * std::sqrt(2.0 / (12.0 * 100.0 - 1.0));
        r.pass = std::abs(r.measured - r.predicted) <= 0.25 * r.predicted;
        results.push_back(r);
    }
    return results;
}

void write_csv(std::span<const CheckResult> results, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open " + path.string());
    }
    out << "check_name,predicted,measured,sigma,pass\n";
    out.precision(12);
    for (const CheckResult& r : results) {
        out << r.name << ',' << r.predicted << ',' << r.measured << ',' << r.sigma << ','
            << (r.pass ? "true" : "false") << '\n';
    }
}

}  // namespace lrh::analysis
