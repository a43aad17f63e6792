#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lrh/hashing.hpp"
#include "lrh/ring.hpp"

namespace lrh::analysis {

// Per-node fluid load shares: the fraction of the unit circle each node
// would own with infinitely many uniform keys. Sums to 1.
struct FluidLoads {
    std::vector<double> loads;
};

// Per-node candidate-coverage counts d_n = |{gaps i : n in S_i}| under the
// idealized walk-until-C-distinct enumeration (sums to m*C).
struct CoverageCounts {
    std::vector<std::uint64_t> counts;
};

/// Exact fluid load shares of the implemented lookup: every key in gap i
/// elects uniformly among the distinct nodes of that gap's c-entry window,
/// so the gap contributes G_i/|D_i| to each member. No sampling.
FluidLoads fluid_loads(const Ring& ring, std::uint32_t c);

/// Idealized fluid shares with each gap spread over exactly c distinct
/// candidates (the model the variance analysis assumes); gap weights may be
/// overridden (e.g. uniform 1/m) via `uniform_gaps`.
FluidLoads fluid_loads_distinct(const Ring& ring, std::uint32_t c, bool uniform_gaps = false);

CoverageCounts coverage_counts(const Ring& ring, std::uint32_t c);

// One validation row: a predicted quantity, its measurement, the sampling
// sigma used for the acceptance band, and the verdict.
struct CheckResult {
    std::string name;
    double predicted = 0.0;
    double measured = 0.0;
    double sigma = 0.0;
    bool pass = false;
};

struct ScalingRow {
    std::uint32_t c = 0;
    double measured_sd = 0.0;
    double predicted_sd = 0.0;  // 1 / (N * sqrt(V*C))
};

/// Mean (over seeds) per-node standard deviation of fluid loads for each c,
/// against the 1/(N*sqrt(VC)) prediction.
std::vector<ScalingRow> smoothing_scaling_probe(std::uint32_t n_nodes, std::uint32_t vnodes,
                                                std::span<const std::uint32_t> c_list,
                                                std::uint32_t n_seeds, std::uint64_t base_seed);

struct VarianceDecomposition {
    double structural_term = 0.0;  // E[Var(L_n | d_n)]
    double compound_term = 0.0;    // Var(E[L_n | d_n]) = Var(d_n) / (C m)^2
    double ratio = 0.0;            // compound / structural
    double mean_d = 0.0;
    double var_d = 0.0;
};

/// Estimates both variance terms across random rings; ratio should be
/// O(c^2 / n_nodes) in the c^2 << N regime.
VarianceDecomposition variance_decomposition_probe(std::uint32_t n_nodes, std::uint32_t vnodes,
                                                   std::uint32_t c, std::uint32_t n_seeds,
                                                   std::uint64_t base_seed);

/// All-candidates-down probability under independent failures: p^c.
/// Throws std::domain_error unless 0 <= p < 1.
double availability_independent(double p, std::uint32_t c);

/// Monte Carlo companion for availability_independent: measures the
/// all-candidates-dead frequency over keys whose window holds c distinct
/// nodes (the theorem's hypothesis), across `n_masks` random masks.
CheckResult availability_independent_mc(double p, std::uint32_t c, std::uint32_t n_nodes,
                                        std::uint32_t vnodes, std::uint32_t n_keys,
                                        std::uint32_t n_masks, std::uint64_t base_seed);

struct HypergeometricAvailability {
    double exact = 0.0;  // prod_{j<c} (f-j)/(n-j); 0 when f < c
    double bound = 0.0;  // (f/n)^c
};

HypergeometricAvailability availability_hypergeometric(std::uint32_t n_nodes,
                                                       std::uint32_t f_failed, std::uint32_t c);

struct FallbackExpectation {
    double blocks = 0.0;      // 1 / (1 - p^c)
    double candidates = 0.0;  // c / (1 - p^c)
};

/// Expected extension cost under independent failures; throws
/// std::domain_error when p^c == 1.
FallbackExpectation expected_fallback_blocks(double p, std::uint32_t c);

/// Simulated mean block count of the extension walk on V=1 rings (every
/// block holds exactly c fresh distinct nodes there) vs 1/(1-p^c).
CheckResult expected_fallback_blocks_mc(double p, std::uint32_t c, std::uint32_t n_nodes,
                                        std::uint32_t n_keys, std::uint32_t n_masks,
                                        std::uint64_t base_seed);

/// Fails one whole rack on random V=1 rings and measures the per-key
/// frequency of the whole window landing in the failed rack. The point
/// prediction is the exact hypergeometric prod_{j<c}(R-j)/(N-j); (R/N)^c is
/// its upper bound.
CheckResult rack_failure_probe(std::uint32_t n_nodes, std::uint32_t rack_size, std::uint32_t c,
                               std::uint32_t n_seeds, std::uint32_t n_keys,
                               std::uint64_t base_seed);

struct KeyVariancePair {
    double sampling_term = 0.0;    // K * E[L_n (1 - L_n)]
    double structural_term = 0.0;  // K^2 * Var(L_n)
    double measured_sampling = 0.0;
    double measured_total = 0.0;
};

/// Two-term decomposition of discrete per-node key-count variance: repeated
/// key draws on a fixed ring estimate the sampling term; ring redraws give
/// the structural term; the total on joint draws should match the sum.
KeyVariancePair key_variance_probe(std::uint32_t n_nodes, std::uint32_t vnodes, std::uint32_t c,
                                   std::uint32_t n_keys, std::uint32_t n_trials,
                                   std::uint64_t base_seed);

/// Runs the standard validation battery at desk scale and returns one row
/// per check (CSV columns: check_name, predicted, measured, sigma, pass).
std::vector<CheckResult> run_battery(std::uint64_t base_seed);

void write_csv(std::span<const CheckResult> results, const std::filesystem::path& path);

}  // namespace lrh::analysis
