#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "zipscan/detector.hpp"
#include "zipscan/inference.hpp"
#include "zipscan/region_map.hpp"
#include "zipscan/zones.hpp"

namespace zipscan {

/// Benchmark study area: 203 hexagonal cells in a regular grid, population
/// 1000 each (203,000 total). Centroids are jittered by seeded uniform noise
/// of at most jitter_fraction of the lattice pitch so that no two inter-cell
/// distances tie exactly.
RegionMap build_hex_map(std::uint64_t seed, double jitter_fraction = 0.05);

/// A simulation design: where the elevated-risk cluster sits, which regions
/// are structural zeros, per-region relative risks, and the case total.
struct Scenario {
    std::string name;
    std::vector<int> true_cluster;
    std::vector<int> structural_zeros;
    std::vector<double> relative_risks;  // one per region
    long long total_cases = 0;
    double target_power = 0.999;
};

/// Throws DataError if indices are out of range or duplicated, or the risk
/// vector is misaligned / nonpositive.
void validate_scenario(const RegionMap& map, const Scenario& scenario);

/// Smallest relative risk r for the cluster such that, conditional on the
/// case total M, an exact one-sided binomial test at level 0.05 of
/// H0: pi = n_C/n rejects with probability >= target_power when the true
/// in-cluster probability is pi(r) = r n_C / (r n_C + (n - n_C)). Found by
/// bisection on exact binomial tail sums. Throws DegenerateDataError when no
/// r <= 1e6 reaches the target.
double calibrate_risks(const RegionMap& map, const std::vector<int>& true_cluster,
                       long long total_cases, double target_power = 0.999);

/// Risk vector: r inside the cluster, 1 outside.
std::vector<double> risk_vector(const RegionMap& map, const std::vector<int>& cluster, double r);

/// Draws one data set: total_cases distributed multinomially over the
/// non-structural-zero regions with probabilities proportional to
/// population x risk (identical in law to rejection-resampling cases that
/// land on structural zeros). Structural-zero regions always receive count 0
/// and the indicator vector is set from the scenario.
CaseData draw_cases(const RegionMap& map, const Scenario& scenario, std::mt19937_64& eng);

/// Population-weighted overlap of a detected zone with the true cluster:
/// sensitivity = Pop(detected ∩ true) / Pop(true),
/// ppv         = Pop(detected ∩ true) / Pop(detected).
struct Overlap {
    double sensitivity = 0.0;
    double ppv = 0.0;
};
Overlap sensitivity_ppv(const Zone& detected, const std::vector<int>& true_cluster,
                        const RegionMap& map);

struct StudySettings {
    int studies = 1000;   // N
    int replicas = 999;   // B, per-method critical value
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int workers = 0;
    EmConfig em;
    NullModelMode null_mode = NullModelMode::per_zone_delta;
};

struct MethodMetrics {
    Method method = Method::poisson;
    double power = 0.0;
    double mean_sensitivity = 0.0;
    double mean_ppv = 0.0;
    double log_lambda_star = 0.0;
};

struct StudyReport {
    std::string scenario;
    int studies = 0;
    int replicas = 0;
    std::uint64_t seed = 0;
    std::vector<MethodMetrics> methods;
};

/// Power / sensitivity / PPV experiment. The critical value is computed once
/// per method from `replicas` null replicas (structural zeros drawn with
/// probability |scenario zeros| / k for the zip methods, none for poisson),
/// then `studies` alternative data sets are drawn and scored. The draw stream
/// of study i depends only on (seed, i), so every method sees identical case
/// placements; replica streams are likewise shared across methods.
StudyReport power_study(const ZoneFamily& family, const Scenario& scenario,
                        const std::vector<Method>& methods, const StudySettings& settings);

/// Type I error experiment: `studies` null data sets, each with
/// `structural_zero_regions` distinct zero regions drawn uniformly and
/// `total_cases` distributed over the rest, scored against each method's own
/// critical value. Returns the rejection proportion per method.
struct TypeIResult {
    Method method = Method::poisson;
    double rejection_proportion = 0.0;
    double log_lambda_star = 0.0;
};
std::vector<TypeIResult> type_i_study(const ZoneFamily& family, const std::vector<Method>& methods,
                                      const StudySettings& settings,
                                      int structural_zero_regions = 15, long long total_cases = 507);

}  // namespace zipscan
