#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "zipscan/detector.hpp"
#include "zipscan/region_map.hpp"
#include "zipscan/zones.hpp"

namespace zipscan {

/// Total count handed to the null multinomial. observed_cases conditions on
/// the observed case total; population_total distributes round(sum n_i)
/// events instead, reproducing the bootstrap description literally.
enum class TotalCasesRule { observed_cases, population_total };

struct NullReplicaConfig {
    int replicas = 999;  // B
    std::uint64_t seed = 0;
    double alpha = 0.05;
    TotalCasesRule total_cases_rule = TotalCasesRule::observed_cases;
    int workers = 0;  // 0 -> default_workers()
};

/// One parametric-bootstrap replica: every region is independently marked a
/// structural zero with probability p_hat, then total_cases are distributed
/// multinomially over the unmarked regions with probabilities proportional
/// to population (theta0_hat cancels in the normalization and is accepted
/// only for interface completeness). The generated indicator vector is
/// retained in the result. An all-structural-zero assignment is redrawn, up
/// to a bounded number of retries.
CaseData generate_null_replica(const RegionMap& map, double p_hat, double theta0_hat,
                               long long total_cases, std::mt19937_64& eng);

/// Monte Carlo rank p-value (1 + #{b : lambda_b >= lambda_obs}) / (B + 1),
/// computed on log-scale values.
double mc_p_value(std::span<const double> replica_log_lambdas, double log_lambda_obs);

/// Critical value at level alpha: the ceil((1-alpha) B)-th ascending order
/// statistic of the replica values.
double mc_critical_value(std::span<const double> replica_log_lambdas, double alpha);

/// Full significance test: scans the observed data, estimates (p, theta0)
/// under the method's model (p = 0 for poisson, the known indicators for
/// zip, a null-model EM fit for zip-em), generates B null replicas scored by
/// the same detector -- zip sees each replica's own indicators, zip-em does
/// not -- and fills p_value, rejected and the replica summary.
ScanOutcome significance(const ZoneFamily& family, const CaseData& data, Method method,
                         const NullReplicaConfig& config, const ScanConfig& scan_config = {});

}  // namespace zipscan
