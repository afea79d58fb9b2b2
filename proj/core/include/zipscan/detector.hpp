#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zipscan/em.hpp"
#include "zipscan/likelihood.hpp"
#include "zipscan/zones.hpp"

namespace zipscan {

enum class Method { poisson, zip, zip_em };

std::string to_string(Method method);
/// Accepts "poisson", "zip", "zip-em" (also "zip_em"). Throws DataError.
Method method_from_string(const std::string& name);

/// How the null-model term of the EM variant is evaluated: with the per-zone
/// converged posteriors substituted into the null estimator (default), or
/// with posteriors from a separate null-model EM fit.
enum class NullModelMode { per_zone_delta, separate_null_em };

struct ScanConfig {
    EmConfig em;
    NullModelMode null_mode = NullModelMode::per_zone_delta;
};

struct EmDiagnostics {
    int zones_fitted = 0;
    int zones_nonconverged = 0;
    long long total_iterations = 0;
};

/// Null-distribution replicas of a Monte Carlo run, by replica index.
struct ReplicaSummary {
    std::vector<double> log_lambdas;
    std::vector<int> structural_zero_counts;
    double log_lambda_star = 0.0;  // critical value at the configured alpha
};

/// Result of one scan: the most likely cluster and its statistic, plus the
/// Monte Carlo fields when significance testing was requested.
struct ScanOutcome {
    Method method = Method::poisson;
    Zone best_zone;
    double log_lambda = 0.0;
    ZipFit fit;  // estimates for the winning zone (delta empty for poisson)
    EmDiagnostics em;

    std::optional<double> p_value;
    std::optional<bool> rejected;
    std::optional<ReplicaSummary> replicas;

    double lambda() const { return std::exp(log_lambda); }
};

/// Circular-scan statistic for Poisson counts: the zone maximizing the
/// likelihood ratio. Ties are broken toward fewer members, then the lower
/// center index. Requires a positive case total.
ScanOutcome scan_poisson(const ZoneFamily& family, const CaseData& data);

/// Scan with known structural zeros: the likelihood uses the adjusted sums
/// x_i(1-d_i), n_i(1-d_i), so flagged regions contribute neither cases nor
/// population. Requires indicators and a positive adjusted case total.
ScanOutcome scan_zip(const ZoneFamily& family, const CaseData& data);

/// Scan with latent structural zeros: fits the EM posteriors per candidate
/// zone and evaluates the adjusted ratio with them. Zones whose EM does not
/// converge are scored at the last iterate and counted in diagnostics.
ScanOutcome scan_zip_em(const ZoneFamily& family, const CaseData& data,
                        const ScanConfig& config = {});

/// Dispatch by method.
ScanOutcome scan(Method method, const ZoneFamily& family, const CaseData& data,
                 const ScanConfig& config = {});

}  // namespace zipscan
