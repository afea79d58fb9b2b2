#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "zipscan/region_map.hpp"

namespace zipscan {

/// Sufficient statistics of a zone split. With structural-zero weights d in
/// [0,1], "adjusted" means sums of x_i(1-d_i) and n_i(1-d_i); the plain
/// Poisson case is d = 0 everywhere.
struct ZoneAggregates {
    double cases_in = 0.0;
    double pop_in = 0.0;
    double cases_out = 0.0;
    double pop_out = 0.0;

    double cases_total() const { return cases_in + cases_out; }
    double pop_total() const { return pop_in + pop_out; }
};

/// Adjusted aggregates for a zone. `delta` is a per-region weight in [0,1]
/// (empty means all zeros). Throws DataError on misaligned inputs.
ZoneAggregates aggregate_zone(const RegionMap& map, const CaseData& data,
                              std::span<const double> delta, const Zone& zone);

/// Log likelihood ratio of the circular-scan test for one zone split:
///
///   log lambda = x_in log(x_in/n_in) + x_out log(x_out/n_out)
///                - x log(x/n)          when x_in/n_in > x_out/n_out,
///   log lambda = 0                     otherwise,
///
/// with the 0 log 0 = 0 convention. Always >= 0. Throws DataError when the
/// population inside or outside is zero (the ratio is undefined).
double poisson_log_lr(const ZoneAggregates& agg);

/// Natural-scale lambda >= 1; prefer the log form for comparisons.
inline double poisson_lr(const ZoneAggregates& agg) { return std::exp(poisson_log_lr(agg)); }

/// Null-model estimates for the zero-inflated Poisson complete-data model.
struct NullMle {
    double theta0_hat = 0.0;
    double p_hat = 0.0;
};

/// Alternative-model estimates for a fixed zone.
struct AltMle {
    double thetaZ_hat = 0.0;
    double theta0_hat = 0.0;
    double p_hat = 0.0;
};

/// Closed-form null MLEs: theta0 = sum x_i(1-d_i) / sum n_i(1-d_i),
/// p = sum d_i / k. Fractional delta (EM posteriors) is accepted. Throws
/// DegenerateDataError when the adjusted population vanishes.
NullMle zip_mle_null(const RegionMap& map, const CaseData& data, std::span<const double> delta);

/// Closed-form alternative MLEs: in-zone and out-of-zone adjusted rates plus
/// p = sum d_i / k. Throws DegenerateDataError when the adjusted population
/// on either side vanishes while that side has cases.
AltMle zip_mle_alt(const RegionMap& map, const CaseData& data, std::span<const double> delta,
                   const Zone& zone);

/// Likelihood ratio for one zone under the complete-data ZIP model with the
/// given structural-zero weights. Equals poisson_log_lr on the adjusted
/// aggregates (the p terms cancel between numerator and denominator), so a
/// zero delta reproduces the plain circular-scan statistic exactly.
double zip_log_lr(const RegionMap& map, const CaseData& data, std::span<const double> delta,
                  const Zone& zone);

inline double zip_lr(const RegionMap& map, const CaseData& data, std::span<const double> delta,
                     const Zone& zone) {
    return std::exp(zip_log_lr(map, data, delta, zone));
}

/// Parameter estimates for a zone (or the null model when thetaZ_hat is
/// absent) together with the structural-zero posteriors.
struct ZipFit {
    double p_hat = 0.0;
    double theta0_hat = 0.0;
    std::optional<double> thetaZ_hat;
    std::vector<double> delta_hat;
};

/// Observed-data (incomplete) log likelihood of the mixture model,
///
///   sum_{x_i=0} log[p + (1-p) e^{-n_i theta_i}]
///   + sum_{x_i>0} [log(1-p) - n_i theta_i + x_i log(n_i theta_i)],
///
/// where theta_i is thetaZ inside the zone and theta0 outside (pass
/// zone = nullptr for the null model; thetaZ is then ignored). Returns
/// -infinity when a positive count meets a zero rate. Used as the EM
/// ascent diagnostic; never maximized directly.
double incomplete_loglik(const RegionMap& map, const CaseData& data, const Zone* zone,
                         double p, double theta0, double thetaZ = 0.0);

}  // namespace zipscan
