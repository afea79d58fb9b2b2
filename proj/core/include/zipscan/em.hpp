#pragma once

#include <functional>
#include <optional>
#include <span>

#include "zipscan/likelihood.hpp"
#include "zipscan/region_map.hpp"

namespace zipscan {

/// EM controls. Convergence is measured on the structural-zero posteriors
/// (sup norm of successive delta vectors), not on the log likelihood.
struct EmConfig {
    double tol = 1e-8;
    int max_iter = 500;
    /// Starting value for p. Unset: fraction of zero-count regions, clamped
    /// to [1e-6, 1-1e-6] to keep the absorbing endpoints out of play.
    std::optional<double> init_p;
};

struct EmResult {
    ZipFit fit;
    int iterations = 0;
    bool converged = false;
};

/// Called after every M step with the current posteriors and parameters.
/// thetaZ is absent for null-model fits.
using EmObserver = std::function<void(int iteration, std::span<const double> delta, double p,
                                      double theta0, std::optional<double> thetaZ)>;

/// One E step: posterior probability that each region is a structural zero,
///
///   delta_i = p / (p + (1-p) e^{-n_i theta_i})  when x_i = 0,
///   delta_i = 0                                 when x_i > 0,
///
/// with theta_i = thetaZ inside the zone, theta0 outside (zone = nullptr
/// evaluates the null model, where thetaZ is ignored).
std::vector<double> e_step(const RegionMap& map, const CaseData& data, const Zone* zone,
                           double p, double theta0, double thetaZ = 0.0);

/// Alternates the E step with the closed-form M step until the posteriors
/// settle. Known indicators in `data` are ignored: this estimates latent
/// structural zeros from counts alone. Requires at least one positive count
/// (throws DegenerateDataError otherwise). Non-convergence within max_iter
/// returns the last iterate with converged = false.
EmResult em_fit(const RegionMap& map, const CaseData& data, const Zone* zone,
                const EmConfig& config = {}, const EmObserver& observer = nullptr);

}  // namespace zipscan
