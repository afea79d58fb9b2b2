#include "zipscan/inference.hpp"

#include <algorithm>
#include <cmath>

#include "zipscan/em.hpp"
#include "zipscan/errors.hpp"
#include "zipscan/parallel.hpp"
#include "zipscan/rng.hpp"

namespace zipscan {

CaseData generate_null_replica(const RegionMap& map, double p_hat, double theta0_hat,
                               long long total_cases, std::mt19937_64& eng) {
    if (!(p_hat >= 0.0) || p_hat >= 1.0) {
        throw DataError("generate_null_replica: p_hat must lie in [0, 1)");
    }
    if (theta0_hat < 0.0) throw DataError("generate_null_replica: negative rate");
    if (total_cases < 0) throw DataError("generate_null_replica: negative case total");

    const int k = map.size();
    std::vector<std::uint8_t> d(static_cast<std::size_t>(k), 0);
    std::vector<double> weights(static_cast<std::size_t>(k), 0.0);

    constexpr int kMaxRetries = 1000;
    bool any_open = false;
    for (int attempt = 0; attempt < kMaxRetries && !any_open; ++attempt) {
        std::bernoulli_distribution is_zero(p_hat);
        for (int i = 0; i < k; ++i) {
            const bool z = p_hat > 0.0 && is_zero(eng);
            d[static_cast<std::size_t>(i)] = z ? 1 : 0;
            weights[static_cast<std::size_t>(i)] = z ? 0.0 : map.region(i).population;
            any_open = any_open || (!z && map.region(i).population > 0.0);
        }
    }
    if (!any_open) {
        throw DegenerateDataError(
            "generate_null_replica: every region drew as a structural zero; retries exhausted");
    }

    CaseData replica;
    replica.counts = rng::multinomial(eng, total_cases, weights);
    replica.structural_zero = std::move(d);
    return replica;
}

double mc_p_value(std::span<const double> replica_log_lambdas, double log_lambda_obs) {
    long long at_least = 0;
    for (double v : replica_log_lambdas) {
        if (v >= log_lambda_obs) ++at_least;
    }
    return static_cast<double>(1 + at_least) /
           static_cast<double>(replica_log_lambdas.size() + 1);
}

double mc_critical_value(std::span<const double> replica_log_lambdas, double alpha) {
    const std::size_t b = replica_log_lambdas.size();
    if (b == 0) throw DataError("mc_critical_value: no replicas");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw DataError("mc_critical_value: alpha out of (0,1)");
    // ceil((1-alpha) B)-th ascending order statistic.
    std::size_t rank = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(b)));
    rank = std::clamp<std::size_t>(rank, 1, b);
    std::vector<double> sorted(replica_log_lambdas.begin(), replica_log_lambdas.end());
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    return sorted[rank - 1];
}

ScanOutcome significance(const ZoneFamily& family, const CaseData& data, Method method,
                         const NullReplicaConfig& config, const ScanConfig& scan_config) {
    if (config.replicas < 19) throw DataError("significance: at least 19 replicas required");
    if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
        throw DataError("significance: alpha out of (0,1)");
    }
    const RegionMap& map = family.map();
    validate_case_data(map, data);

    ScanOutcome observed = scan(method, family, data, scan_config);

    // Null-model estimates the replicas are generated from.
    double p_hat = 0.0, theta0_hat = 0.0;
    switch (method) {
        case Method::poisson: {
            const NullMle mle = zip_mle_null(map, data, {});
            p_hat = 0.0;
            theta0_hat = mle.theta0_hat;
            break;
        }
        case Method::zip: {
            if (!data.structural_zero) {
                throw DataError("significance: zip method requires structural-zero indicators");
            }
            const std::vector<double> delta = delta_from_indicators(data);
            const NullMle mle = zip_mle_null(map, data, delta);
            p_hat = mle.p_hat;
            theta0_hat = mle.theta0_hat;
            break;
        }
        case Method::zip_em: {
            const EmResult null_fit = em_fit(map, data, nullptr, scan_config.em);
            p_hat = null_fit.fit.p_hat;
            theta0_hat = null_fit.fit.theta0_hat;
            break;
        }
    }

    long long total_cases = data.total_cases();
    if (config.total_cases_rule == TotalCasesRule::population_total) {
        total_cases = std::llround(map.total_population());
    }

    const int b_count = config.replicas;
    ReplicaSummary summary;
    summary.log_lambdas.assign(static_cast<std::size_t>(b_count), 0.0);
    summary.structural_zero_counts.assign(static_cast<std::size_t>(b_count), 0);

    parallel_for(static_cast<std::size_t>(b_count), config.workers, [&](std::size_t b) {
        std::mt19937_64 eng =
            rng::make_engine(config.seed, rng::Stream::null_replica, static_cast<std::uint64_t>(b) + 1);
        try {
            CaseData replica = generate_null_replica(map, p_hat, theta0_hat, total_cases, eng);
            int zeros = 0;
            for (std::uint8_t z : *replica.structural_zero) zeros += z;
            if (method != Method::zip) replica.structural_zero.reset();  // hidden from the detector
            const ScanOutcome rep = scan(method, family, replica, scan_config);
            summary.log_lambdas[b] = rep.log_lambda;
            summary.structural_zero_counts[b] = zeros;
        } catch (const std::exception& e) {
            throw DataError("significance: replica " + std::to_string(b + 1) + " (seed " +
                            std::to_string(config.seed) + ") failed: " + e.what());
        }
    });

    summary.log_lambda_star = mc_critical_value(summary.log_lambdas, config.alpha);
    observed.p_value = mc_p_value(summary.log_lambdas, observed.log_lambda);
    observed.rejected = observed.log_lambda > summary.log_lambda_star;
    observed.replicas = std::move(summary);
    return observed;
}

}  // namespace zipscan
