#include "zipscan/detector.hpp"

#include <algorithm>
#include <cmath>

#include "em_engine.hpp"
#include "zipscan/errors.hpp"

namespace zipscan {

std::string to_string(Method method) {
    switch (method) {
        case Method::poisson: return "poisson";
        case Method::zip: return "zip";
        case Method::zip_em: return "zip-em";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "poisson") return Method::poisson;
    if (name == "zip") return Method::zip;
    if (name == "zip-em" || name == "zip_em") return Method::zip_em;
    throw DataError("unknown method '" + name + "' (expected poisson, zip or zip-em)");
}

namespace {

inline double xlogratio(double x, double n) { return x > 0.0 ? x * std::log(x / n) : 0.0; }

// Statistic for one adjusted split; 0 when the elevated-rate indicator fails
// or a side carries no adjusted population.
inline double split_log_lr(double cases_in, double pop_in, double cases_out, double pop_out) {
    if (!(pop_in > 0.0) || !(pop_out > 0.0)) return 0.0;
    if (!(cases_in * pop_out > cases_out * pop_in)) return 0.0;
    const double v = xlogratio(cases_in, pop_in) + xlogratio(cases_out, pop_out) -
                     xlogratio(cases_in + cases_out, pop_in + pop_out);
    return v > 0.0 ? v : 0.0;
}

// Maximum with deterministic tie-breaking: fewer members, then lower center.
struct BestTracker {
    double log_lr = -1.0;
    int center = -1;
    int len = 0;

    void offer(double score, int c, int l) {
        if (score > log_lr ||
            (score == log_lr && (l < len || (l == len && c < center)))) {
            log_lr = score;
            center = c;
            len = l;
        }
    }
};

Zone zone_from_prefix(const ZoneFamily& family, const CaseData& data, int center, int len) {
    const auto& order = family.neighbor_order(center);
    Zone zone;
    zone.center = center;
    zone.members.assign(order.begin(), order.begin() + len);
    for (int idx : zone.members) {
        zone.pop_inside += family.map().region(idx).population;
        zone.cases_inside += data.counts[static_cast<std::size_t>(idx)];
    }
    return zone;
}

// Shared walk for the poisson (delta empty) and known-indicator cases.
ScanOutcome scan_adjusted(const ZoneFamily& family, const CaseData& data,
                          std::span<const double> delta, Method method) {
    const RegionMap& map = family.map();
    const int k = map.size();

    double cases_total = 0.0, pop_total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double w = delta.empty() ? 1.0 : 1.0 - delta[static_cast<std::size_t>(i)];
        cases_total += static_cast<double>(data.counts[static_cast<std::size_t>(i)]) * w;
        pop_total += map.region(i).population * w;
    }
    if (!(cases_total > 0.0)) {
        throw DegenerateDataError("scan: adjusted case total is zero");
    }

    BestTracker best;
    best.offer(0.0, 0, 1);  // lambda = 1 baseline: the first tie-break zone
    for (int center = 0; center < k; ++center) {
        const auto& order = family.neighbor_order(center);
        const int plen = family.prefix_count(center);
        double cases_in = 0.0, pop_in = 0.0;
        for (int j = 0; j < plen; ++j) {
            const int idx = order[static_cast<std::size_t>(j)];
            const double w = delta.empty() ? 1.0 : 1.0 - delta[static_cast<std::size_t>(idx)];
            cases_in += static_cast<double>(data.counts[static_cast<std::size_t>(idx)]) * w;
            pop_in += map.region(idx).population * w;
            if (!family.is_canonical(center, j + 1)) continue;
            best.offer(split_log_lr(cases_in, pop_in, cases_total - cases_in, pop_total - pop_in),
                       center, j + 1);
        }
    }

    ScanOutcome out;
    out.method = method;
    out.best_zone = zone_from_prefix(family, data, best.center, best.len);
    out.log_lambda = best.log_lr;
    try {
        const AltMle mle = zip_mle_alt(map, data, delta, out.best_zone);
        out.fit.p_hat = mle.p_hat;
        out.fit.theta0_hat = mle.theta0_hat;
        out.fit.thetaZ_hat = mle.thetaZ_hat;
    } catch (const DegenerateDataError&) {
        // zone with no adjusted mass on one side; leave default estimates
    }
    if (!delta.empty()) out.fit.delta_hat.assign(delta.begin(), delta.end());
    return out;
}

}  // namespace

ScanOutcome scan_poisson(const ZoneFamily& family, const CaseData& data) {
    validate_case_data(family.map(), data);
    if (data.total_cases() <= 0) throw DegenerateDataError("scan_poisson: no cases in the data");
    return scan_adjusted(family, data, {}, Method::poisson);
}

ScanOutcome scan_zip(const ZoneFamily& family, const CaseData& data) {
    validate_case_data(family.map(), data);
    if (!data.structural_zero) {
        throw DataError("scan_zip: structural-zero indicators are required");
    }
    const std::vector<double> delta = delta_from_indicators(data);
    return scan_adjusted(family, data, delta, Method::zip);
}

ScanOutcome scan_zip_em(const ZoneFamily& family, const CaseData& data, const ScanConfig& config) {
    const RegionMap& map = family.map();
    validate_case_data(map, data);
    const long long cases_total_ll = data.total_cases();
    if (cases_total_ll <= 0) throw DegenerateDataError("scan_zip_em: no cases in the data");

    const int k = map.size();
    const detail::ZeroGroups groups = detail::ZeroGroups::build(map, data);
    const int g = groups.group_count();

    double pop_total = 0.0;
    for (int i = 0; i < k; ++i) pop_total += map.region(i).population;
    const double cases_total = static_cast<double>(cases_total_ll);

    // Null term for the separate-null mode: complete-data log likelihood of
    // the null model at its own EM posteriors. The per-zone mode cancels the
    // p factors instead and reduces to the adjusted split statistic.
    double log_l0 = 0.0;
    if (config.null_mode == NullModelMode::separate_null_em) {
        const EmResult null_fit = em_fit(map, data, nullptr, config.em);
        double dsum = 0.0;
        for (int i = 0; i < k; ++i) dsum += null_fit.fit.delta_hat[static_cast<std::size_t>(i)];
        const double p0 = null_fit.fit.p_hat;
        const double theta00 = null_fit.fit.theta0_hat;
        log_l0 = (dsum > 0.0 ? dsum * std::log(p0) : 0.0) +
                 (static_cast<double>(k) - dsum) * std::log1p(-p0) - cases_total +
                 cases_total * std::log(theta00);
    }

    BestTracker best;
    best.offer(0.0, 0, 1);
    EmDiagnostics diag;

    detail::EmSplit split;
    split.has_zone = true;
    split.zeros_in.assign(static_cast<std::size_t>(g), 0);

    for (int center = 0; center < k; ++center) {
        const auto& order = family.neighbor_order(center);
        const int plen = family.prefix_count(center);
        std::fill(split.zeros_in.begin(), split.zeros_in.end(), 0);
        double cases_in = 0.0, pop_in = 0.0;
        for (int j = 0; j < plen; ++j) {
            const int idx = order[static_cast<std::size_t>(j)];
            cases_in += static_cast<double>(data.counts[static_cast<std::size_t>(idx)]);
            pop_in += map.region(idx).population;
            if (data.counts[static_cast<std::size_t>(idx)] == 0) {
                ++split.zeros_in[static_cast<std::size_t>(
                    groups.group_of_region[static_cast<std::size_t>(idx)])];
            }
            if (!family.is_canonical(center, j + 1)) continue;

            split.cases_in = cases_in;
            split.cases_out = cases_total - cases_in;
            split.pop_in = pop_in;
            split.pop_out = pop_total - pop_in;

            const detail::EmState st = detail::run_em(groups, split, k, config.em);
            ++diag.zones_fitted;
            diag.total_iterations += st.iterations;
            if (!st.converged) ++diag.zones_nonconverged;

            // Adjusted populations at the converged posteriors.
            double removed_in = 0.0, removed_out = 0.0, dsum = 0.0;
            for (int v = 0; v < g; ++v) {
                const std::size_t u = static_cast<std::size_t>(v);
                const double zin = static_cast<double>(split.zeros_in[u]);
                const double zout = static_cast<double>(groups.group_size[u]) - zin;
                removed_in += groups.group_pop[u] * zin * st.delta_in[u];
                removed_out += groups.group_pop[u] * zout * st.delta_out[u];
                dsum += zin * st.delta_in[u] + zout * st.delta_out[u];
            }
            const double pop_in_adj = pop_in - removed_in;
            const double pop_out_adj = split.pop_out - removed_out;

            double score;
            if (config.null_mode == NullModelMode::per_zone_delta) {
                score = split_log_lr(cases_in, pop_in_adj, split.cases_out, pop_out_adj);
            } else {
                if (!(pop_in_adj > 0.0) || !(pop_out_adj > 0.0) ||
                    !(cases_in * pop_out_adj > split.cases_out * pop_in_adj)) {
                    score = 0.0;  // indicator fails: this zone contributes lambda = 1
                } else {
                    const double pa = st.p;
                    const double log_la =
                        (dsum > 0.0 ? dsum * std::log(pa) : 0.0) +
                        (static_cast<double>(k) - dsum) * std::log1p(-pa) - cases_total +
                        xlogratio(cases_in, pop_in_adj) + xlogratio(split.cases_out, pop_out_adj);
                    score = log_la - log_l0;
                }
            }
            best.offer(score, center, j + 1);
        }
    }

    ScanOutcome out;
    out.method = Method::zip_em;
    out.best_zone = zone_from_prefix(family, data, best.center, best.len);
    out.log_lambda = best.log_lr;
    out.em = diag;

    const EmResult winner = em_fit(map, data, &out.best_zone, config.em);
    out.fit = winner.fit;
    return out;
}

ScanOutcome scan(Method method, const ZoneFamily& family, const CaseData& data,
                 const ScanConfig& config) {
    switch (method) {
        case Method::poisson: return scan_poisson(family, data);
        case Method::zip: return scan_zip(family, data);
        case Method::zip_em: return scan_zip_em(family, data, config);
    }
    throw DataError("scan: unknown method");
}

}  // namespace zipscan
