#include "zipscan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include "hex_lattice.hpp"
#include "zipscan/errors.hpp"
#include "zipscan/parallel.hpp"
#include "zipscan/rng.hpp"

namespace zipscan {

RegionMap build_hex_map(std::uint64_t seed, double jitter_fraction) {
    if (jitter_fraction < 0.0 || jitter_fraction > 0.25) {
        throw DataError("build_hex_map: jitter_fraction must lie in [0, 0.25]");
    }
    std::mt19937_64 eng = rng::make_engine(seed, rng::Stream::map_jitter, 0);
    std::uniform_real_distribution<double> noise(-jitter_fraction, jitter_fraction);

    std::vector<Region> regions;
    regions.reserve(203);
    int id = 0;
    char buf[16];
    for (int row = 0; row < hexlat::kRows; ++row) {
        for (int col = 0; col < hexlat::row_length(row); ++col) {
            ++id;
            std::snprintf(buf, sizeof(buf), "h%03d", id);
            Region r;
            r.id = buf;
            r.x = hexlat::cell_x(row, col);
            r.y = hexlat::cell_y(row);
            if (jitter_fraction > 0.0) {
                r.x += noise(eng);
                r.y += noise(eng);
            }
            r.population = 1000.0;
            regions.push_back(std::move(r));
        }
    }
    return RegionMap(std::move(regions));
}

void validate_scenario(const RegionMap& map, const Scenario& scenario) {
    const int k = map.size();
    auto check_indices = [&](const std::vector<int>& idx, const char* what) {
        std::unordered_set<int> seen;
        for (int i : idx) {
            if (i < 0 || i >= k) {
                throw DataError(std::string("scenario: ") + what + " index out of range");
            }
            if (!seen.insert(i).second) {
                throw DataError(std::string("scenario: duplicate ") + what + " index");
            }
        }
    };
    check_indices(scenario.true_cluster, "true_cluster");
    check_indices(scenario.structural_zeros, "structural_zeros");
    if (scenario.relative_risks.size() != static_cast<std::size_t>(k)) {
        throw DataError("scenario: relative_risks misaligned with the map");
    }
    for (double r : scenario.relative_risks) {
        if (!(r > 0.0)) throw DataError("scenario: relative risks must be positive");
    }
    if (scenario.total_cases < 1) throw DataError("scenario: total_cases must be >= 1");
}

namespace {

// log C(M, j) for j = 0..M.
std::vector<double> log_binomial_coefficients(long long m) {
    std::vector<double> lc(static_cast<std::size_t>(m) + 1);
    const double lgm = std::lgamma(static_cast<double>(m) + 1.0);
    for (long long j = 0; j <= m; ++j) {
        lc[static_cast<std::size_t>(j)] = lgm - std::lgamma(static_cast<double>(j) + 1.0) -
                                          std::lgamma(static_cast<double>(m - j) + 1.0);
    }
    return lc;
}

// P(Bin(m, pi) >= c) by direct summation of the pmf.
double binomial_upper_tail(const std::vector<double>& log_coef, long long m, double pi, long long c) {
    if (c <= 0) return 1.0;
    if (c > m) return 0.0;
    if (pi <= 0.0) return 0.0;
    if (pi >= 1.0) return 1.0;
    const double lp = std::log(pi);
    const double lq = std::log1p(-pi);
    double tail = 0.0;
    for (long long j = c; j <= m; ++j) {
        tail += std::exp(log_coef[static_cast<std::size_t>(j)] + static_cast<double>(j) * lp +
                         static_cast<double>(m - j) * lq);
    }
    return std::min(tail, 1.0);
}

}  // namespace

double calibrate_risks(const RegionMap& map, const std::vector<int>& true_cluster,
                       long long total_cases, double target_power) {
    if (true_cluster.empty()) throw DataError("calibrate_risks: empty cluster");
    if (total_cases < 1) throw DataError("calibrate_risks: total_cases must be >= 1");
    if (!(target_power > 0.0) || !(target_power < 1.0)) {
        throw DataError("calibrate_risks: target_power out of (0,1)");
    }

    double pop_in = 0.0;
    for (int i : true_cluster) {
        if (i < 0 || i >= map.size()) throw DataError("calibrate_risks: cluster index out of range");
        pop_in += map.region(i).population;
    }
    const double pop_out = map.total_population() - pop_in;
    if (!(pop_in > 0.0) || !(pop_out > 0.0)) {
        throw DegenerateDataError("calibrate_risks: cluster or complement has no population");
    }

    const long long m = total_cases;
    const std::vector<double> log_coef = log_binomial_coefficients(m);
    const double pi0 = pop_in / (pop_in + pop_out);

    // Exact one-sided binomial critical count at level 0.05.
    long long critical = m + 1;
    for (long long c = 0; c <= m; ++c) {
        if (binomial_upper_tail(log_coef, m, pi0, c) <= 0.05) {
            critical = c;
            break;
        }
    }
    if (critical > m) {
        throw DegenerateDataError("calibrate_risks: the binomial test cannot reject at this size");
    }

    const auto power_at = [&](double r) {
        const double pi = r * pop_in / (r * pop_in + pop_out);
        return binomial_upper_tail(log_coef, m, pi, critical);
    };

    constexpr double kMaxRisk = 1e6;
    double lo = 1.0;
    if (power_at(lo) >= target_power) return lo;
    double hi = 2.0;
    while (power_at(hi) < target_power) {
        hi *= 2.0;
        if (hi > kMaxRisk) {
            throw DegenerateDataError("calibrate_risks: target power unreachable below risk 1e6");
        }
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (power_at(mid) >= target_power) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::vector<double> risk_vector(const RegionMap& map, const std::vector<int>& cluster, double r) {
    std::vector<double> risks(static_cast<std::size_t>(map.size()), 1.0);
    for (int i : cluster) {
        if (i < 0 || i >= map.size()) throw DataError("risk_vector: index out of range");
        risks[static_cast<std::size_t>(i)] = r;
    }
    return risks;
}

CaseData draw_cases(const RegionMap& map, const Scenario& scenario, std::mt19937_64& eng) {
    validate_scenario(map, scenario);
    const int k = map.size();
    std::vector<std::uint8_t> d(static_cast<std::size_t>(k), 0);
    for (int i : scenario.structural_zeros) d[static_cast<std::size_t>(i)] = 1;

    // Restricted multinomial: identical in law to rejection-resampling the
    // cases that land on structural zeros.
    std::vector<double> weights(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        if (d[static_cast<std::size_t>(i)] == 0) {
            weights[static_cast<std::size_t>(i)] =
                map.region(i).population * scenario.relative_risks[static_cast<std::size_t>(i)];
        }
    }

    CaseData data;
    data.counts = rng::multinomial(eng, scenario.total_cases, weights);
    data.structural_zero = std::move(d);
    return data;
}

Overlap sensitivity_ppv(const Zone& detected, const std::vector<int>& true_cluster,
                        const RegionMap& map) {
    if (detected.members.empty()) throw DataError("sensitivity_ppv: empty detected zone");
    if (true_cluster.empty()) throw DataError("sensitivity_ppv: empty true cluster");

    std::vector<std::uint8_t> in_true(static_cast<std::size_t>(map.size()), 0);
    double pop_true = 0.0;
    for (int i : true_cluster) {
        in_true[static_cast<std::size_t>(i)] = 1;
        pop_true += map.region(i).population;
    }
    double pop_detected = 0.0, pop_both = 0.0;
    for (int i : detected.members) {
        pop_detected += map.region(i).population;
        if (in_true[static_cast<std::size_t>(i)]) pop_both += map.region(i).population;
    }
    Overlap o;
    o.sensitivity = pop_true > 0.0 ? pop_both / pop_true : 0.0;
    o.ppv = pop_detected > 0.0 ? pop_both / pop_detected : 0.0;
    return o;
}

namespace {

void check_settings(const StudySettings& s, const std::vector<Method>& methods) {
    if (methods.empty()) throw DataError("study: no methods requested");
    if (s.studies < 1) throw DataError("study: studies must be >= 1");
    if (s.replicas < 19) throw DataError("study: at least 19 replicas required");
    if (!(s.alpha > 0.0) || !(s.alpha < 1.0)) throw DataError("study: alpha out of (0,1)");
}

// Per-method critical values from shared replica streams. Methods with equal
// generation p see identical replica data sets; zip scores a replica with its
// own generated indicators, the others scan blind.
std::vector<double> critical_values(const ZoneFamily& family, const std::vector<Method>& methods,
                                    double p_zip, long long total_cases, double theta0,
                                    const StudySettings& settings, const ScanConfig& scan_config) {
    const std::size_t m = methods.size();
    const std::size_t b_count = static_cast<std::size_t>(settings.replicas);
    std::vector<double> log_lambdas(b_count * m, 0.0);

    parallel_for(b_count, settings.workers, [&](std::size_t b) {
        std::map<double, CaseData> replica_by_p;
        for (std::size_t j = 0; j < m; ++j) {
            const double p_gen = methods[j] == Method::poisson ? 0.0 : p_zip;
            auto it = replica_by_p.find(p_gen);
            if (it == replica_by_p.end()) {
                std::mt19937_64 eng = rng::make_engine(settings.seed, rng::Stream::null_replica,
                                                       static_cast<std::uint64_t>(b) + 1);
                it = replica_by_p
                         .emplace(p_gen, generate_null_replica(family.map(), p_gen, theta0,
                                                               total_cases, eng))
                         .first;
            }
            CaseData replica = it->second;
            if (methods[j] != Method::zip) replica.structural_zero.reset();
            log_lambdas[b * m + j] = scan(methods[j], family, replica, scan_config).log_lambda;
        }
    });

    std::vector<double> stars(m, 0.0);
    std::vector<double> column(b_count);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t b = 0; b < b_count; ++b) column[b] = log_lambdas[b * m + j];
        stars[j] = mc_critical_value(column, settings.alpha);
    }
    return stars;
}

}  // namespace

StudyReport power_study(const ZoneFamily& family, const Scenario& scenario,
                        const std::vector<Method>& methods, const StudySettings& settings) {
    check_settings(settings, methods);
    const RegionMap& map = family.map();
    validate_scenario(map, scenario);
    if (scenario.true_cluster.empty()) throw DataError("power_study: scenario has no true cluster");

    ScanConfig scan_config;
    scan_config.em = settings.em;
    scan_config.null_mode = settings.null_mode;

    const double p_zip = static_cast<double>(scenario.structural_zeros.size()) /
                         static_cast<double>(map.size());
    const double theta0 =
        static_cast<double>(scenario.total_cases) / map.total_population();
    const std::vector<double> stars = critical_values(family, methods, p_zip,
                                                      scenario.total_cases, theta0, settings,
                                                      scan_config);

    const std::size_t m = methods.size();
    const std::size_t n = static_cast<std::size_t>(settings.studies);
    std::vector<double> log_lambdas(n * m, 0.0);
    std::vector<double> sens(n * m, 0.0);
    std::vector<double> ppv(n * m, 0.0);

    parallel_for(n, settings.workers, [&](std::size_t i) {
        // The draw stream depends only on (seed, study); methods replay it.
        std::mt19937_64 eng =
            rng::make_engine(settings.seed, rng::Stream::study_draw, static_cast<std::uint64_t>(i) + 1);
        const CaseData data = draw_cases(map, scenario, eng);
        CaseData blind = data;
        blind.structural_zero.reset();
        for (std::size_t j = 0; j < m; ++j) {
            const ScanOutcome out =
                scan(methods[j], family, methods[j] == Method::zip ? data : blind, scan_config);
            log_lambdas[i * m + j] = out.log_lambda;
            const Overlap overlap = sensitivity_ppv(out.best_zone, scenario.true_cluster, map);
            sens[i * m + j] = overlap.sensitivity;
            ppv[i * m + j] = overlap.ppv;
        }
    });

    StudyReport report;
    report.scenario = scenario.name;
    report.studies = settings.studies;
    report.replicas = settings.replicas;
    report.seed = settings.seed;
    for (std::size_t j = 0; j < m; ++j) {
        MethodMetrics mm;
        mm.method = methods[j];
        mm.log_lambda_star = stars[j];
        long long rejections = 0;
        double sens_sum = 0.0, ppv_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (log_lambdas[i * m + j] > stars[j]) ++rejections;
            sens_sum += sens[i * m + j];
            ppv_sum += ppv[i * m + j];
        }
        mm.power = static_cast<double>(rejections) / static_cast<double>(n);
        mm.mean_sensitivity = sens_sum / static_cast<double>(n);
        mm.mean_ppv = ppv_sum / static_cast<double>(n);
        report.methods.push_back(mm);
    }
    return report;
}

std::vector<TypeIResult> type_i_study(const ZoneFamily& family, const std::vector<Method>& methods,
                                      const StudySettings& settings, int structural_zero_regions,
                                      long long total_cases) {
    check_settings(settings, methods);
    const RegionMap& map = family.map();
    const int k = map.size();
    if (structural_zero_regions < 0 || structural_zero_regions >= k) {
        throw DataError("type_i_study: structural zero count out of range");
    }
    if (total_cases < 1) throw DataError("type_i_study: total_cases must be >= 1");

    ScanConfig scan_config;
    scan_config.em = settings.em;
    scan_config.null_mode = settings.null_mode;

    const double p_zip = static_cast<double>(structural_zero_regions) / static_cast<double>(k);
    const double theta0 = static_cast<double>(total_cases) / map.total_population();
    const std::vector<double> stars =
        critical_values(family, methods, p_zip, total_cases, theta0, settings, scan_config);

    const std::size_t m = methods.size();
    const std::size_t n = static_cast<std::size_t>(settings.studies);
    std::vector<double> log_lambdas(n * m, 0.0);

    parallel_for(n, settings.workers, [&](std::size_t i) {
        std::mt19937_64 eng =
            rng::make_engine(settings.seed, rng::Stream::study_draw, static_cast<std::uint64_t>(i) + 1);
        // Exactly `structural_zero_regions` zero regions per study draw.
        const std::vector<int> zeros =
            rng::sample_without_replacement(eng, k, structural_zero_regions);
        CaseData data;
        std::vector<std::uint8_t> d(static_cast<std::size_t>(k), 0);
        std::vector<double> weights(static_cast<std::size_t>(k), 0.0);
        for (int z : zeros) d[static_cast<std::size_t>(z)] = 1;
        for (int r = 0; r < k; ++r) {
            if (d[static_cast<std::size_t>(r)] == 0) {
                weights[static_cast<std::size_t>(r)] = map.region(r).population;
            }
        }
        data.counts = rng::multinomial(eng, total_cases, weights);
        data.structural_zero = std::move(d);

        CaseData blind = data;
        blind.structural_zero.reset();
        for (std::size_t j = 0; j < m; ++j) {
            const ScanOutcome out =
                scan(methods[j], family, methods[j] == Method::zip ? data : blind, scan_config);
            log_lambdas[i * m + j] = out.log_lambda;
        }
    });

    std::vector<TypeIResult> results;
    for (std::size_t j = 0; j < m; ++j) {
        TypeIResult r;
        r.method = methods[j];
        r.log_lambda_star = stars[j];
        long long rejections = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (log_lambdas[i * m + j] > stars[j]) ++rejections;
        }
        r.rejection_proportion = static_cast<double>(rejections) / static_cast<double>(n);
        results.push_back(r);
    }
    return results;
}

}  // namespace zipscan
