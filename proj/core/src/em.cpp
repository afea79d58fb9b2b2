#include "zipscan/em.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "em_engine.hpp"
#include "zipscan/errors.hpp"

namespace zipscan {

namespace detail {

ZeroGroups ZeroGroups::build(const RegionMap& map, const CaseData& data) {
    ZeroGroups zg;
    const int k = map.size();
    zg.group_of_region.assign(static_cast<std::size_t>(k), -1);

    std::map<double, int> group_by_pop;  // ordered: group ids ascend with population
    for (int i = 0; i < k; ++i) {
        if (data.counts[static_cast<std::size_t>(i)] != 0) continue;
        group_by_pop.emplace(map.region(i).population, -1);
    }
    for (auto& [pop, id] : group_by_pop) {
        id = static_cast<int>(zg.group_pop.size());
        zg.group_pop.push_back(pop);
    }
    zg.group_size.assign(zg.group_pop.size(), 0);
    for (int i = 0; i < k; ++i) {
        if (data.counts[static_cast<std::size_t>(i)] != 0) continue;
        const int g = group_by_pop[map.region(i).population];
        zg.zero_regions.push_back(i);
        zg.group_of_zero.push_back(g);
        zg.group_of_region[static_cast<std::size_t>(i)] = g;
        ++zg.group_size[static_cast<std::size_t>(g)];
    }
    return zg;
}

std::vector<double> expand_delta(const ZeroGroups& groups, const EmState& st,
                                 const std::vector<std::uint8_t>& inside, int k) {
    std::vector<double> delta(static_cast<std::size_t>(k), 0.0);
    for (std::size_t z = 0; z < groups.zero_regions.size(); ++z) {
        const int region = groups.zero_regions[z];
        const std::size_t g = static_cast<std::size_t>(groups.group_of_zero[z]);
        const bool in = !inside.empty() && inside[static_cast<std::size_t>(region)] != 0;
        delta[static_cast<std::size_t>(region)] = in ? st.delta_in[g] : st.delta_out[g];
    }
    return delta;
}

}  // namespace detail

namespace {

// Inside sums run in member order and the outside is total minus inside,
// matching the arithmetic of the incremental scan so that em_fit and
// scan_zip_em produce bit-identical fits for the same zone.
detail::EmSplit make_split(const RegionMap& map, const CaseData& data,
                           const detail::ZeroGroups& groups, const Zone* zone,
                           std::vector<std::uint8_t>& inside) {
    detail::EmSplit split;
    split.zeros_in.assign(groups.group_pop.size(), 0);
    const int k = map.size();

    long long cases_total = 0;
    double pop_total = 0.0;
    for (int i = 0; i < k; ++i) {
        cases_total += data.counts[static_cast<std::size_t>(i)];
        pop_total += map.region(i).population;
    }

    long long cases_in = 0;
    if (zone != nullptr) {
        split.has_zone = true;
        inside.assign(static_cast<std::size_t>(k), 0);
        for (int idx : zone->members) {
            if (idx < 0 || idx >= k) throw DataError("em: zone member out of range");
            if (inside[static_cast<std::size_t>(idx)] != 0) throw DataError("em: duplicate zone member");
            inside[static_cast<std::size_t>(idx)] = 1;
            cases_in += data.counts[static_cast<std::size_t>(idx)];
            split.pop_in += map.region(idx).population;
            if (data.counts[static_cast<std::size_t>(idx)] == 0) {
                ++split.zeros_in[static_cast<std::size_t>(
                    groups.group_of_region[static_cast<std::size_t>(idx)])];
            }
        }
    }
    split.cases_in = static_cast<double>(cases_in);
    split.cases_out = static_cast<double>(cases_total - cases_in);
    split.pop_out = pop_total - split.pop_in;
    return split;
}

}  // namespace

std::vector<double> e_step(const RegionMap& map, const CaseData& data, const Zone* zone,
                           double p, double theta0, double thetaZ) {
    validate_case_data(map, data);
    const int k = map.size();
    std::vector<std::uint8_t> inside;
    if (zone != nullptr) {
        inside.assign(static_cast<std::size_t>(k), 0);
        for (int idx : zone->members) inside[static_cast<std::size_t>(idx)] = 1;
    }
    std::vector<double> delta(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        if (data.counts[static_cast<std::size_t>(i)] > 0) continue;
        const bool in = zone != nullptr && inside[static_cast<std::size_t>(i)] != 0;
        const double mean = map.region(i).population * (in ? thetaZ : theta0);
        delta[static_cast<std::size_t>(i)] = detail::posterior_zero(p, mean);
    }
    return delta;
}

EmResult em_fit(const RegionMap& map, const CaseData& data, const Zone* zone,
                const EmConfig& config, const EmObserver& observer) {
    validate_case_data(map, data);
    if (config.tol <= 0.0) throw DataError("em_fit: tol must be positive");
    if (config.max_iter < 1) throw DataError("em_fit: max_iter must be >= 1");
    if (data.total_cases() == 0) {
        throw DegenerateDataError("em_fit: all counts are zero; the mixture is not identifiable");
    }

    const detail::ZeroGroups groups = detail::ZeroGroups::build(map, data);
    std::vector<std::uint8_t> inside;
    const detail::EmSplit split = make_split(map, data, groups, zone, inside);

    detail::EmState state;
    if (observer) {
        auto notify = [&](const detail::EmState& st, double p) {
            observer(st.iterations, detail::expand_delta(groups, st, inside, map.size()), p,
                     st.theta_out, split.has_zone ? std::optional<double>(st.theta_in) : std::nullopt);
        };
        state = detail::run_em(groups, split, map.size(), config, notify);
    } else {
        state = detail::run_em(groups, split, map.size(), config);
    }

    EmResult result;
    result.iterations = state.iterations;
    result.converged = state.converged;
    result.fit.p_hat = state.p;
    result.fit.theta0_hat = state.theta_out;
    if (split.has_zone) result.fit.thetaZ_hat = state.theta_in;
    result.fit.delta_hat = detail::expand_delta(groups, state, inside, map.size());
    return result;
}

}  // namespace zipscan
