#pragma once

// Shared EM core for em_fit and the per-zone fits inside scan_zip_em.
//
// Only zero-count regions carry a nonzero posterior, and regions with equal
// population on the same side of the zone share one posterior value, so the
// iteration state lives on (population group, side) pairs. This keeps a
// per-zone fit at O(groups) per sweep instead of O(k), which is what makes
// scanning thousands of candidate zones with a fresh EM per zone practical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "zipscan/em.hpp"
#include "zipscan/region_map.hpp"

namespace zipscan::detail {

/// Zero-count regions of a data set, grouped by exact population value.
struct ZeroGroups {
    std::vector<int> zero_regions;    // ascending region index
    std::vector<int> group_of_zero;   // parallel to zero_regions
    std::vector<double> group_pop;    // ascending distinct population values
    std::vector<int> group_size;      // total members per group
    std::vector<int> group_of_region; // per region, -1 when count > 0

    static ZeroGroups build(const RegionMap& map, const CaseData& data);

    int group_count() const { return static_cast<int>(group_pop.size()); }
    bool empty() const { return zero_regions.empty(); }
};

/// Split totals a zone presents to the EM. For the null model use has_zone
/// = false and fold everything into the "out" side.
struct EmSplit {
    bool has_zone = false;
    double cases_in = 0.0;
    double cases_out = 0.0;
    double pop_in = 0.0;   // raw population sums
    double pop_out = 0.0;
    std::vector<int> zeros_in;  // per group: zero-count members inside
};

/// Converged EM state on the grouped parameterization.
struct EmState {
    std::vector<double> delta_in;   // per group
    std::vector<double> delta_out;  // per group
    double p = 0.0;
    double theta_in = 0.0;   // meaningful only when the split has a zone
    double theta_out = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline double posterior_zero(double p, double mean) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return p / (p + (1.0 - p) * std::exp(-mean));
}

/// Runs the E/M alternation on grouped state. `expand` (optional) receives
/// the per-region posterior after every M step, for observers.
template <typename Observer = std::nullptr_t>
EmState run_em(const ZeroGroups& groups, const EmSplit& split, int k, const EmConfig& config,
               const Observer& observe = nullptr) {
    const int g = groups.group_count();
    EmState st;
    st.delta_in.assign(static_cast<std::size_t>(g), 0.0);
    st.delta_out.assign(static_cast<std::size_t>(g), 0.0);

    const double zero_regions = static_cast<double>(groups.zero_regions.size());
    double p = config.init_p
                   ? *config.init_p
                   : std::clamp(zero_regions / static_cast<double>(k), 1e-6, 1.0 - 1e-6);

    // M step on the current grouped posteriors (rates from adjusted sums).
    auto m_step = [&](const std::vector<double>& din, const std::vector<double>& dout) {
        double removed_in = 0.0, removed_out = 0.0, dsum = 0.0;
        for (int v = 0; v < g; ++v) {
            const std::size_t u = static_cast<std::size_t>(v);
            const double cin = static_cast<double>(split.zeros_in[u]);
            const double cout = static_cast<double>(groups.group_size[u]) - cin;
            removed_in += groups.group_pop[u] * cin * din[u];
            removed_out += groups.group_pop[u] * cout * dout[u];
            dsum += cin * din[u] + cout * dout[u];
        }
        st.theta_in = split.cases_in > 0.0 ? split.cases_in / (split.pop_in - removed_in) : 0.0;
        st.theta_out = split.cases_out > 0.0 ? split.cases_out / (split.pop_out - removed_out) : 0.0;
        p = dsum / static_cast<double>(k);
    };

    auto e_step_into = [&](std::vector<double>& din, std::vector<double>& dout) {
        for (int v = 0; v < g; ++v) {
            const std::size_t u = static_cast<std::size_t>(v);
            din[u] = posterior_zero(p, groups.group_pop[u] * st.theta_in);
            dout[u] = posterior_zero(p, groups.group_pop[u] * st.theta_out);
        }
    };

    auto notify = [&] {
        if constexpr (!std::is_same_v<Observer, std::nullptr_t>) {
            observe(st, p);
        }
    };

    // Initial rates come from the unadjusted sums (delta = 0).
    st.theta_in = split.cases_in > 0.0 ? split.cases_in / split.pop_in : 0.0;
    st.theta_out = split.cases_out > 0.0 ? split.cases_out / split.pop_out : 0.0;

    e_step_into(st.delta_in, st.delta_out);
    m_step(st.delta_in, st.delta_out);
    st.iterations = 1;
    st.p = p;
    notify();

    if (groups.empty()) {  // no latent indicators: fixed point after one sweep
        st.converged = true;
        return st;
    }

    std::vector<double> next_in(static_cast<std::size_t>(g));
    std::vector<double> next_out(static_cast<std::size_t>(g));
    while (st.iterations < config.max_iter) {
        e_step_into(next_in, next_out);
        double diff = 0.0;
        for (int v = 0; v < g; ++v) {
            const std::size_t u = static_cast<std::size_t>(v);
            if (split.zeros_in[u] > 0) diff = std::max(diff, std::abs(next_in[u] - st.delta_in[u]));
            if (groups.group_size[u] - split.zeros_in[u] > 0) {
                diff = std::max(diff, std::abs(next_out[u] - st.delta_out[u]));
            }
        }
        if (diff < config.tol) {
            st.converged = true;
            break;
        }
        st.delta_in.swap(next_in);
        st.delta_out.swap(next_out);
        m_step(st.delta_in, st.delta_out);
        ++st.iterations;
        st.p = p;
        notify();
    }
    st.p = p;
    return st;
}

/// Expands grouped posteriors to a per-region vector. `inside` marks zone
/// membership per region (may be empty for null-model fits).
std::vector<double> expand_delta(const ZeroGroups& groups, const EmState& st,
                                 const std::vector<std::uint8_t>& inside, int k);

}  // namespace zipscan::detail
