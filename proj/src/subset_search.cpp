#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pacchi2/posterior_opt.hpp"

namespace pacchi2 {
namespace {

SubsetSolution degenerate_solution(const RiskProfile& profile, const BoundConfig& cfg) {
    SubsetSolution sol;
    sol.h_prime = 1;
    sol.defined = true;
    sol.feasible = true;
    Method m = cfg.distance == Distance::Lin  ? Method::LinClosedForm
               : cfg.distance == Distance::Sq ? Method::SqFP
                                              : Method::KlFP;
    sol.posterior.emplace(Posterior::degenerate(profile.size(), 0, m));
    sol.bound = evaluate_bound(*sol.posterior, cfg, profile);
    sol.closed_form_bound = std::numeric_limits<double>::quiet_NaN();
    return sol;
}

SubsetSolution solve_at(const RiskProfile& profile, const BoundConfig& cfg, std::size_t hp,
                        const FixedPointOptions& opts) {
    if (hp == 1) return degenerate_solution(profile, cfg);
    switch (cfg.distance) {
        case Distance::Lin: return opt_lin_subset(profile, cfg, hp);
        case Distance::Sq: return fp_sq_subset(profile, cfg, hp, {}, opts).first;
        case Distance::Kl: return fp_kl_subset(profile, cfg, hp, {}, opts).first;
    }
    throw std::logic_error("unreachable");
}

bool usable(const SubsetSolution& s) { return s.defined && s.feasible && s.posterior.has_value(); }

}  // namespace

SubsetSolution ordered_subset_search(const RiskProfile& profile, const BoundConfig& cfg, SearchMode mode,
                                     std::vector<SubsetSolution>* sweep, const FixedPointOptions& opts) {
    const std::size_t h = profile.size();
    if (!cfg.prior.is_uniform() || cfg.prior.size() != h)
        throw std::invalid_argument("ordered-subset search requires a uniform prior over the profile");

    std::vector<SubsetSolution> local;
    std::vector<SubsetSolution>& seen = sweep ? *sweep : local;
    seen.clear();

    auto better = [](const SubsetSolution& a, const SubsetSolution& b) {
        return a.bound.value < b.bound.value;
    };

    if (mode == SearchMode::WarmStart && h >= 2) {
        std::vector<std::optional<SubsetSolution>> cache(h + 1);
        auto at = [&](std::size_t k) -> const SubsetSolution& {
            if (!cache[k]) {
                cache[k] = solve_at(profile, cfg, k, opts);
                seen.push_back(*cache[k]);
            }
            return *cache[k];
        };
        std::size_t k = warm_start_h(profile, cfg);
        while (k > 1 && !usable(at(k))) --k;
        for (;;) {
            std::size_t next = k;
            if (k + 1 <= h && usable(at(k + 1)) && better(at(k + 1), at(next))) next = k + 1;
            if (k > 1 && usable(at(k - 1)) && better(at(k - 1), at(next))) next = k - 1;
            if (next == k) break;
            k = next;
        }
        return at(k);
    }

    std::optional<SubsetSolution> best;
    for (std::size_t k = 1; k <= h; ++k) {
        SubsetSolution s = solve_at(profile, cfg, k, opts);
        seen.push_back(s);
        if (!usable(s)) {
            if (mode == SearchMode::BreakAtInfeasible) break;
            continue;
        }
        if (!best || better(s, *best)) best = std::move(s);
    }
    if (!best) throw std::runtime_error("no feasible support size found");
    return *best;
}

}  // namespace pacchi2
