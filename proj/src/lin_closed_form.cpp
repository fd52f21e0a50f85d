#include <cmath>
#include <limits>
#include <stdexcept>

#include "pacchi2/posterior_opt.hpp"

namespace pacchi2 {

SubsetSolution opt_lin_general_prior(const RiskProfile& profile, const BoundConfig& cfg) {
    const auto& l = profile.risks();
    const auto& p = cfg.prior.weights();
    const std::size_t h = l.size();
    if (p.size() != h) throw std::invalid_argument("prior/profile length mismatch");

    double mean = 0.0;
    for (std::size_t i = 0; i < h; ++i) mean += p[i] * l[i];
    double var = 0.0;
    for (std::size_t i = 0; i < h; ++i) var += p[i] * (l[i] - mean) * (l[i] - mean);

    SubsetSolution sol;
    sol.h_prime = h;
    sol.closed_form_bound = std::numeric_limits<double>::quiet_NaN();
    const double radicand = 1.0 / (4.0 * cfg.m * cfg.delta) - var;
    if (!(radicand > 0.0)) return sol;
    sol.defined = true;
    const double root = std::sqrt(radicand);
    sol.closed_form_bound = mean + root;

    std::vector<double> q(h);
    bool feasible = true;
    for (std::size_t i = 0; i < h; ++i) {
        q[i] = p[i] * (1.0 + (mean - l[i]) / root);
        if (q[i] < 0.0) feasible = false;
    }
    sol.feasible = feasible;
    if (!feasible) return sol;
    sol.posterior.emplace(std::move(q), Method::LinClosedForm);
    sol.bound = bound_lin(sol.posterior->weights(), cfg, profile);
    return sol;
}

SubsetSolution opt_lin_subset(const RiskProfile& profile, const BoundConfig& cfg, std::size_t hp) {
    const auto& l = profile.risks();
    const std::size_t h = l.size();
    if (!cfg.prior.is_uniform() || cfg.prior.size() != h)
        throw std::invalid_argument("ordered-subset solvers require a uniform prior over the profile");
    if (hp < 2 || hp > h) throw std::invalid_argument("subset size must lie in [2, H]");

    const double n = static_cast<double>(hp);
    double mean = 0.0;
    for (std::size_t i = 0; i < hp; ++i) mean += l[i];
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < hp; ++i) var += (l[i] - mean) * (l[i] - mean);
    var /= n;

    SubsetSolution sol;
    sol.h_prime = hp;
    sol.closed_form_bound = std::numeric_limits<double>::quiet_NaN();
    const double radicand = static_cast<double>(h) / (n * 4.0 * cfg.m * cfg.delta) - var;
    if (!(radicand > 0.0)) return sol;
    sol.defined = true;
    const double root = std::sqrt(radicand);
    sol.closed_form_bound = mean + root;

    std::vector<double> q(h, 0.0);
    for (std::size_t i = 0; i < hp; ++i) q[i] = (1.0 + (mean - l[i]) / root) / n;
    // Weights decrease with risk, so the last support weight decides feasibility.
    if (!(q[hp - 1] > cfg.epsilon_interior)) return sol;
    sol.feasible = true;
    sol.posterior.emplace(std::move(q), Method::LinClosedForm);
    sol.bound = bound_lin(sol.posterior->weights(), cfg, profile);
    return sol;
}

std::size_t warm_start_h(const RiskProfile& profile, const BoundConfig& cfg) {
    const auto& l = profile.risks();
    const std::size_t h = l.size();
    if (h < 2) return h;
    const double target = static_cast<double>(h) / (4.0 * cfg.m * cfg.delta);
    double acc = 0.0;
    std::size_t crossing = h;
    for (std::size_t i = 0; i < h; ++i) {
        acc += l[i] * l[i];
        if (acc >= target) {
            crossing = i + 1;
            break;
        }
    }
    return std::min(h, std::max<std::size_t>(2, crossing));
}

}  // namespace pacchi2
