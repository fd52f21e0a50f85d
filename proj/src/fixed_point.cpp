#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pacchi2/moments.hpp"
#include "pacchi2/posterior_opt.hpp"

namespace pacchi2 {
namespace {

void require_uniform(const RiskProfile& profile, const BoundConfig& cfg, std::size_t hp) {
    if (!cfg.prior.is_uniform() || cfg.prior.size() != profile.size())
        throw std::invalid_argument("ordered-subset solvers require a uniform prior over the profile");
    if (hp < 2 || hp > profile.size()) throw std::invalid_argument("subset size must lie in [2, H]");
}

double sum_sq(const std::vector<double>& q) {
    double s = 0.0;
    for (double x : q) s += x * x;
    return s;
}

void normalize(std::vector<double>& q) {
    double s = std::accumulate(q.begin(), q.end(), 0.0);
    for (double& x : q) x /= s;
}

// Floors weights at eps; reports whether any weight needed the floor.
bool clamp_floor(std::vector<double>& q, double eps) {
    bool hit = false;
    for (double& x : q) {
        if (!(x > eps)) {
            x = eps;
            hit = true;
        }
    }
    return hit;
}

// Raw (unnormalized, unclamped) map outputs.
std::vector<double> sq_raw(const std::vector<double>& l, std::size_t h, const BoundConfig& cfg,
                           const std::vector<double>& q) {
    const std::size_t hp = q.size();
    const double n = static_cast<double>(hp);
    double mean = 0.0;
    for (std::size_t i = 0; i < hp; ++i) mean += l[i];
    mean /= n;
    const double md = cfg.m;
    const double c = (12.0 * md - 11.0) * static_cast<double>(h) / (16.0 * md * md * md * cfg.delta);
    const double gain = 2.0 * std::pow(sum_sq(q), 0.75) / std::pow(c, 0.25);
    std::vector<double> out(hp);
    for (std::size_t i = 0; i < hp; ++i) out[i] = 1.0 / n + gain * (mean - l[i]);
    return out;
}

struct KlStep {
    std::vector<double> raw;
    bool boundary = false;  // E_Q[l] at 0 or 1: optimum is uniform on the support
};

KlStep kl_raw(const std::vector<double>& l, std::size_t h, const BoundConfig& cfg,
              const std::vector<double>& q, KlSign sign) {
    const std::size_t hp = q.size();
    KlStep step;
    double emp = 0.0;
    for (std::size_t i = 0; i < hp; ++i) emp += l[i] * q[i];
    if (emp <= 0.0 || emp >= 1.0) {
        step.boundary = true;
        step.raw.assign(hp, 1.0 / static_cast<double>(hp));
        return step;
    }
    const double budget = std::sqrt(static_cast<double>(h) * sum_sq(q) * i_r_kl(cfg.m).value / cfg.delta);
    const double r = kl_upper_inverse(emp, budget);
    step.raw.resize(hp);
    if (!(r > emp)) {
        step.raw.assign(hp, 1.0 / static_cast<double>(hp));
        return step;
    }
    const double slope = std::log(emp * (1.0 - r) / (r * (1.0 - emp)));
    const double s = sign == KlSign::Standard ? 1.0 : -1.0;
    for (std::size_t i = 0; i < hp; ++i) step.raw[i] = 1.0 + s * (l[i] - emp) / budget * slope;
    return step;
}

template <class RawMap>
std::pair<SubsetSolution, FPState> iterate(const RiskProfile& profile, const BoundConfig& cfg,
                                           std::size_t hp, const std::vector<double>& init,
                                           const FixedPointOptions& opts, double default_tol,
                                           Method method, RawMap raw_map) {
    const double eps = cfg.epsilon_interior > 0.0 ? cfg.epsilon_interior : 1e-12;
    const double tol = opts.tolerance > 0.0 ? opts.tolerance : default_tol;

    FPState st;
    if (init.empty()) {
        st.iterate.assign(hp, 1.0 / static_cast<double>(hp));
    } else {
        if (init.size() != hp) throw std::invalid_argument("initial iterate has wrong length");
        st.iterate = init;
        clamp_floor(st.iterate, eps);
        normalize(st.iterate);
    }

    double prev_residual = std::numeric_limits<double>::infinity();
    int non_monotone = 0;
    bool clamped = false;
    st.residual = std::numeric_limits<double>::infinity();
    for (st.iteration = 0; st.iteration < opts.max_iter;) {
        std::vector<double> next = raw_map(st.iterate);
        clamped = clamp_floor(next, eps);
        normalize(next);
        if (st.damped) {
            for (std::size_t i = 0; i < hp; ++i) next[i] = opts.damping * st.iterate[i] + (1.0 - opts.damping) * next[i];
        }
        double res = 0.0;
        for (std::size_t i = 0; i < hp; ++i) res = std::max(res, std::abs(next[i] - st.iterate[i]));
        st.iterate = std::move(next);
        ++st.iteration;
        st.residual = res;
        if (res < tol) {
            st.converged = true;
            break;
        }
        if (res > prev_residual && ++non_monotone >= opts.damping_after) st.damped = true;
        prev_residual = res;
    }

    SubsetSolution sol;
    sol.h_prime = hp;
    sol.defined = true;
    sol.closed_form_bound = std::numeric_limits<double>::quiet_NaN();
    const double smallest = *std::min_element(st.iterate.begin(), st.iterate.end());
    sol.feasible = st.converged && !clamped && smallest > eps;
    std::vector<double> full(profile.size(), 0.0);
    std::copy(st.iterate.begin(), st.iterate.end(), full.begin());
    if (sol.feasible) {
        sol.posterior.emplace(std::move(full), method);
        sol.bound = evaluate_bound(sol.posterior->weights(), cfg, profile);
    }
    return {std::move(sol), std::move(st)};
}

}  // namespace

std::vector<double> sq_fp_map(const RiskProfile& profile, const BoundConfig& cfg, const std::vector<double>& q) {
    auto out = sq_raw(profile.risks(), profile.size(), cfg, q);
    normalize(out);
    return out;
}

std::vector<double> kl_fp_map(const RiskProfile& profile, const BoundConfig& cfg, const std::vector<double>& q,
                              KlSign sign) {
    auto out = kl_raw(profile.risks(), profile.size(), cfg, q, sign).raw;
    normalize(out);
    return out;
}

std::pair<SubsetSolution, FPState> fp_sq_subset(const RiskProfile& profile, const BoundConfig& cfg,
                                                std::size_t hp, const std::vector<double>& init,
                                                const FixedPointOptions& opts) {
    require_uniform(profile, cfg, hp);
    const BoundConfig c = cfg.with_distance(Distance::Sq);
    const auto& l = profile.risks();
    const std::size_t h = profile.size();
    return iterate(profile, c, hp, init, opts, 1e-12, Method::SqFP,
                   [&](const std::vector<double>& q) { return sq_raw(l, h, c, q); });
}

std::pair<SubsetSolution, FPState> fp_kl_subset(const RiskProfile& profile, const BoundConfig& cfg,
                                                std::size_t hp, const std::vector<double>& init,
                                                const FixedPointOptions& opts) {
    require_uniform(profile, cfg, hp);
    const BoundConfig c = cfg.with_distance(Distance::Kl);
    const auto& l = profile.risks();
    const std::size_t h = profile.size();
    return iterate(profile, c, hp, init, opts, 1e-10, Method::KlFP,
                   [&](const std::vector<double>& q) { return kl_raw(l, h, c, q, opts.kl_sign).raw; });
}

}  // namespace pacchi2
