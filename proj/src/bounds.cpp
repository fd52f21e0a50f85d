#include "pacchi2/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "pacchi2/moments.hpp"

namespace pacchi2 {

double kl_binary(double p_hat, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("kl_binary requires q in (0,1)");
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::domain_error("kl_binary requires p_hat in [0,1]");
    double a = p_hat > 0.0 ? p_hat * std::log(p_hat / q) : 0.0;
    double b = p_hat < 1.0 ? (1.0 - p_hat) * std::log((1.0 - p_hat) / (1.0 - q)) : 0.0;
    return a + b;
}

double kl_upper_inverse(double p_hat, double eps) {
    if (!(eps >= 0.0)) throw std::domain_error("kl_upper_inverse requires eps >= 0");
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::domain_error("kl_upper_inverse requires p_hat in [0,1]");
    if (p_hat >= kKlRootCap) return p_hat;
    if (eps == 0.0) return p_hat;
    double lo = p_hat;
    double hi = kKlRootCap;
    if (kl_binary(p_hat, hi) <= eps) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        // kl(p, p) = 0 <= eps, so lo stays feasible even when p_hat = 0.
        if (mid <= 0.0 || kl_binary(p_hat, mid) <= eps)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double lin_complexity(double k, int m, double delta) { return std::sqrt(k / (4.0 * m * delta)); }

double sq_complexity(double k, int m, double delta) {
    const double md = m;
    return std::pow(k * (12.0 * md - 11.0) / (16.0 * md * md * md * delta), 0.25);
}

double kl_budget(double k, int m, double delta) { return std::sqrt(k * i_r_kl(m).value / delta); }

namespace {

BoundValue assemble(Distance d, double emp, double k, int m, double delta) {
    BoundValue b;
    b.distance = d;
    b.empirical_term = emp;
    switch (d) {
        case Distance::Lin:
            b.complexity_term = lin_complexity(k, m, delta);
            b.value = emp + b.complexity_term;
            break;
        case Distance::Sq:
            b.complexity_term = sq_complexity(k, m, delta);
            b.value = emp + b.complexity_term;
            break;
        case Distance::Kl:
            b.complexity_term = kl_budget(k, m, delta);
            b.value = std::max(emp, kl_upper_inverse(std::min(1.0, std::max(0.0, emp)), b.complexity_term));
            break;
    }
    return b;
}

}  // namespace

BoundValue evaluate_bound(const std::vector<double>& q, const std::vector<double>& risks,
                          const BoundConfig& cfg) {
    if (q.size() != risks.size()) throw std::invalid_argument("posterior/profile length mismatch");
    return assemble(cfg.distance, expected_risk(q, risks), chi2_plus_one(q, cfg.prior), cfg.m, cfg.delta);
}

BoundValue evaluate_bound(const std::vector<double>& q, const BoundConfig& cfg,
                          const RiskProfile& profile) {
    return evaluate_bound(q, profile.risks(), cfg);
}

BoundValue evaluate_bound(const Posterior& q, const BoundConfig& cfg, const RiskProfile& profile) {
    return evaluate_bound(q.weights(), profile.risks(), cfg);
}

BoundValue bound_lin(const std::vector<double>& q, const BoundConfig& cfg, const RiskProfile& profile) {
    return evaluate_bound(q, profile.risks(), cfg.with_distance(Distance::Lin));
}

BoundValue bound_sq(const std::vector<double>& q, const BoundConfig& cfg, const RiskProfile& profile) {
    return evaluate_bound(q, profile.risks(), cfg.with_distance(Distance::Sq));
}

BoundValue bound_kl(const std::vector<double>& q, const BoundConfig& cfg, const RiskProfile& profile) {
    return evaluate_bound(q, profile.risks(), cfg.with_distance(Distance::Kl));
}

}  // namespace pacchi2
