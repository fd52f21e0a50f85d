#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pacchi2/posterior_opt.hpp"

namespace pacchi2 {

Posterior gibbs_kl_posterior(const RiskProfile& profile, int m) {
    if (m < 1) throw std::invalid_argument("gibbs posterior requires m >= 1");
    const auto& l = profile.risks();
    const double lo = *std::min_element(l.begin(), l.end());
    std::vector<double> q(l.size());
    double z = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        q[i] = std::exp(-static_cast<double>(m) * (l[i] - lo));
        z += q[i];
    }
    for (double& x : q) x /= z;
    return Posterior(std::move(q), Method::GibbsKL);
}

std::pair<Posterior, BoundValue> brute_force_oracle(const RiskProfile& profile, const BoundConfig& cfg,
                                                    int n) {
    const std::size_t h = profile.size();
    if (h > 4) throw std::invalid_argument("brute-force oracle supports at most 4 classifiers");
    if (n < 1 || n > 400) throw std::invalid_argument("grid denominator must lie in [1, 400]");
    if (cfg.prior.size() != h) throw std::invalid_argument("prior/profile length mismatch");

    std::vector<int> counts(h, 0);
    std::vector<double> q(h), best_q;
    BoundValue best;
    best.value = std::numeric_limits<double>::infinity();

    auto visit = [&]() {
        for (std::size_t i = 0; i < h; ++i) q[i] = static_cast<double>(counts[i]) / n;
        BoundValue b = evaluate_bound(q, cfg, profile);
        if (b.value < best.value) {
            best = b;
            best_q = q;
        }
    };
    // Enumerate compositions of n into h non-negative parts.
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == h) {
            counts[i] = left;
            visit();
            return;
        }
        for (int c = 0; c <= left; ++c) {
            counts[i] = c;
            self(self, i + 1, left - c);
        }
    };
    rec(rec, 0, n);
    return {Posterior(best_q, Method::BruteForce), best};
}

ConvexityWitness sq_convexity_sides(const std::vector<double>& q, const std::vector<double>& q2,
                                    const Prior& p) {
    if (q.size() != p.size() || q2.size() != p.size()) throw std::invalid_argument("length mismatch");
    double a = 0.0, b = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        a += q[i] * q[i] / p[i];
        b += q2[i] * q2[i] / p[i];
        ab += q[i] * q2[i] / p[i];
    }
    ConvexityWitness w;
    w.lhs = std::pow(a, 0.75) * std::pow(b, 0.25);
    w.rhs = 0.5 * (ab + a);
    w.violated = w.lhs < w.rhs;
    return w;
}

ConvexityWitness sq_nonconvexity_witness() {
    const std::vector<double> q2 = {0.1538802,  0.1199569,  0.04226614, 0.06115894, 0.06160916,
                                    0.07520679, 0.1450413,  0.2345929,  0.01762696, 0.08866069};
    std::vector<double> q(10, 0.0);
    q[7] = 1.0;
    return sq_convexity_sides(q, q2, Prior::uniform(10));
}

bool check_sq_nonconvexity_witness() { return sq_nonconvexity_witness().violated; }

bool check_sq_quasiconvexity_condition(const std::vector<double>& q, const std::vector<double>& q2,
                                       const Prior& p, const std::vector<double>& risks, int m,
                                       double delta, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (q.size() != p.size() || q2.size() != p.size() || risks.size() != p.size())
        throw std::invalid_argument("length mismatch");
    const double md = m;
    const double c = std::pow((12.0 * md - 11.0) / (16.0 * md * md * md * delta), 0.25);
    double mix = 0.0, base = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        double z = q[i] + (1.0 - alpha) * (q2[i] - q[i]);
        mix += z * z / p[i];
        base += q[i] * q[i] / p[i];
    }
    const double lhs = c * (std::pow(mix, 0.25) - std::pow(base, 0.25));
    const double rhs = (1.0 - alpha) * (expected_risk(q, risks) - expected_risk(q2, risks));
    return lhs < rhs;
}

}  // namespace pacchi2
