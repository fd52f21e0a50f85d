#pragma once

#include <vector>

#include "pacchi2/risk.hpp"

namespace pacchi2 {

struct BoundValue {
    double value = 0.0;
    double empirical_term = 0.0;
    double complexity_term = 0.0;  // for kl: the budget sqrt((chi2+1) I / delta)
    Distance distance = Distance::Lin;
};

inline constexpr double kKlRootCap = 1.0 - 1e-12;

// Bernoulli KL divergence with 0 ln 0 = 0. Requires q in (0,1).
double kl_binary(double p_hat, double q);
// Largest r in [p_hat, 1 - 1e-12] with kl(p_hat, r) <= eps, by bisection.
double kl_upper_inverse(double p_hat, double eps);

// Bound values from the two sufficient statistics E_Q[l] and sum q^2/p.
double lin_complexity(double chi2_plus_one, int m, double delta);
double sq_complexity(double chi2_plus_one, int m, double delta);
double kl_budget(double chi2_plus_one, int m, double delta);

BoundValue bound_lin(const std::vector<double>& q, const BoundConfig& cfg, const RiskProfile& profile);
BoundValue bound_sq(const std::vector<double>& q, const BoundConfig& cfg, const RiskProfile& profile);
BoundValue bound_kl(const std::vector<double>& q, const BoundConfig& cfg, const RiskProfile& profile);
// Dispatches on cfg.distance.
BoundValue evaluate_bound(const std::vector<double>& q, const BoundConfig& cfg,
                          const RiskProfile& profile);
BoundValue evaluate_bound(const Posterior& q, const BoundConfig& cfg, const RiskProfile& profile);

// Same computations against a bare risk vector (no sorting requirement).
BoundValue evaluate_bound(const std::vector<double>& q, const std::vector<double>& risks,
                          const BoundConfig& cfg);

}  // namespace pacchi2
