#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pacchi2/bounds.hpp"
#include "pacchi2/risk.hpp"

namespace pacchi2 {

struct SubsetSolution {
    std::size_t h_prime = 0;
    std::optional<Posterior> posterior;
    BoundValue bound;
    bool feasible = false;
    bool defined = false;
    // Lin only: l_bar + sqrt(H/(H' 4 m delta) - var), NaN elsewhere.
    double closed_form_bound = 0.0;
};

struct FPState {
    std::vector<double> iterate;  // length H'
    int iteration = 0;
    double residual = 0.0;
    bool converged = false;
    bool damped = false;
};

// Sign of the deviation factor in the kl fixed-point map. Standard puts more
// mass on lower risk; Flipped is the variant with the opposite pairing, kept
// for diagnostics only.
enum class KlSign { Standard, Flipped };

struct FixedPointOptions {
    int max_iter = 10000;
    double tolerance = -1.0;  // <0: 1e-12 for sq, 1e-10 for kl
    int damping_after = 500;  // non-monotone residual steps before damping
    double damping = 0.5;
    KlSign kl_sign = KlSign::Standard;
};

enum class SearchMode { Exhaustive, BreakAtInfeasible, WarmStart };

SubsetSolution opt_lin_general_prior(const RiskProfile& profile, const BoundConfig& cfg);
SubsetSolution opt_lin_subset(const RiskProfile& profile, const BoundConfig& cfg, std::size_t h_prime);

std::pair<SubsetSolution, FPState> fp_sq_subset(const RiskProfile& profile, const BoundConfig& cfg,
                                                std::size_t h_prime,
                                                const std::vector<double>& init = {},
                                                const FixedPointOptions& opts = {});
std::pair<SubsetSolution, FPState> fp_kl_subset(const RiskProfile& profile, const BoundConfig& cfg,
                                                std::size_t h_prime,
                                                const std::vector<double>& init = {},
                                                const FixedPointOptions& opts = {});

// One unclamped application of each map to a support-length iterate, normalized.
std::vector<double> sq_fp_map(const RiskProfile& profile, const BoundConfig& cfg,
                              const std::vector<double>& q);
std::vector<double> kl_fp_map(const RiskProfile& profile, const BoundConfig& cfg,
                              const std::vector<double>& q, KlSign sign = KlSign::Standard);

// Best posterior over ordered supports H' = 1..H. If sweep is non-null it
// receives every evaluated subset solution.
SubsetSolution ordered_subset_search(const RiskProfile& profile, const BoundConfig& cfg,
                                     SearchMode mode = SearchMode::Exhaustive,
                                     std::vector<SubsetSolution>* sweep = nullptr,
                                     const FixedPointOptions& opts = {});

// Smallest H' with sum_{i<=H'} l_i^2 >= H/(4 m delta), clamped to [2, H].
std::size_t warm_start_h(const RiskProfile& profile, const BoundConfig& cfg);

Posterior gibbs_kl_posterior(const RiskProfile& profile, int m);

std::pair<Posterior, BoundValue> brute_force_oracle(const RiskProfile& profile, const BoundConfig& cfg,
                                                    int grid_denominator);

struct ConvexityWitness {
    double lhs = 0.0;
    double rhs = 0.0;
    bool violated = false;
};

// (sum q^2/p)^{3/4} (sum q'^2/p)^{1/4} against (sum q q'/p + sum q^2/p)/2.
ConvexityWitness sq_convexity_sides(const std::vector<double>& q, const std::vector<double>& q2,
                                    const Prior& p);
// Evaluates the fixed ten-classifier counterexample.
ConvexityWitness sq_nonconvexity_witness();
bool check_sq_nonconvexity_witness();

// Strict quasi-convexity sufficient condition for the squared-distance bound.
bool check_sq_quasiconvexity_condition(const std::vector<double>& q, const std::vector<double>& q2,
                                       const Prior& p, const std::vector<double>& risks, int m,
                                       double delta, double alpha);

}  // namespace pacchi2
