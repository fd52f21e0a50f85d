#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pacchi2/risk.hpp"

namespace pacchi2 {

enum class CCPFailure { ZeroEmpiricalRisk, SaturatedEmpiricalRisk, InnerSolveFailed, MaxIter };

const char* to_string(CCPFailure f);

struct CCPOptions {
    int max_outer = 100;
    int inner_steps = 5000;
    double penalty = 1e3;
    double step_scale = 0.05;  // inner step is step_scale / sqrt(t) along the unit subgradient
    double stop_tolerance = 1e-8;
};

struct CCPResult {
    Posterior posterior;
    double r_value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::uint64_t init_seed = 0;
    std::optional<CCPFailure> failure;
    std::vector<double> r_trace;  // r after each accepted outer iterate
};

// Convex-concave procedure on the kl-distance bound program, from `init`
// (full length, on the simplex). Works with any strictly positive prior.
CCPResult ccp_solve(const RiskProfile& profile, const BoundConfig& cfg, const std::vector<double>& init,
                    const CCPOptions& opts = {});

struct Summary {
    double min = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t count = 0;
};

struct CCPMultistart {
    std::vector<CCPResult> runs;
    Summary r;
    Summary gibbs_test_error;  // empty unless test risks were given
    std::size_t failures = 0;
    std::optional<std::size_t> best;  // index of the smallest r among successful runs
};

// Symmetric Dirichlet(1) starting points; run i uses derive_seed(seed, i).
std::vector<double> dirichlet_start(std::size_t h, std::uint64_t seed);

CCPMultistart ccp_multistart(const RiskProfile& profile, const BoundConfig& cfg, int n_starts,
                             std::uint64_t seed, const std::vector<double>& sorted_test_risks = {},
                             const CCPOptions& opts = {});

Summary summarize(const std::vector<double>& xs);

}  // namespace pacchi2
