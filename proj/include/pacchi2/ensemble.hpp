#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacchi2/dataset.hpp"
#include "pacchi2/risk.hpp"

namespace pacchi2 {

// Geometric series 0.1*(1/2)^k, 0.1*(1/3)^k, 0.1*(1/5)^k within [1e-10, 0.1]
// plus 0.1, 0.15, ..., 5.0; sorted and deduplicated. With h_target, the
// h_target smallest values.
std::vector<double> lambda_grid(std::optional<std::size_t> h_target = std::nullopt);

// Kernel SVM trained by stochastic subgradient steps on the hinge loss.
struct KernelSvm {
    double lambda = 0.0;
    double gamma = 0.0;
    std::vector<std::size_t> support_rows;  // dataset rows with nonzero coefficient
    std::vector<double> dual_coeffs;        // alpha_j y_j / (lambda T)

    double decision(const Dataset& d, const double* x) const;
    int predict(const Dataset& d, const double* x) const { return decision(d, x) >= 0.0 ? 1 : -1; }
};

struct SvmOptions {
    double steps_per_sample = 20.0;  // T = steps_per_sample * training size
};

KernelSvm train_svm(const Dataset& d, const std::vector<std::size_t>& rows, double lambda, double gamma,
                    std::uint64_t seed, const SvmOptions& opts = {});

double error_rate(const KernelSvm& svm, const Dataset& d, const std::vector<std::size_t>& rows);

struct BaseClassifier {
    double lambda = 0.0;
    double gamma = 0.0;
    KernelSvm svm;
    std::vector<std::size_t> subsample;   // training rows, drawn from train+valid
    std::vector<std::size_t> validation;  // the rest of train+valid
    double train_risk = 0.0;
    double valid_risk = 0.0;
    double test_risk = 0.0;
};

// Trains on a random m-subsample of the train+valid composite (m = train
// size) and validates on its complement within the composite.
BaseClassifier train_base(const Dataset& d, const SplitPlan& plan, double lambda, double gamma,
                          std::uint64_t seed, const SvmOptions& opts = {});

struct Ensemble {
    RiskProfile profile;                      // validation risks, m = v
    std::vector<BaseClassifier> classifiers;  // lambda order
    std::vector<double> sorted_test_risks;    // aligned with profile order
    double gamma = 0.0;
};

// Kernel width used by every learner of a run.
double pipeline_gamma(const Dataset& d, const SplitPlan& plan, std::uint64_t seed);

// One classifier per lambda, seeds derived from `seed`. Expects d to be
// standardized already.
Ensemble build_risk_profile(const Dataset& d, const SplitPlan& plan, const std::vector<double>& lambdas,
                            std::uint64_t seed, const SvmOptions& opts = {});

// Persisted profile: lambda,train_risk,valid_risk,test_risk in lambda order.
void write_profile_csv(const std::string& path, const Ensemble& e);

struct ProfileRows {
    std::vector<double> lambdas, train, valid, test;
};
ProfileRows read_profile_csv(const std::string& path);

}  // namespace pacchi2
