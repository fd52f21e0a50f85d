#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacchi2/ccp.hpp"
#include "pacchi2/dataset.hpp"
#include "pacchi2/ensemble.hpp"
#include "pacchi2/risk.hpp"

namespace pacchi2 {

inline constexpr std::array<double, 3> kAlphaLevels = {0.8, 0.9, 0.95};

double gibbs_test_error(const std::vector<double>& q, const std::vector<double>& test_risks);
double gibbs_test_error(const Posterior& q, const std::vector<double>& test_risks);
double hhi(const std::vector<double>& q);
double hhi(const Posterior& q);
// Smallest prefix count whose cumulative mass reaches alpha.
std::size_t n_alpha(const std::vector<double>& q, double alpha);
std::size_t n_alpha(const Posterior& q, double alpha);
std::vector<double> cdf(const std::vector<double>& q);

struct MethodReport {
    std::string method;
    std::optional<double> bound;  // absent for methods without a chi-squared bound
    double empirical_risk = 0.0;
    double gibbs_test_error = 0.0;
    std::size_t support_size = 0;
    double hhi = 0.0;
    std::array<std::size_t, 3> n_alpha{};  // at kAlphaLevels
    double wall_time_s = 0.0;
    std::optional<std::string> failure;
};

struct ComparisonOptions {
    std::vector<Distance> distances = {Distance::Lin, Distance::Sq, Distance::Kl};
    bool enable_ccp = false;
    int ccp_starts = 1000;
    std::uint64_t seed = 0;
    CCPOptions ccp;
};

struct Comparison {
    std::vector<MethodReport> methods;
    std::vector<std::pair<std::string, std::vector<double>>> posteriors;  // sorted-risk order
    std::optional<CCPMultistart> ccp;
    double optimize_wall_time_s = 0.0;  // chi-squared optimizers plus the Gibbs baseline

    const MethodReport* find(const std::string& method) const;
    const std::vector<double>* posterior(const std::string& method) const;
};

Comparison run_comparison(const RiskProfile& profile, const std::vector<double>& sorted_test_risks,
                          const BoundConfig& cfg_base, const ComparisonOptions& opts = {});

struct CVReport {
    double best_lambda = 0.0;
    double cv_error = 0.0;
    double test_error = 0.0;
    double wall_time_s = 0.0;
    std::optional<double> delta_test_error;     // cv test error minus sq posterior test error
    std::optional<double> relative_test_error;  // delta / cv test error; absent when that is 0
    std::vector<double> lambdas;
    std::vector<double> fold_mean_errors;
};

// k-fold CV over the train+valid composite. d must be standardized already.
CVReport cross_validate(const Dataset& d, const SplitPlan& plan, const std::vector<double>& lambdas,
                        int folds, std::uint64_t seed, const SvmOptions& opts = {});
void attach_comparison(CVReport& cv, double sq_test_error);

struct RunConfig {
    std::string dataset_path;
    std::string label_column = "label";
    std::string positive_label = "1";
    std::uint64_t seed = 0;
    double delta = 0.05;
    std::optional<std::size_t> h;  // empty: full grid
    std::vector<Distance> distances = {Distance::Lin, Distance::Sq, Distance::Kl};
    bool enable_ccp = false;
    int ccp_starts = 1000;
    std::string output_dir = ".";
    bool run_cv = true;
    int folds = 5;
};

struct RunResult {
    std::string dataset;
    std::size_t m = 0, v = 0, t = 0;
    Ensemble ensemble;
    Comparison comparison;
    std::optional<CVReport> cv;
    std::string report_json;  // exactly what was written to report.json
};

// Ingest, split, standardize, train, optimize, cross-validate and write
// report.json, table2.csv, table5.csv and profile.csv into output_dir.
RunResult run_experiment(const RunConfig& cfg);
// Same pipeline on an in-memory dataset.
RunResult run_experiment(const Dataset& raw, const RunConfig& cfg);

// Prepared dataset and split shared by run and cv.
struct PreparedData {
    Dataset data;
    SplitPlan plan;
};
PreparedData prepare(const Dataset& raw, std::uint64_t seed);

std::string report_json(const RunResult& r, const RunConfig& cfg);

}  // namespace pacchi2
