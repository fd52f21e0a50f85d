#include "pacchi2/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "pacchi2/csv.hpp"
#include "pacchi2/errors.hpp"
#include "pacchi2/parallel.hpp"

namespace pacchi2 {

std::vector<double> lambda_grid(std::optional<std::size_t> h_target) {
    std::vector<double> g;
    for (double ratio : {2.0, 3.0, 5.0}) {
        for (double v = 0.1; v >= 1e-10; v /= ratio) g.push_back(v);
    }
    for (int j = 0; j <= 98; ++j) g.push_back((10.0 + 5.0 * j) / 100.0);
    std::sort(g.begin(), g.end());
    std::vector<double> out;
    for (double v : g)
        if (out.empty() || std::abs(v - out.back()) > 1e-12 * v) out.push_back(v);
    if (h_target) {
        if (*h_target == 0 || *h_target > out.size())
            throw std::invalid_argument("requested " + std::to_string(*h_target) + " lambdas but the grid has " +
                                        std::to_string(out.size()));
        out.resize(*h_target);
    }
    return out;
}

double KernelSvm::decision(const Dataset& d, const double* x) const {
    double f = 0.0;
    for (std::size_t k = 0; k < support_rows.size(); ++k)
        f += dual_coeffs[k] * std::exp(-gamma * squared_distance(d.row(support_rows[k]), x, d.cols));
    return f;
}

KernelSvm train_svm(const Dataset& d, const std::vector<std::size_t>& rows, double lambda, double gamma,
                    std::uint64_t seed, const SvmOptions& opts) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    const std::size_t n = rows.size();
    if (n == 0) throw std::invalid_argument("empty training set");

    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double k = std::exp(-gamma * squared_distance(d.row(rows[i]), d.row(rows[j]), d.cols));
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(opts.steps_per_sample * n));
    std::vector<long> alpha(n, 0);
    std::vector<double> acc(n, 0.0);  // sum_j alpha_j y_j K(j, i)
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 1; t <= steps; ++t) {
        const std::size_t i = pick(rng);
        const int yi = d.labels[rows[i]];
        if (yi * acc[i] / (lambda * static_cast<double>(t)) < 1.0) {
            ++alpha[i];
            const double* col = kernel.data() + i * n;
            for (std::size_t k = 0; k < n; ++k) acc[k] += yi * col[k];
        }
    }

    KernelSvm svm;
    svm.lambda = lambda;
    svm.gamma = gamma;
    const double scale = 1.0 / (lambda * static_cast<double>(steps));
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] == 0) continue;
        const double c = static_cast<double>(alpha[i]) * d.labels[rows[i]] * scale;
        if (!std::isfinite(c))
            throw std::overflow_error("non-finite SVM coefficient for lambda " + format_real(lambda));
        svm.support_rows.push_back(rows[i]);
        svm.dual_coeffs.push_back(c);
    }
    return svm;
}

double error_rate(const KernelSvm& svm, const Dataset& d, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw std::invalid_argument("error rate of an empty set");
    std::size_t wrong = 0;
    for (std::size_t r : rows)
        if (svm.predict(d, d.row(r)) != d.labels[r]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(rows.size());
}

BaseClassifier train_base(const Dataset& d, const SplitPlan& plan, double lambda, double gamma,
                          std::uint64_t seed, const SvmOptions& opts) {
    std::vector<std::size_t> pool = plan.composite();
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t m = plan.train_idx.size();
    BaseClassifier b;
    b.lambda = lambda;
    b.gamma = gamma;
    b.subsample.assign(pool.begin(), pool.begin() + m);
    b.validation.assign(pool.begin() + m, pool.end());
    std::sort(b.subsample.begin(), b.subsample.end());
    std::sort(b.validation.begin(), b.validation.end());
    b.svm = train_svm(d, b.subsample, lambda, gamma, derive_seed(seed, 1), opts);
    b.train_risk = error_rate(b.svm, d, b.subsample);
    b.valid_risk = error_rate(b.svm, d, b.validation);
    b.test_risk = error_rate(b.svm, d, plan.test_idx);
    return b;
}

double pipeline_gamma(const Dataset& d, const SplitPlan& plan, std::uint64_t seed) {
    return estimate_gamma(d, plan.composite(), derive_seed(seed, 0x9a33a));
}

Ensemble build_risk_profile(const Dataset& d, const SplitPlan& plan, const std::vector<double>& lambdas,
                            std::uint64_t seed, const SvmOptions& opts) {
    if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
    Ensemble e;
    e.gamma = pipeline_gamma(d, plan, seed);
    e.classifiers.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        e.classifiers[i] = train_base(d, plan, lambdas[i], e.gamma, derive_seed(seed, 1000 + i), opts);
    });
    std::vector<double> valid, test;
    std::vector<std::string> labels;
    for (const auto& c : e.classifiers) {
        valid.push_back(c.valid_risk);
        test.push_back(c.test_risk);
        labels.push_back(format_short(c.lambda));
    }
    e.profile = make_risk_profile(valid, static_cast<int>(plan.valid_idx.size()), labels);
    e.sorted_test_risks = e.profile.to_sorted(test);
    return e;
}

void write_profile_csv(const std::string& path, const Ensemble& e) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "lambda,train_risk,valid_risk,test_risk\n";
    for (const auto& c : e.classifiers)
        out << format_real(c.lambda) << ',' << format_real(c.train_risk) << ',' << format_real(c.valid_risk)
            << ',' << format_real(c.test_risk) << '\n';
    if (!out) throw InputError("failed writing " + path);
}

ProfileRows read_profile_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    const std::vector<std::string> want = {"lambda", "train_risk", "valid_risk", "test_risk"};
    if (t.header != want) throw InputError(path + ": expected header lambda,train_risk,valid_risk,test_risk");
    if (t.rows.empty()) throw InputError(path + ": no rows");
    ProfileRows p;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        double v[4];
        for (int c = 0; c < 4; ++c) {
            if (!parse_double(t.rows[r][c], v[c]))
                throw InputError(path + ": row " + std::to_string(r + 2) + ": '" + t.rows[r][c] + "' is not a number");
        }
        for (int c = 1; c < 4; ++c)
            if (v[c] < 0.0 || v[c] > 1.0) throw InputError(path + ": row " + std::to_string(r + 2) + ": risk outside [0,1]");
        p.lambdas.push_back(v[0]);
        p.train.push_back(v[1]);
        p.valid.push_back(v[2]);
        p.test.push_back(v[3]);
    }
    return p;
}

}  // namespace pacchi2
