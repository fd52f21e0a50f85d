#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pacchi2 {

enum class Distance { Lin, Sq, Kl };

enum class Method { LinClosedForm, SqFP, KlFP, KlCCP, GibbsKL, BruteForce };

const char* to_string(Distance d);
const char* to_string(Method m);
// Accepts "lin", "sq", "kl"; throws std::invalid_argument otherwise.
Distance parse_distance(const std::string& name);

// Empirical risks of a finite classifier set, sorted non-decreasingly.
// perm[i] is the original index of the classifier at sorted position i.
class RiskProfile {
public:
    RiskProfile() = default;

    const std::vector<double>& risks() const { return risks_; }
    const std::vector<std::size_t>& perm() const { return perm_; }
    const std::vector<std::string>& labels() const { return labels_; }
    int m() const { return m_; }
    std::size_t size() const { return risks_.size(); }
    double risk(std::size_t i) const { return risks_[i]; }

    // Reorders a vector given in original classifier order into sorted order.
    std::vector<double> to_sorted(const std::vector<double>& original) const;
    // Inverse of to_sorted.
    std::vector<double> to_original(const std::vector<double>& sorted) const;

    friend RiskProfile make_risk_profile(const std::vector<double>& raw_risks, int m,
                                         const std::vector<std::string>& labels);

private:
    std::vector<double> risks_;
    std::vector<std::size_t> perm_;
    std::vector<std::string> labels_;  // original order
    int m_ = 0;
};

// Stable sort; ties keep ascending original index. labels may be empty,
// in which case the original indices are used.
RiskProfile make_risk_profile(const std::vector<double>& raw_risks, int m,
                              const std::vector<std::string>& labels = {});

class Prior {
public:
    static Prior uniform(std::size_t h);
    explicit Prior(std::vector<double> weights);

    const std::vector<double>& weights() const { return weights_; }
    bool is_uniform() const { return uniform_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

private:
    Prior() = default;
    std::vector<double> weights_;
    bool uniform_ = false;
};

class Posterior {
public:
    static constexpr double kSumTolerance = 1e-10;

    // Validates the simplex constraints. support_size is the index of the
    // last strictly positive weight plus one.
    Posterior(std::vector<double> weights, Method method);

    static Posterior degenerate(std::size_t h, std::size_t index, Method method);
    static Posterior uniform(std::size_t h, std::size_t support, Method method);

    const std::vector<double>& weights() const { return weights_; }
    std::size_t support_size() const { return support_; }
    Method method() const { return method_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

private:
    std::vector<double> weights_;
    std::size_t support_ = 0;
    Method method_;
};

struct BoundConfig {
    Distance distance = Distance::Lin;
    int m = 2;
    double delta = 0.05;
    Prior prior = Prior::uniform(1);
    double epsilon_interior = 0.0;

    BoundConfig(Distance d, int m, double delta, Prior prior, double epsilon_interior = 0.0);
    BoundConfig with_distance(Distance d) const;
};

// Σ q_i²/p_i − 1.
double chi2_divergence(const std::vector<double>& q, const Prior& p);
double chi2_divergence(const Posterior& q, const Prior& p);

// Σ q_i²/p_i, the quantity every bound actually uses.
double chi2_plus_one(const std::vector<double>& q, const Prior& p);

double expected_risk(const std::vector<double>& q, const std::vector<double>& risks);

}  // namespace pacchi2
