#include "pacchi2/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pacchi2 {

const char* to_string(Distance d) {
    switch (d) {
        case Distance::Lin: return "lin";
        case Distance::Sq: return "sq";
        case Distance::Kl: return "kl";
    }
    return "?";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::LinClosedForm: return "lin_closed_form";
        case Method::SqFP: return "sq_fp";
        case Method::KlFP: return "kl_fp";
        case Method::KlCCP: return "kl_ccp";
        case Method::GibbsKL: return "gibbs_kl";
        case Method::BruteForce: return "brute_force";
    }
    return "?";
}

Distance parse_distance(const std::string& name) {
    if (name == "lin") return Distance::Lin;
    if (name == "sq") return Distance::Sq;
    if (name == "kl") return Distance::Kl;
    throw std::invalid_argument("unknown distance '" + name + "' (expected lin, sq or kl)");
}

RiskProfile make_risk_profile(const std::vector<double>& raw_risks, int m,
                              const std::vector<std::string>& labels) {
    if (raw_risks.empty()) throw std::invalid_argument("risk profile is empty");
    if (m < 1) throw std::invalid_argument("sample size m must be >= 1");
    if (!labels.empty() && labels.size() != raw_risks.size())
        throw std::invalid_argument("label count does not match risk count");
    for (double r : raw_risks)
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("risk outside [0,1]");

    RiskProfile p;
    p.m_ = m;
    p.perm_.resize(raw_risks.size());
    std::iota(p.perm_.begin(), p.perm_.end(), std::size_t{0});
    std::stable_sort(p.perm_.begin(), p.perm_.end(),
                     [&](std::size_t a, std::size_t b) { return raw_risks[a] < raw_risks[b]; });
    p.risks_.reserve(raw_risks.size());
    for (std::size_t i : p.perm_) p.risks_.push_back(raw_risks[i]);
    if (labels.empty()) {
        for (std::size_t i = 0; i < raw_risks.size(); ++i) p.labels_.push_back(std::to_string(i));
    } else {
        p.labels_ = labels;
    }
    return p;
}

std::vector<double> RiskProfile::to_sorted(const std::vector<double>& original) const {
    if (original.size() != size()) throw std::invalid_argument("length mismatch");
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = original[perm_[i]];
    return out;
}

std::vector<double> RiskProfile::to_original(const std::vector<double>& sorted) const {
    if (sorted.size() != size()) throw std::invalid_argument("length mismatch");
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[perm_[i]] = sorted[i];
    return out;
}

Prior Prior::uniform(std::size_t h) {
    if (h == 0) throw std::invalid_argument("prior over empty set");
    Prior p;
    p.weights_.assign(h, 1.0 / static_cast<double>(h));
    p.uniform_ = true;
    return p;
}

Prior::Prior(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("prior over empty set");
    double s = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw std::invalid_argument("prior weights must be strictly positive");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("prior weights must sum to 1");
    uniform_ = std::all_of(weights_.begin(), weights_.end(),
                           [&](double w) { return w == weights_.front(); });
}

Posterior::Posterior(std::vector<double> weights, Method method)
    : weights_(std::move(weights)), method_(method) {
    if (weights_.empty()) throw std::invalid_argument("posterior over empty set");
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        double w = weights_[i];
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("posterior weight negative or not finite");
        s += w;
        if (w > 0.0) support_ = i + 1;
    }
    if (std::abs(s - 1.0) > kSumTolerance) throw std::invalid_argument("posterior weights do not sum to 1");
}

Posterior Posterior::degenerate(std::size_t h, std::size_t index, Method method) {
    std::vector<double> w(h, 0.0);
    w.at(index) = 1.0;
    return Posterior(std::move(w), method);
}

Posterior Posterior::uniform(std::size_t h, std::size_t support, Method method) {
    if (support == 0 || support > h) throw std::invalid_argument("bad support size");
    std::vector<double> w(h, 0.0);
    for (std::size_t i = 0; i < support; ++i) w[i] = 1.0 / static_cast<double>(support);
    return Posterior(std::move(w), method);
}

BoundConfig::BoundConfig(Distance d, int m_, double delta_, Prior prior_, double eps)
    : distance(d), m(m_), delta(delta_), prior(std::move(prior_)), epsilon_interior(eps) {
    if (m < 2) throw std::invalid_argument("sample size m must be >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(eps >= 0.0)) throw std::invalid_argument("epsilon_interior must be >= 0");
}

BoundConfig BoundConfig::with_distance(Distance d) const {
    BoundConfig c = *this;
    c.distance = d;
    return c;
}

double chi2_plus_one(const std::vector<double>& q, const Prior& p) {
    if (q.size() != p.size()) throw std::invalid_argument("posterior/prior length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q[i] * q[i] / p[i];
    return s;
}

double chi2_divergence(const std::vector<double>& q, const Prior& p) {
    return std::max(0.0, chi2_plus_one(q, p) - 1.0);
}

double chi2_divergence(const Posterior& q, const Prior& p) { return chi2_divergence(q.weights(), p); }

double expected_risk(const std::vector<double>& q, const std::vector<double>& risks) {
    if (q.size() != risks.size()) throw std::invalid_argument("posterior/risk length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q[i] * risks[i];
    return s;
}

}  // namespace pacchi2
