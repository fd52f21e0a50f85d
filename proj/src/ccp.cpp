#include "pacchi2/ccp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pacchi2/bounds.hpp"
#include "pacchi2/moments.hpp"
#include "pacchi2/parallel.hpp"

namespace pacchi2 {

const char* to_string(CCPFailure f) {
    switch (f) {
        case CCPFailure::ZeroEmpiricalRisk: return "ZeroEmpiricalRisk";
        case CCPFailure::SaturatedEmpiricalRisk: return "SaturatedEmpiricalRisk";
        case CCPFailure::InnerSolveFailed: return "InnerSolveFailed";
        case CCPFailure::MaxIter: return "MaxIter";
    }
    return "?";
}

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    for (double& x : v) x = std::max(0.0, x - theta);
}

struct Linearization {
    std::vector<double> c1;  // coefficients of the linearized first term
    double a2 = 0.0, b2 = 0.0, d2 = 0.0, r0 = 0.0;
};

struct Evaluation {
    double objective;
    double violation;
};

class Subproblem {
public:
    Subproblem(const std::vector<double>& l, const std::vector<double>& p, double scale,
               const CCPOptions& opts)
        : l_(l), p_(p), scale_(scale), opts_(opts) {}

    Linearization linearize(const std::vector<double>& q0, double r0) const {
        Linearization lin;
        double s0 = 0.0, emp = 0.0;
        for (std::size_t i = 0; i < q0.size(); ++i) {
            s0 += q0[i] * q0[i] / p_[i];
            emp += l_[i] * q0[i];
        }
        const double a = scale_ / std::sqrt(s0);
        lin.c1.resize(q0.size());
        for (std::size_t i = 0; i < q0.size(); ++i) lin.c1[i] = a * q0[i] / p_[i];
        lin.a2 = std::log((1.0 - emp) / (1.0 - r0));
        lin.b2 = std::log(emp / r0) - lin.a2;
        lin.d2 = (r0 - emp) / (r0 * (1.0 - r0));
        lin.r0 = r0;
        return lin;
    }

    // Penalized objective and, optionally, a subgradient (last entry for r).
    Evaluation evaluate(const Linearization& lin, const std::vector<double>& q, double r,
                        std::vector<double>* grad) const {
        const std::size_t h = q.size();
        double emp = 0.0, s = 0.0, c1 = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            emp += l_[i] * q[i];
            s += q[i] * q[i] / p_[i];
            c1 += lin.c1[i] * q[i];
        }
        emp = std::clamp(emp, 0.0, 1.0);
        const double e = std::max(emp, 1e-300);
        const double g1 = kl_binary(emp, r) - c1;
        const double root = std::sqrt(s);
        const double g2 = scale_ * root - (lin.a2 + lin.b2 * emp + lin.d2 * (r - lin.r0));
        const double g3 = emp - r;
        const double rho = opts_.penalty;
        Evaluation ev{r, 0.0};
        for (double g : {g1, g2, g3})
            if (g > 0.0) ev.violation += g;
        ev.objective += rho * ev.violation;
        if (grad) {
            grad->assign(h + 1, 0.0);
            (*grad)[h] = 1.0;
            if (g1 > 0.0) {
                const double dl = std::log(e / r) - std::log((1.0 - emp) / (1.0 - r));
                for (std::size_t i = 0; i < h; ++i) (*grad)[i] += rho * (l_[i] * dl - lin.c1[i]);
                (*grad)[h] += rho * (r - emp) / (r * (1.0 - r));
            }
            if (g2 > 0.0) {
                for (std::size_t i = 0; i < h; ++i)
                    (*grad)[i] += rho * (scale_ * q[i] / (p_[i] * root) - lin.b2 * l_[i]);
                (*grad)[h] -= rho * lin.d2;
            }
            if (g3 > 0.0) {
                for (std::size_t i = 0; i < h; ++i) (*grad)[i] += rho * l_[i];
                (*grad)[h] -= rho;
            }
        }
        return ev;
    }

    // Projected normalized subgradient from (q0, r0); returns the best iterate.
    bool solve(const Linearization& lin, std::vector<double>& q, double& r) const {
        const std::size_t h = q.size();
        std::vector<double> best_q = q, grad;
        double best_r = r;
        double best_f = evaluate(lin, q, r, nullptr).objective;
        for (int t = 1; t <= opts_.inner_steps; ++t) {
            evaluate(lin, q, r, &grad);
            double norm = 0.0;
            for (double g : grad) norm += g * g;
            norm = std::sqrt(norm);
            if (!std::isfinite(norm)) return false;
            if (norm == 0.0) break;
            const double step = opts_.step_scale / std::sqrt(static_cast<double>(t)) / norm;
            for (std::size_t i = 0; i < h; ++i) q[i] -= step * grad[i];
            r -= step * grad[h];
            project_simplex(q);
            r = std::clamp(r, 1e-12, kKlRootCap);
            const double f = evaluate(lin, q, r, nullptr).objective;
            if (!std::isfinite(f)) return false;
            if (f < best_f) {
                best_f = f;
                best_q = q;
                best_r = r;
            }
        }
        q = std::move(best_q);
        r = best_r;
        return true;
    }

private:
    const std::vector<double>& l_;
    const std::vector<double>& p_;
    double scale_;  // sqrt(I / delta)
    const CCPOptions& opts_;
};

double exact_r(const std::vector<double>& q, const std::vector<double>& l, const BoundConfig& cfg) {
    return evaluate_bound(q, l, cfg).value;
}

}  // namespace

CCPResult ccp_solve(const RiskProfile& profile, const BoundConfig& cfg_in, const std::vector<double>& init,
                    const CCPOptions& opts) {
    const BoundConfig cfg = cfg_in.with_distance(Distance::Kl);
    const auto& l = profile.risks();
    if (init.size() != l.size()) throw std::invalid_argument("initial posterior has wrong length");
    if (cfg.prior.size() != l.size()) throw std::invalid_argument("prior/profile length mismatch");

    CCPResult res{Posterior(init, Method::KlCCP), 0.0, 0, false, 0, std::nullopt, {}};
    std::vector<double> q = res.posterior.weights();
    const double emp0 = expected_risk(q, l);
    res.r_value = exact_r(q, l, cfg);
    if (emp0 <= 0.0) {
        res.failure = CCPFailure::ZeroEmpiricalRisk;
        return res;
    }
    if (emp0 >= 1.0) {
        res.failure = CCPFailure::SaturatedEmpiricalRisk;
        return res;
    }

    const Subproblem sub(l, cfg.prior.weights(), std::sqrt(i_r_kl(cfg.m).value / cfg.delta), opts);
    double r = res.r_value;
    res.r_trace.push_back(r);
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        res.iterations = outer + 1;
        Linearization lin = sub.linearize(q, r);
        std::vector<double> cand = q;
        double cand_r = r;
        if (!sub.solve(lin, cand, cand_r)) {
            res.failure = CCPFailure::InnerSolveFailed;
            break;
        }
        const double cand_emp = expected_risk(cand, l);
        // Moving to a zero-risk support would leave the subgradient undefined.
        const double next = cand_emp > 0.0 && cand_emp < 1.0 ? exact_r(cand, l, cfg) : r;
        if (!(next < r)) {
            res.converged = true;
            break;
        }
        const double gain = r - next;
        q = std::move(cand);
        r = next;
        res.r_trace.push_back(r);
        if (gain < opts.stop_tolerance) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged && !res.failure) res.failure = CCPFailure::MaxIter;
    double s = 0.0;
    for (double x : q) s += x;
    for (double& x : q) x /= s;
    res.posterior = Posterior(std::move(q), Method::KlCCP);
    res.r_value = r;
    return res;
}

std::vector<double> dirichlet_start(std::size_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> q(h);
    double s = 0.0;
    for (double& x : q) {
        x = expo(rng);
        s += x;
    }
    for (double& x : q) x /= s;
    return q;
}

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    s.min = *std::min_element(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

CCPMultistart ccp_multistart(const RiskProfile& profile, const BoundConfig& cfg, int n_starts,
                             std::uint64_t seed, const std::vector<double>& test_risks,
                             const CCPOptions& opts) {
    if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
    if (!test_risks.empty() && test_risks.size() != profile.size())
        throw std::invalid_argument("test risks do not match the profile");
    const std::size_t h = profile.size();
    std::vector<std::optional<CCPResult>> slots(static_cast<std::size_t>(n_starts));
    parallel_for(slots.size(), [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        CCPResult r = ccp_solve(profile, cfg, dirichlet_start(h, s), opts);
        r.init_seed = s;
        slots[i] = std::move(r);
    });

    CCPMultistart out;
    std::vector<double> rs, gte;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        CCPResult& r = *slots[i];
        const bool ok = !r.failure || *r.failure == CCPFailure::MaxIter;
        if (!ok) {
            ++out.failures;
        } else {
            rs.push_back(r.r_value);
            if (!test_risks.empty()) gte.push_back(expected_risk(r.posterior.weights(), test_risks));
            if (!out.best || r.r_value < out.runs[*out.best].r_value) out.best = i;
        }
        out.runs.push_back(std::move(r));
    }
    out.r = summarize(rs);
    out.gibbs_test_error = summarize(gte);
    return out;
}

}  // namespace pacchi2
