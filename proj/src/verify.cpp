#include "pacchi2/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "pacchi2/bounds.hpp"
#include "pacchi2/moments.hpp"
#include "pacchi2/posterior_opt.hpp"

namespace pacchi2 {

const std::vector<PublishedKlConstant>& published_kl_constants() {
    static const std::vector<PublishedKlConstant> table = {
        {50, 0.98, 0.0074799},   {100, 0.99, 0.0037092},  {200, 0.995, 0.0018470},
        {500, 0.998, 0.0007369}, {1000, 0.999, 0.0003682}, {1020, 0.999, 0.0003609},
        {1028, 0.999, 0.0003580},
    };
    return table;
}

namespace {

GoldenCheck near(std::string name, double computed, double expected, double tol, bool relative = false) {
    GoldenCheck c;
    c.name = std::move(name);
    c.computed = computed;
    c.expected = expected;
    c.tolerance = tol;
    const double err = std::abs(computed - expected);
    c.passed = relative ? err <= tol * std::abs(expected) : err <= tol;
    return c;
}

GoldenCheck truth(std::string name, bool ok, std::string note = {}) {
    GoldenCheck c;
    c.name = std::move(name);
    c.computed = ok ? 1.0 : 0.0;
    c.expected = 1.0;
    c.passed = ok;
    c.note = std::move(note);
    return c;
}

// Binomial recurrence in extended precision, independent of the log-gamma path.
long double kl_moment_by_recurrence(int m, long double l) {
    long double pk = std::pow(1.0L - l, m);
    const long double ratio = l / (1.0L - l);
    long double s = 0.0L;
    for (int k = 0; k <= m; ++k) {
        long double p = static_cast<long double>(k) / m;
        long double a = k > 0 ? p * std::log(p / l) : 0.0L;
        long double b = k < m ? (1.0L - p) * std::log((1.0L - p) / (1.0L - l)) : 0.0L;
        s += pk * (a + b) * (a + b);
        pk *= ratio * static_cast<long double>(m - k) / static_cast<long double>(k + 1);
    }
    return s;
}

}  // namespace

std::vector<GoldenCheck> run_golden_checks(bool strict_published) {
    std::vector<GoldenCheck> out;

    for (int m : {1, 4, 1840}) out.push_back(near("lin constant * 4m, m=" + std::to_string(m), i_r_lin(m).value * 4.0 * m, 1.0, 0.0));
    out.push_back(near("sq constant m=2", i_r_sq(2).value, 0.1015625, 1e-15));
    out.push_back(near("sq constant m=100", i_r_sq(100).value, 7.43125e-5, 1e-18));
    {
        double worst = 0.0, worst_true = 0.0;
        int worst_m = 2;
        bool dominates = true;
        for (int m = 2; m <= 300; ++m) {
            const double md = m;
            double a = i_r_sq(m).value, b = i_r_sq_direct(m).value;
            double rel = std::abs(a - b) / a;
            if (rel > worst) {
                worst = rel;
                worst_m = m;
            }
            double exact = (3.0 * md - 2.0) / (16.0 * md * md * md);
            worst_true = std::max(worst_true, std::abs(b - exact) / exact);
            dominates = dominates && a >= b;
        }
        out.push_back(near("sq binomial sum vs (3m-2)/(16m^3), m=2..300 (max rel err)", worst_true, 0.0, 1e-10));
        out.push_back(truth("sq closed form dominates the binomial sum, m=2..300", dominates));
        auto c = near("sq published closed form vs binomial sum, m=2..300 (max rel err)", worst, 0.0, 1e-10);
        c.note = "worst at m=" + std::to_string(worst_m);
        c.fatal = strict_published;
        out.push_back(c);
    }

    double prev = 1e300;
    bool decreasing = true;
    for (const auto& row : published_kl_constants()) {
        MomentConstant c = i_r_kl(row.m);
        decreasing = decreasing && c.value < prev;
        prev = c.value;
        if (row.m <= 200) {
            double indep = static_cast<double>(kl_moment_by_recurrence(row.m, c.maximizer_l));
            out.push_back(near("kl constant m=" + std::to_string(row.m) + " vs extended-precision recurrence",
                               c.value, indep, 1e-10, true));
            double sym = kl_moment_objective(row.m, 1.0 - c.maximizer_l);
            out.push_back(near("kl objective symmetry m=" + std::to_string(row.m), sym, c.value, 1e-10, true));
        }
        GoldenCheck pub = near("kl constant m=" + std::to_string(row.m) + " vs published table", c.value, row.value, 1e-5);
        pub.fatal = strict_published;
        char buf[160];
        std::snprintf(buf, sizeof buf, "published maximizer %.3f, computed %.6f", row.maximizer, c.maximizer_l);
        pub.note = buf;
        out.push_back(pub);
    }
    out.push_back(truth("kl constant strictly decreasing in m", decreasing));
    out.push_back(truth("kl constant capped above m=1028", i_r_kl(2000).capped && i_r_kl(2000).value == i_r_kl(1028).value));

    ConvexityWitness w = sq_nonconvexity_witness();
    out.push_back(near("non-convexity witness lhs", w.lhs, 6.087086, 1e-5));
    out.push_back(near("non-convexity witness rhs", w.rhs, 6.172964, 1e-5));
    out.push_back(truth("non-convexity witness violates convexity", w.violated));

    out.push_back(near("kl_binary(0.1, 0.3)", kl_binary(0.1, 0.3), 0.1163217566, 1e-9));
    out.push_back(near("kl_upper_inverse(0.1, kl_binary(0.1, 0.3))", kl_upper_inverse(0.1, kl_binary(0.1, 0.3)), 0.3, 1e-9));

    {
        RiskProfile p = make_risk_profile({0.1, 0.3}, 50);
        BoundConfig cfg(Distance::Lin, 50, 0.05, Prior::uniform(2));
        SubsetSolution s = opt_lin_general_prior(p, cfg);
        out.push_back(near("lin general-prior q1, two classifiers", s.posterior->weights()[0], 2.0 / 3.0, 1e-12));
        auto [oq, ob] = brute_force_oracle(p, cfg, 300);
        out.push_back(near("lin general-prior bound vs grid oracle", s.bound.value, ob.value, 1e-3));
    }
    {
        RiskProfile p = make_risk_profile({0.1, 0.2, 0.3, 0.4}, 100);
        BoundConfig cfg(Distance::Lin, 100, 0.05, Prior::uniform(4));
        SubsetSolution s = opt_lin_subset(p, cfg, 2);
        out.push_back(near("lin subset worked example q1", s.posterior->weights()[0], 0.58006, 1e-5));
        out.push_back(near("lin subset worked example bound", s.closed_form_bound, 0.46225, 1e-5));
        out.push_back(near("lin subset bound self-consistency", s.bound.value, s.closed_form_bound, 1e-12));

        BoundConfig sq(Distance::Sq, 100, 0.05, Prior::uniform(4));
        SubsetSolution f = ordered_subset_search(p, sq);
        auto [oq, ob] = brute_force_oracle(p, sq, 100);
        out.push_back(near("sq fixed point vs grid oracle (4 classifiers)", f.bound.value, ob.value, 1e-3));
    }
    {
        RiskProfile p = make_risk_profile({0.1, 0.2}, 10);
        out.push_back(near("gibbs posterior q1", gibbs_kl_posterior(p, 10).weights()[0], 0.7310585786300049, 1e-12));
    }
    return out;
}

}  // namespace pacchi2
