#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pacchi2/moments.hpp"
#include "pacchi2/posterior_opt.hpp"

using namespace pacchi2;

namespace {

BoundConfig uniform_cfg(Distance d, std::size_t h, int m, double delta) {
    return BoundConfig(d, m, delta, Prior::uniform(h));
}

std::vector<double> random_risks(std::mt19937_64& rng, std::size_t h, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> l(h);
    for (double& x : l) x = u(rng);
    return l;
}

void check_monotone(const std::vector<double>& q, const RiskProfile& p) {
    for (std::size_t i = 0; i + 1 < q.size(); ++i)
        if (p.risk(i) < p.risk(i + 1)) CHECK(q[i] >= q[i + 1] - 1e-15);
}

}  // namespace

TEST_CASE("general-prior linear closed form") {
    auto eq = make_risk_profile({0.3, 0.3, 0.3}, 40);
    Prior pr(std::vector<double>{0.5, 0.3, 0.2});
    BoundConfig c(Distance::Lin, 40, 0.05, pr);
    auto s = opt_lin_general_prior(eq, c);
    REQUIRE(s.feasible);
    for (int i = 0; i < 3; ++i) CHECK(s.posterior->weights()[i] == doctest::Approx(pr[i]).epsilon(1e-15));

    auto two = make_risk_profile({0.1, 0.3}, 50);
    auto t = opt_lin_general_prior(two, uniform_cfg(Distance::Lin, 2, 50, 0.05));
    REQUIRE(t.feasible);
    CHECK(t.posterior->weights()[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(t.posterior->weights()[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(t.bound.value == doctest::Approx(t.closed_form_bound).epsilon(1e-14));

    auto wide = make_risk_profile({0.0, 0.9}, 500);
    auto w = opt_lin_general_prior(wide, uniform_cfg(Distance::Lin, 2, 500, 0.1));
    CHECK_FALSE(w.defined);
    CHECK_FALSE(w.posterior.has_value());
}

TEST_CASE("general-prior closed form is a stationary point of the bound") {
    std::mt19937_64 rng(21);
    std::exponential_distribution<double> e(1.0);
    int tested = 0;
    for (int t = 0; t < 200 && tested < 25; ++t) {
        const std::size_t h = 3 + t % 4;
        std::vector<double> pw(h);
        double s = 0;
        for (double& x : pw) s += x = e(rng);
        for (double& x : pw) x /= s;
        auto l = random_risks(rng, h, 0.1, 0.3);
        auto prof = make_risk_profile(l, 60);
        BoundConfig c(Distance::Lin, 60, 0.05, Prior(pw));
        auto sol = opt_lin_general_prior(prof, c);
        if (!sol.feasible) continue;
        ++tested;
        auto f = [&](const std::vector<double>& q) {
            double emp = 0, k = 0;
            for (std::size_t i = 0; i < h; ++i) {
                emp += q[i] * prof.risk(i);
                k += q[i] * q[i] / pw[i];
            }
            return emp + std::sqrt(k / (4.0 * 60 * 0.05));
        };
        for (std::size_t i = 1; i < h; ++i) CHECK(std::abs(oracle::directional(f, sol.posterior->weights(), i, 0)) < 1e-6);
    }
    CHECK(tested >= 10);
}

TEST_CASE("general-prior closed form against the grid oracle") {
    std::mt19937_64 rng(4);
    int tested = 0;
    for (int t = 0; t < 40; ++t) {
        const std::size_t h = 2 + t % 2;
        auto prof = make_risk_profile(random_risks(rng, h, 0.05, 0.35), 80);
        auto c = uniform_cfg(Distance::Lin, h, 80, 0.05);
        auto sol = opt_lin_general_prior(prof, c);
        if (!sol.feasible) continue;
        ++tested;
        auto [q, b] = brute_force_oracle(prof, c, 300);
        CHECK(sol.bound.value <= b.value + 1e-12);
        CHECK(sol.bound.value >= b.value - 1e-3);
    }
    CHECK(tested > 5);
}

TEST_CASE("ordered-subset linear closed form") {
    auto p = make_risk_profile({0.1, 0.2, 0.3, 0.4}, 100);
    auto c = uniform_cfg(Distance::Lin, 4, 100, 0.05);
    auto s = opt_lin_subset(p, c, 2);
    REQUIRE(s.feasible);
    CHECK(s.posterior->weights()[0] == doctest::Approx(0.5800640769025436).epsilon(1e-13));
    CHECK(s.posterior->weights()[1] == doctest::Approx(1 - 0.5800640769025436).epsilon(1e-13));
    CHECK(s.posterior->weights()[2] == 0.0);
    CHECK(s.closed_form_bound == doctest::Approx(0.46224989991991994).epsilon(1e-13));
    CHECK(std::abs(s.bound.value - s.closed_form_bound) < 1e-12);
    CHECK(s.posterior->support_size() == 2);

    auto eq = make_risk_profile(std::vector<double>(5, 0.2), 30);
    auto u = opt_lin_subset(eq, uniform_cfg(Distance::Lin, 5, 30, 0.1), 5);
    for (double w : u.posterior->weights()) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(u.closed_form_bound == doctest::Approx(0.2 + std::sqrt(1.0 / 12)).epsilon(1e-14));

    // Infeasible: the fourth weight would be negative.
    auto spread = make_risk_profile({0.0, 0.0, 0.0, 0.9}, 200);
    auto bad = opt_lin_subset(spread, uniform_cfg(Distance::Lin, 4, 10, 0.05), 4);
    CHECK(bad.defined);
    CHECK_FALSE(bad.feasible);
    auto undef = opt_lin_subset(spread, uniform_cfg(Distance::Lin, 4, 200, 0.05), 4);
    CHECK_FALSE(undef.defined);
    CHECK_FALSE(undef.feasible);

    CHECK_THROWS(opt_lin_subset(p, c, 1));
    CHECK_THROWS(opt_lin_subset(p, c, 5));
    CHECK_THROWS(opt_lin_subset(p, BoundConfig(Distance::Lin, 100, 0.05, Prior({0.4, 0.2, 0.2, 0.2})), 2));
}

TEST_CASE("squared-distance fixed point") {
    auto eq = make_risk_profile(std::vector<double>(6, 0.25), 50);
    auto [u, st] = fp_sq_subset(eq, uniform_cfg(Distance::Sq, 6, 50, 0.05), 4);
    CHECK(st.converged);
    CHECK(st.iteration <= 2);
    for (int i = 0; i < 4; ++i) CHECK(u.posterior->weights()[i] == doctest::Approx(0.25).epsilon(1e-15));

    auto p = make_risk_profile({0.1, 0.2, 0.3, 0.4}, 100);
    auto c = uniform_cfg(Distance::Sq, 4, 100, 0.05);
    auto best = ordered_subset_search(p, c);
    // Reference: scipy SLSQP over every ordered support.
    CHECK(best.bound.value == doctest::Approx(0.3718897304154263).epsilon(1e-9));
    CHECK(best.h_prime == 2);
    CHECK(best.posterior->weights()[0] == doctest::Approx(0.75453559).epsilon(1e-6));
    auto [oq, ob] = brute_force_oracle(p, c, 100);
    CHECK(best.bound.value <= ob.value + 1e-9);
    CHECK(best.bound.value >= ob.value - 1e-3);
    std::vector<double> uni(4, 0.25);
    CHECK(best.bound.value < evaluate_bound(uni, c, p).value);

    auto spread = make_risk_profile({0.0, 0.0, 0.0, 0.9}, 10);
    auto [inf, ist] = fp_sq_subset(spread, uniform_cfg(Distance::Sq, 4, 10, 0.05), 4);
    CHECK_FALSE(inf.feasible);
    CHECK_FALSE(inf.posterior.has_value());
}

TEST_CASE("kl-distance fixed point") {
    auto eq = make_risk_profile(std::vector<double>(5, 0.3), 60);
    auto [u, st] = fp_kl_subset(eq, uniform_cfg(Distance::Kl, 5, 60, 0.05), 5);
    CHECK(st.converged);
    for (double w : u.posterior->weights()) CHECK(w == doctest::Approx(0.2).epsilon(1e-12));

    auto zero = make_risk_profile(std::vector<double>(5, 0.0), 60);
    auto c0 = uniform_cfg(Distance::Kl, 5, 60, 0.05);
    auto [z, zst] = fp_kl_subset(zero, c0, 5);
    CHECK(zst.converged);
    for (double w : z.posterior->weights()) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(z.bound.value == doctest::Approx(1 - std::exp(-std::sqrt(i_r_kl(60).value / 0.05))).epsilon(1e-11));

    auto p = make_risk_profile({0.1, 0.2, 0.3, 0.4}, 50);
    auto c = uniform_cfg(Distance::Kl, 4, 50, 0.05);
    auto best = ordered_subset_search(p, c);
    CHECK(best.bound.value == doctest::Approx(0.3519509014278694).epsilon(1e-9));
    CHECK(best.posterior->weights()[0] == doctest::Approx(0.88031667).epsilon(1e-6));
    auto [oq, ob] = brute_force_oracle(p, c, 100);
    CHECK(std::abs(best.bound.value - ob.value) < 2e-3);
    std::vector<double> uni(4, 0.25);
    CHECK(best.bound.value <= evaluate_bound(uni, c, p).value);
}

TEST_CASE("fixed points are stationary, idempotent and monotone") {
    std::mt19937_64 rng(33);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        const std::size_t h = 4 + t % 5;
        auto prof = make_risk_profile(random_risks(rng, h, 0.05, 0.45), 150);
        for (Distance d : {Distance::Sq, Distance::Kl}) {
            auto c = uniform_cfg(d, h, 150, 0.05);
            for (std::size_t hp = 2; hp <= h; ++hp) {
                auto [sol, st] = d == Distance::Sq ? fp_sq_subset(prof, c, hp) : fp_kl_subset(prof, c, hp);
                if (!sol.feasible) continue;
                ++checked;
                const auto& q = sol.posterior->weights();
                check_monotone(q, prof);
                std::vector<double> sup(q.begin(), q.begin() + hp);
                auto again = d == Distance::Sq ? sq_fp_map(prof, c, sup) : kl_fp_map(prof, c, sup);
                double diff = 0;
                for (std::size_t i = 0; i < hp; ++i) diff = std::max(diff, std::abs(again[i] - sup[i]));
                CHECK(diff < 1e-10);
                auto f = [&](const std::vector<double>& x) { return evaluate_bound(x, c, prof).value; };
                for (std::size_t i = 1; i < hp; ++i) CHECK(std::abs(oracle::directional(f, q, i, 0)) < 2e-5);
            }
        }
    }
    CHECK(checked > 40);
}

TEST_CASE("flipped kl sign is available for diagnostics and favors riskier classifiers") {
    auto p = make_risk_profile({0.1, 0.2, 0.3, 0.4}, 50);
    auto c = uniform_cfg(Distance::Kl, 4, 50, 0.05);
    std::vector<double> u(4, 0.25);
    auto std_map = kl_fp_map(p, c, u, KlSign::Standard);
    auto flip = kl_fp_map(p, c, u, KlSign::Flipped);
    CHECK(std_map[0] > std_map[3]);
    CHECK(flip[0] < flip[3]);
}

TEST_CASE("ordered-subset search") {
    auto eq = make_risk_profile(std::vector<double>(7, 0.2), 90);
    for (Distance d : {Distance::Lin, Distance::Sq, Distance::Kl}) {
        auto s = ordered_subset_search(eq, uniform_cfg(d, 7, 90, 0.05));
        CHECK(s.h_prime == 7);
        for (double w : s.posterior->weights()) CHECK(w == doctest::Approx(1.0 / 7).epsilon(1e-10));
    }

    // Linear bound decreases in H' until the first infeasible size.
    std::vector<double> l;
    for (int i = 0; i < 40; ++i) l.push_back(0.05 + 0.01 * i);
    auto prof = make_risk_profile(l, 100);
    auto c = uniform_cfg(Distance::Lin, 40, 100, 0.05);
    std::vector<SubsetSolution> sweep;
    auto best = ordered_subset_search(prof, c, SearchMode::Exhaustive, &sweep);
    std::size_t last_feasible = 1;
    double prev = 1e9;
    for (const auto& s : sweep) {
        if (!s.feasible) break;
        CHECK(s.bound.value < prev);
        prev = s.bound.value;
        last_feasible = s.h_prime;
    }
    CHECK(best.h_prime == last_feasible);
    CHECK(best.h_prime < 40);
    auto brk = ordered_subset_search(prof, c, SearchMode::BreakAtInfeasible);
    CHECK(brk.h_prime == best.h_prime);
    auto fast = ordered_subset_search(prof, c, SearchMode::WarmStart);
    CHECK(fast.h_prime == best.h_prime);

    // Exhaustive search equals the minimum over an explicit sweep.
    std::mt19937_64 rng(8);
    auto p6 = make_risk_profile(random_risks(rng, 6, 0.0, 0.5), 70);
    auto c6 = uniform_cfg(Distance::Sq, 6, 70, 0.05);
    auto s6 = ordered_subset_search(p6, c6);
    double m6 = evaluate_bound(Posterior::degenerate(6, 0, Method::SqFP), c6, p6).value;
    for (std::size_t hp = 2; hp <= 6; ++hp) {
        auto [sol, st] = fp_sq_subset(p6, c6, hp);
        if (sol.feasible) m6 = std::min(m6, sol.bound.value);
    }
    CHECK(s6.bound.value == m6);
}

TEST_CASE("warm start") {
    auto zero = make_risk_profile(std::vector<double>(10, 0.0), 100);
    CHECK(warm_start_h(zero, uniform_cfg(Distance::Lin, 10, 100, 0.05)) == 10);
    auto half = make_risk_profile(std::vector<double>(100, 0.5), 100);
    CHECK(warm_start_h(half, uniform_cfg(Distance::Lin, 100, 100, 0.05)) == 20);
    auto two = make_risk_profile({0.9, 0.9}, 2);
    CHECK(warm_start_h(two, uniform_cfg(Distance::Lin, 2, 2, 0.9)) == 2);
}

TEST_CASE("Gibbs posterior") {
    auto eq = make_risk_profile(std::vector<double>(4, 0.3), 100);
    auto ge = gibbs_kl_posterior(eq, 100);
    for (double w : ge.weights()) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    auto p = make_risk_profile({0.1, 0.2}, 10);
    auto g = gibbs_kl_posterior(p, 10);
    CHECK(g.weights()[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
    CHECK(g.weights()[1] == doctest::Approx(0.2689414213699951).epsilon(1e-14));

    std::vector<double> l;
    for (int i = 0; i < 50; ++i) l.push_back(0.01 * i);
    auto spread = make_risk_profile(l, 1840);
    auto s = gibbs_kl_posterior(spread, 1840);
    CHECK(s.weights()[0] > 1 - 1e-7);
    // Positive wherever exp(-m * gap) is representable.
    for (std::size_t i = 0; i < 50; ++i)
        if (1840.0 * spread.risk(i) < 700.0) CHECK(s.weights()[i] > 0.0);
    auto mid = gibbs_kl_posterior(make_risk_profile(l, 100), 100);
    CHECK(mid.support_size() == 50);
    for (std::size_t i = 0; i + 1 < 50; ++i) CHECK(mid.weights()[i] > mid.weights()[i + 1]);

    auto ties = make_risk_profile({0.3, 0.1, 0.1, 0.5}, 20);
    auto gt = gibbs_kl_posterior(ties, 20);
    CHECK(std::max_element(gt.weights().begin(), gt.weights().end()) - gt.weights().begin() == 0);
}

TEST_CASE("brute-force oracle guards") {
    auto one = make_risk_profile({0.3}, 20);
    auto [q, b] = brute_force_oracle(one, uniform_cfg(Distance::Lin, 1, 20, 0.05), 50);
    CHECK(q.weights()[0] == 1.0);
    CHECK(b.value == doctest::Approx(0.3 + std::sqrt(1.0 / 4.0)).epsilon(1e-14));
    auto five = make_risk_profile({0.1, 0.2, 0.3, 0.4, 0.5}, 20);
    CHECK_THROWS(brute_force_oracle(five, uniform_cfg(Distance::Lin, 5, 20, 0.05), 10));
    CHECK_THROWS(brute_force_oracle(one, uniform_cfg(Distance::Lin, 1, 20, 0.05), 401));
}

TEST_CASE("non-convexity witness and quasi-convexity predicate") {
    auto w = sq_nonconvexity_witness();
    CHECK(w.lhs == doctest::Approx(6.087086).epsilon(1e-6));
    CHECK(w.rhs == doctest::Approx(6.172964).epsilon(1e-6));
    CHECK(check_sq_nonconvexity_witness());

    Prior u = Prior::uniform(10);
    auto same = sq_convexity_sides(u.weights(), u.weights(), u);
    CHECK(same.lhs == doctest::Approx(same.rhs).epsilon(1e-15));
    CHECK_FALSE(same.violated);
    std::mt19937_64 rng(2);
    std::exponential_distribution<double> e(1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> q(10);
        double s = 0;
        for (double& x : q) s += x = e(rng);
        for (double& x : q) x /= s;
        auto r = sq_convexity_sides(q, q, u);
        CHECK(r.lhs >= r.rhs * (1 - 1e-14));
    }

    std::vector<double> l = {0.1, 0.2, 0.3, 0.4};
    Prior p4 = Prior::uniform(4);
    std::vector<double> a = {0.4, 0.3, 0.2, 0.1}, b = {0.1, 0.2, 0.3, 0.4};
    CHECK_FALSE(check_sq_quasiconvexity_condition(a, a, p4, l, 100, 0.05, 0.5));
    // Moving from a riskier posterior toward an equally concentrated safer one.
    CHECK(check_sq_quasiconvexity_condition(b, a, p4, l, 100, 0.05, 0.5));
    CHECK(check_sq_quasiconvexity_condition(b, a, p4, l, 100, 0.05, 0.999));
    CHECK_THROWS(check_sq_quasiconvexity_condition(a, b, p4, l, 100, 0.05, 1.0));
}
