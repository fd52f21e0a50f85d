#include <doctest.h>

#include <stdexcept>

#include <random>

#include "pacchi2/risk.hpp"

using namespace pacchi2;

TEST_CASE("profile sorts stably and records the permutation") {
    RiskProfile p = make_risk_profile({0.3, 0.1, 0.2}, 100);
    CHECK(p.risks() == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(p.perm() == std::vector<std::size_t>{1, 2, 0});
    CHECK(p.m() == 100);

    RiskProfile tie = make_risk_profile({0.5, 0.5}, 10);
    CHECK(tie.perm() == std::vector<std::size_t>{0, 1});

    RiskProfile zeros = make_risk_profile(std::vector<double>(50, 0.0), 2257);
    CHECK(zeros.size() == 50);
    for (double r : zeros.risks()) CHECK(r == 0.0);
}

TEST_CASE("profile rejects bad input") {
    CHECK_THROWS_AS(make_risk_profile({}, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_risk_profile({0.2, 1.2}, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_risk_profile({-0.1}, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_risk_profile({0.1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_risk_profile({0.1, 0.2}, 5, {"a"}), std::invalid_argument);
}

TEST_CASE("sorting round-trips and is idempotent") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> k(0, 20);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> raw(17);
        for (double& r : raw) r = k(rng) / 20.0;
        RiskProfile p = make_risk_profile(raw, 20);
        CHECK(p.to_original(p.risks()) == raw);
        RiskProfile again = make_risk_profile(p.risks(), 20);
        CHECK(again.risks() == p.risks());
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            CHECK(p.risk(i) <= p.risk(i + 1));
            if (p.risk(i) == p.risk(i + 1)) CHECK(p.perm()[i] < p.perm()[i + 1]);
        }
    }
}

TEST_CASE("chi-squared divergence") {
    Prior u4 = Prior::uniform(4);
    CHECK(chi2_divergence(u4.weights(), u4) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(chi2_divergence(std::vector<double>{0, 0, 1, 0}, u4) == doctest::Approx(3.0));
    std::vector<double> q(10, 0.0);
    q[0] = q[1] = 0.5;
    CHECK(chi2_divergence(q, Prior::uniform(10)) == doctest::Approx(4.0));
    CHECK_THROWS(chi2_divergence(q, u4));

    std::mt19937_64 rng(9);
    std::exponential_distribution<double> e(1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(6), b(6);
        double sa = 0, sb = 0;
        for (int i = 0; i < 6; ++i) {
            sa += a[i] = e(rng);
            sb += b[i] = e(rng);
        }
        for (int i = 0; i < 6; ++i) {
            a[i] /= sa;
            b[i] /= sb;
        }
        Prior p(b);
        CHECK(chi2_divergence(a, p) > 0.0);
        CHECK(chi2_divergence(b, p) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("prior and posterior validation") {
    CHECK_THROWS(Prior(std::vector<double>{0.5, 0.5, 0.0}));
    CHECK_THROWS(Prior(std::vector<double>{0.5, 0.6}));
    CHECK(Prior(std::vector<double>{0.25, 0.25, 0.25, 0.25}).is_uniform());
    CHECK_FALSE(Prior(std::vector<double>{0.5, 0.25, 0.25}).is_uniform());

    CHECK_THROWS(Posterior({0.5, 0.5 + 2e-10}, Method::BruteForce));
    CHECK_NOTHROW(Posterior({0.5, 0.5 + 5e-11}, Method::BruteForce));
    CHECK_THROWS(Posterior({1.1, -0.1}, Method::BruteForce));
    Posterior q({0.6, 0.4, 0.0, 0.0}, Method::LinClosedForm);
    CHECK(q.support_size() == 2);
    CHECK(Posterior::uniform(5, 3, Method::SqFP).support_size() == 3);
    CHECK(Posterior::degenerate(4, 0, Method::KlFP).weights()[0] == 1.0);
}

TEST_CASE("bound config invariants") {
    CHECK_THROWS(BoundConfig(Distance::Lin, 1, 0.05, Prior::uniform(2)));
    CHECK_THROWS(BoundConfig(Distance::Lin, 10, 0.0, Prior::uniform(2)));
    CHECK_THROWS(BoundConfig(Distance::Lin, 10, 1.0, Prior::uniform(2)));
    CHECK_NOTHROW(BoundConfig(Distance::Kl, 2, 0.5, Prior::uniform(2)));
    CHECK(parse_distance("kl") == Distance::Kl);
    CHECK_THROWS(parse_distance("l2"));
}
