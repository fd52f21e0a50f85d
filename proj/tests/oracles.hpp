// Test-side reference computations, written independently of the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "pacchi2/dataset.hpp"

namespace oracle {

// E[(k/m - l)^4] for k ~ Bin(m, l) by the pmf recurrence in long double.
inline long double binomial_fourth_moment(int m, long double l) {
    long double pk = std::pow(1.0L - l, m);
    const long double ratio = l / (1.0L - l);
    long double s = 0.0L;
    for (int k = 0; k <= m; ++k) {
        long double d = static_cast<long double>(k) / m - l;
        s += pk * d * d * d * d;
        pk *= ratio * static_cast<long double>(m - k) / static_cast<long double>(k + 1);
    }
    return s;
}

inline double kl(double p, double q) {
    double a = p > 0 ? p * std::log(p / q) : 0.0;
    double b = p < 1 ? (1 - p) * std::log((1 - p) / (1 - q)) : 0.0;
    return a + b;
}

// Right root of kl(p, r) = eps by plain bisection on [p, 1).
inline double kl_right_root(double p, double eps) {
    double lo = p, hi = 1.0 - 1e-12;
    if (kl(p, hi) <= eps) return hi;
    for (int i = 0; i < 400; ++i) {
        double mid = 0.5 * (lo + hi);
        (kl(p, mid) <= eps ? lo : hi) = mid;
    }
    return lo;
}

// Bounds written out from their definitions under a uniform prior.
inline double bound_lin(const std::vector<double>& q, const std::vector<double>& l, int m, double delta) {
    double e = 0, s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        e += q[i] * l[i];
        s += q[i] * q[i] * q.size();
    }
    return e + std::sqrt(s / (4.0 * m * delta));
}

inline double bound_sq(const std::vector<double>& q, const std::vector<double>& l, int m, double delta) {
    double e = 0, s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        e += q[i] * l[i];
        s += q[i] * q[i] * q.size();
    }
    double md = m;
    return e + std::pow(s * (12 * md - 11) / (16 * md * md * md * delta), 0.25);
}

inline double bound_kl(const std::vector<double>& q, const std::vector<double>& l, int m, double delta,
                       double moment) {
    double e = 0, s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        e += q[i] * l[i];
        s += q[i] * q[i] * q.size();
    }
    return kl_right_root(e, std::sqrt(s * moment / delta));
}

// Directional derivative of f along e_i - e_j by central differences.
inline double directional(const std::function<double(const std::vector<double>&)>& f, std::vector<double> q,
                          std::size_t i, std::size_t j, double h = 1e-6) {
    q[i] += h;
    q[j] -= h;
    double up = f(q);
    q[i] -= 2 * h;
    q[j] += 2 * h;
    double dn = f(q);
    return (up - dn) / (2 * h);
}

// Two Gaussian blobs with centers at +-offset on every axis.
inline pacchi2::Dataset blobs(std::size_t n, std::size_t dim, double offset, double sd, std::uint64_t seed,
                              const char* name) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        int label = i % 2 == 0 ? 1 : -1;
        for (std::size_t c = 0; c < dim; ++c) x.push_back(label * offset + z(rng));
        y.push_back(label);
    }
    return pacchi2::make_dataset(name, dim, std::move(x), std::move(y));
}

inline pacchi2::Dataset separable_blobs(std::uint64_t seed = 11) { return blobs(400, 2, 3.0, 0.5, seed, "separable"); }
inline pacchi2::Dataset overlapping_blobs(std::uint64_t seed = 12) { return blobs(400, 2, 0.5, 1.0, seed, "overlapping"); }

}  // namespace oracle
