#include "pacchi2/moments.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace pacchi2 {
namespace {

// log C(m,k) + k ln l + (m-k) ln(1-l), for k = 0..m.
std::vector<double> log_binomial_pmf(int m, double l) {
    std::vector<double> out(static_cast<std::size_t>(m) + 1);
    const double lg_m = std::lgamma(m + 1.0);
    const double ll = std::log(l);
    const double l1 = std::log1p(-l);
    for (int k = 0; k <= m; ++k)
        out[k] = lg_m - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + k * ll + (m - k) * l1;
    return out;
}

struct Maximum {
    double arg;
    double value;
};

// Grid scan then golden-section refinement on the bracket around the best node.
Maximum grid_then_golden(const std::function<double(double)>& f, double lo, double hi, int grid,
                         double width) {
    const double step = (hi - lo) / (grid - 1);
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i < grid; ++i) {
        double v = f(lo + i * step);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double a = lo + std::max(0, best - 1) * step;
    double b = lo + std::min(grid - 1, best + 1) * step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > width) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    Maximum out{lo + best * step, best_v};
    double mid = 0.5 * (a + b);
    double fm = f(mid);
    if (fm > out.value) out = {mid, fm};
    if (fc > out.value) out = {c, fc};
    if (fd > out.value) out = {d, fd};
    return out;
}

}  // namespace

MomentConstant i_r_lin(int m) {
    if (m < 1) throw std::invalid_argument("i_r_lin requires m >= 1");
    return {1.0 / (4.0 * m), 0.5, m, false};
}

MomentConstant i_r_sq(int m) {
    if (m < 2) throw std::invalid_argument("i_r_sq requires m >= 2");
    const double md = m;
    return {(12.0 * md - 11.0) / (16.0 * md * md * md), 0.5, m, false};
}

double sq_moment_objective(int m, double l) {
    if (l <= 0.0 || l >= 1.0) return 0.0;
    auto lw = log_binomial_pmf(m, l);
    double s = 0.0;
    for (int k = 0; k <= m; ++k) {
        double d = static_cast<double>(k) / m - l;
        s += std::exp(lw[k]) * d * d * d * d;
    }
    return s;
}

MomentConstant i_r_sq_direct(int m, int l_grid) {
    if (m < 2) throw std::invalid_argument("i_r_sq_direct requires m >= 2");
    if (l_grid < 1001) throw std::invalid_argument("i_r_sq_direct requires l_grid >= 1001");
    auto best = grid_then_golden([m](double l) { return sq_moment_objective(m, l); }, 0.0, 1.0,
                                 l_grid, 1e-9);
    return {best.value, best.arg, m, false};
}

double kl_moment_objective(int m, double l) {
    if (l <= 0.0 || l >= 1.0) throw std::invalid_argument("kl moment objective requires l in (0,1)");
    auto lw = log_binomial_pmf(m, l);
    const double ln_l = std::log(l);
    const double ln_1l = std::log1p(-l);
    double s = 0.0;
    for (int k = 0; k <= m; ++k) {
        double kl;
        if (k == 0) {
            kl = -ln_1l;
        } else if (k == m) {
            kl = -ln_l;
        } else {
            double p = static_cast<double>(k) / m;
            kl = p * (std::log(p) - ln_l) + (1.0 - p) * (std::log1p(-p) - ln_1l);
        }
        s += std::exp(lw[k]) * kl * kl;
    }
    return s;
}

MomentConstant i_r_kl(int m) {
    if (m < 2) throw std::invalid_argument("i_r_kl requires m >= 2");
    const bool capped = m > kKlMomentCap;
    const int me = capped ? kKlMomentCap : m;

    static std::mutex mu;
    static std::map<int, MomentConstant> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(me);
        if (it != cache.end()) {
            MomentConstant c = it->second;
            c.capped = capped;
            return c;
        }
    }
    // Symmetric in l <-> 1-l, so only the upper branch is searched.
    auto best = grid_then_golden([me](double l) { return kl_moment_objective(me, l); }, 0.5,
                                 1.0 - 1e-6, 4096, 1e-9);
    MomentConstant c{best.value, best.arg, me, false};
    {
        std::lock_guard<std::mutex> lock(mu);
        cache[me] = c;
    }
    c.capped = capped;
    return c;
}

}  // namespace pacchi2
