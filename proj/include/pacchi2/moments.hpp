#pragma once

namespace pacchi2 {

struct MomentConstant {
    double value = 0.0;
    double maximizer_l = 0.5;
    int m_effective = 0;
    bool capped = false;
};

// Largest m for which the kl constant is computed; larger m reuse it.
inline constexpr int kKlMomentCap = 1028;

MomentConstant i_r_lin(int m);
MomentConstant i_r_sq(int m);
// Numerical supremum over l of E[(k/m - l)^4], k ~ Bin(m, l). Oracle for i_r_sq.
MomentConstant i_r_sq_direct(int m, int l_grid = 1001);
// Supremum over l of E[kl(k/m, l)^2], k ~ Bin(m, l). Cached per m.
MomentConstant i_r_kl(int m);

// The function maximized by i_r_kl, exposed for symmetry checks.
double kl_moment_objective(int m, double l);
// Binomial fourth central moment of k/m at l.
double sq_moment_objective(int m, double l);

}  // namespace pacchi2
