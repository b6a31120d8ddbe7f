#ifndef OKDV_OPEN_HPP
#define OKDV_OPEN_HPP

#include <utility>
#include <vector>

#include "okdv/closed.hpp"
#include "okdv/correlators.hpp"
#include "okdv/series.hpp"

namespace okdv {

struct OpenBounds {
    int d_t = 6;
    int s_cap = 4;
    std::vector<int> sn_caps;  // caps for s_1, s_2, ... ; empty = not extended

    bool extended() const { return !sn_caps.empty(); }
};

// Same series viewed in a larger space (fresh variables enter with zero
// exponent and unlimited certified caps).
Series embed(const Series& a, SpacePtr target);

// F^c re-spaced for use alongside open-sector series: t-variables the
// target lacks are restricted to zero first (their monomials cannot be
// expressed there), the certified caps carry over.
Series closed_into(const Series& Fc, SpacePtr target);

// The space the open solvers work in.
SpacePtr open_space(const OpenBounds& b);

// Open Virasoro operator on a series:
//   cal L_n = L_n + u^n s d^{n+1}/ds^{n+1} + ((3n+3)/4) u^n d^n/ds^n
// extended variant:
//   cal L_n^ext = L_n + sum_i ((i+n+1)!/i!) s_i d/ds_{n+i}
//                 + u (3(n+1)!/4) d/ds_{n-1} + delta_{n,-1} u^{-1} s
//                 + delta_{n,0} 3/4,   with d/ds_{-2} = d/ds_{-1} = 0.
Series open_virasoro_apply(int n, const Series& g, bool extended);

// e^{-F} cal L_n e^{F} for F = F^c + F^o (non-extended operator).
Series open_virasoro_conjugated(int n, const Series& F);

// Route A: triangular solve of cal L_n e^{F^c+F^o} = 0 from the pure-s
// initial condition F^o|_{t=0} = u^{-1} s^3/6. Returns F^o.
Series solve_open_virasoro(const Series& Fc, const OpenBounds& b,
                           SolveOrder order = SolveOrder::MinIndex);

// Route B: staged integration of the Burgers-KdV flows
//   F_s = u (F_{t_0}^2/2 + F_{t_0 t_0}/2 + F^c_{t_0 t_0})
//   (2n+1)/(2u^2) F_{t_n} = (d^2/2 + F_{t_0} d + F_{t_0}^2/2 + F_{t_0 t_0}/2
//                            + F^c_{t_0 t_0}) F_{t_{n-1}}
//                           + F_{t_0} F^c_{t_0 t_{n-1}}/2 + (3/4) F^c_{t_0 t_0 t_{n-1}}
// and, when extended, (n+1)/u^2 F_{s_n} = (same operator) F_{s_{n-1}},
// all from the initial slice F|_{t_{>=1}=0, s_*=0} = 0. Returns F^o
// (extended: F^{o,ext}).
Series evolve_burgers_kdv(const Series& Fc, const OpenBounds& b, bool extended);

// Residual of the open KdV equation, n >= 1:
//   (2n+1) u^{-1} <<tau_n>>^o - u <<tau_{n-1} tau_0>>^c <<tau_0>>^o
//   + (u/2) <<tau_{n-1} tau_0^2>>^c - 2 <<tau_{n-1}>>^o <<sigma>>^o
//   - 2 <<tau_{n-1} sigma>>^o
Series check_open_kdv(const Series& Fo, const Series& Fc, int n);

// Residuals of the open string and open dilaton equations.
std::pair<Series, Series> check_open_string_dilaton(const Series& Fo);

// Residual of d tau/ds_n - u^n/(n+1)! d^{n+1} tau / ds_0^{n+1}, n >= 1.
Series check_sn_reduction(const Series& tau_ext, int n);

// Flow residuals, asserted on the evolved answer instead of trusting
// compatibility of the staging order.
Series check_s_flow(const Series& F, const Series& Fc);
Series check_t_flow(const Series& F, const Series& Fc, int n);
Series check_higher_s_flow(const Series& F, const Series& Fc, int n);

}  // namespace okdv

#endif
