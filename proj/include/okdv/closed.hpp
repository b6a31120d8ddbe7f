#ifndef OKDV_CLOSED_HPP
#define OKDV_CLOSED_HPP

#include "okdv/correlators.hpp"
#include "okdv/series.hpp"

namespace okdv {

// Virasoro operator L_n, n >= -1, applied to a series. When the space
// carries u the u^2 / u^{-2} factors are attached; otherwise u = 1.
//
//   L_{-1} = -d/dt_0 + sum t_{i+1} d/dt_i + u^{-2} t_0^2 / 2
//   L_0    = -(3/2) d/dt_1 + sum (2i+1)/2 t_i d/dt_i + 1/16
//   L_n    = -((2n+3)!!/2^{n+1}) d/dt_{n+1}
//            + sum ((2i+2n+1)!!/(2i-1)!!/2^{n+1}) t_i d/dt_{i+n}
//            + (u^2/2) sum_{i=0}^{n-1} ((2i+1)!!(2n-2i-1)!!/2^{n+1}) d^2/dt_i dt_{n-1-i}
Series virasoro_apply(int n, const Series& g);

// e^{-F} L_n e^{F}, expanded in derivatives of F. The solver consumes the
// coefficients of this series; checkers use it too since L_n e^F = 0 iff
// this vanishes.
Series virasoro_conjugated(int n, const Series& F);

enum class SolveOrder { MinIndex, MaxIndex };

struct ClosedSolveResult {
    Series F;  // over (t_0..t_a, u), F|_{t=0} = 0
    ClosedCorrelatorTable table;
};

// Determines F^c coefficient-by-coefficient from L_n e^{F} = 0, increasing
// t-weight; each constraint's leading derivative term isolates exactly one
// new coefficient. `order` picks which variable of a target monomial's
// constraint to consume (the result must not depend on it).
ClosedSolveResult solve_closed_free_energy(int d_t, SolveOrder order = SolveOrder::MinIndex);

// Residual of the KdV equation, n >= 1:
//   (2n+1) u^{-2} <<tau_n tau_0^2>> - <<tau_{n-1} tau_0>><<tau_0^3>>
//     - 2 <<tau_{n-1} tau_0^2>><<tau_0^2>> - (1/4) <<tau_{n-1} tau_0^4>>
Series check_kdv(const Series& F, int n);

// Residual of dF/dt_0 - sum t_{i+1} dF/dt_i - t_0^2/(2u^2).
Series check_string(const Series& F);

// Repeated t-derivative <<tau_{a_1}...tau_{a_l}>> = d^l F / dt_{a_1}..dt_{a_l}.
Series double_bracket(const Series& F, const std::vector<int>& a);

// Comparison window covering everything a residual series certifies.
CmpWindow full_window(const Series& s);

}  // namespace okdv

#endif
