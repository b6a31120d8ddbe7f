#ifndef OKDV_FOURIER_HPP
#define OKDV_FOURIER_HPP

#include <utility>
#include <vector>

#include "okdv/psdo.hpp"
#include "okdv/series.hpp"

namespace okdv {

// u = 1 throughout this module.

// (m-1)!! z^{-m/2} for even m, zero for odd m.
struct GaussianMoment {
    int z_exp = 0;
    Rat value;
};
GaussianMoment gaussian_moment(int m);

// e^{s^3/6} * f_tilde with the polynomial part's s-degree recorded.
struct AdmissibleSeries {
    Series f_tilde;
    int s_bound = 0;
};

// Repackages tau (a series in t and s at u = 1) by dividing out e^{s^3/6}
// at the series level: f_tilde = e^{-s^3/6} tau, truncated to s <= s_bound.
AdmissibleSeries make_admissible(const Series& tau, int s_bound);

// Phi[f](z) = sum_k (i/6)^k/k! <f_tilde(-is+z) s^{3k}>_z with the Gaussian
// moments above. Output over `target` (same t variables, z instead of s),
// exact for z >= z_floor; every coefficient is a real rational (the i-powers
// cancel pairwise, asserted per term).
Series fourier_transform(const AdmissibleSeries& f, SpacePtr target, int z_floor);

// The t-shift t_i -> t_i - (2i-1)!! z^{-2i-1} applied to a u=1 series that
// already lives in the target space.
Series gz_shift(const Series& f);

// xi^c = sum t_i z^{2i+1}/(2i+1)!!, plus sum s_n z^{2n+2}/(2n+2)!! when the
// space carries s variables and with_s is set.
Series xi_series(SpacePtr sp, const Region& rg, bool with_s);

// G_z[tau^c] e^{xi^c} over `target` (t and z), certified to t-weight t_cap
// and deficiency tau_c's solved weight.
Series shift_and_dress(const Series& tau_c, SpacePtr target, int t_cap);

// psi = (G_z[tau^c]/tau^c) e^{xi} over a (t, s_*, z) space.
Series wave_function(const Series& Fc, SpacePtr target, int t_cap,
                     const std::vector<int>& sn_caps);

// Phi[tau^o] - G_z[tau^c] e^{xi^c}: the wave-function identity residual.
// tau_o lives in (t, s); tau_c is the closed partition function (with u).
Series check_wave_identity(const Series& tau_o, const Series& tau_c, SpacePtr target,
                           int t_cap, int s_bound, int z_floor);

// residual_t = d psi/dt_n - (1/(2n+1)!!) (L^{n+1/2})_+ psi
// residual_s = d psi/ds_n - (1/(2^{n+1}(n+1)!)) L^{n+1} psi
// with L = d_x^2 + 2 F^c_{t_0 t_0}.
struct WaveFlowResiduals {
    Series residual_t;
    Series residual_s;
};
WaveFlowResiduals check_wave_flows(const Series& psi, const Series& Fc, int n, int depth);

// -(z^{-1} d/dz - 1/(2z^2) - z) applied to a wave slice; the operator image
// of multiplication by s under Phi.
Series fourier_mul_image(const Series& w);

// L_n(W) - (z^{2n+2}/2^{n+1} (z^{-1} d/dz - 1/(2z^2) - z)
//           + (n+1)/2^{n+2} z^{2n}) W  for W = G_z[tau^c] e^{xi^c}.
Series check_virasoro_fourier(const Series& w, int n);

}  // namespace okdv

#endif
