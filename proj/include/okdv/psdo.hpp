#ifndef OKDV_PSDO_HPP
#define OKDV_PSDO_HPP

#include <map>

#include "okdv/series.hpp"

namespace okdv {

// Laurent series in d_x with truncated-series coefficients; x == t_0.
// `floor` is the lowest order whose coefficient is certified: products of
// clipped operators lose certification below max(floor_a + top_b,
// floor_b + top_a), exactly like a z-window.
class PseudoDiffOp {
public:
    PseudoDiffOp(SpacePtr space, int floor) : space_(std::move(space)), floor_(floor) {}

    const VariableSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    const std::map<int, Series>& coef() const { return coef_; }
    int floor_order() const { return floor_; }
    int top_order() const { return coef_.empty() ? floor_ : coef_.rbegin()->first; }
    void set_floor(int f) { floor_ = f; }

    void set_coef(int order, Series s);
    // Throws TruncationError below the certified floor.
    Series order_coefficient(int order) const;
    bool empty() const { return coef_.empty(); }

private:
    SpacePtr space_;
    std::map<int, Series> coef_;
    int floor_;
};

// d_x^k with unit coefficient (region rg on the coefficient).
PseudoDiffOp psdo_dx(SpacePtr sp, const Region& rg, int k, int floor);
// f(t) as an order-zero operator.
PseudoDiffOp psdo_of_series(const Series& f, int floor);

PseudoDiffOp psdo_add(const PseudoDiffOp& a, const PseudoDiffOp& b);
PseudoDiffOp psdo_scale(const PseudoDiffOp& a, const Rat& c);

// Composition via d_x^k o f = sum_l k(k-1)...(k-l+1)/l! (d^l f/dx^l) d_x^{k-l}.
PseudoDiffOp psdo_mul(const PseudoDiffOp& a, const PseudoDiffOp& b);

// Non-negative orders; idempotent.
PseudoDiffOp psdo_plus(const PseudoDiffOp& a);

PseudoDiffOp psdo_pow(const PseudoDiffOp& a, int p);

// Unique R = d_x + sum_{n>=0} r_n d_x^{-n} with R^m = A, for
// A = d_x^m + (orders <= m-2). Coefficients computed down to d_x^{-depth}.
PseudoDiffOp psdo_root(const PseudoDiffOp& a, int m, int depth);

// Independent m=2 extraction by direct order-matching of R^2 = A; used as
// the implementation-independence oracle for psdo_root.
PseudoDiffOp psdo_sqrt_direct(const PseudoDiffOp& a, int depth);

// Apply a purely differential operator (floor of stored orders >= 0).
Series psdo_apply(const PseudoDiffOp& a, const Series& f);

// residual_t = d e^{F^o}/dt_n - (1/(2n+1)!!) (L^{n+1/2})_+ e^{F^o}
// residual_s = d e^{F^o}/ds - (1/2) L e^{F^o},  L = d_x^2 + F^c_{t_0 t_0},
// everything at u = 1.
struct LaxResiduals {
    Series residual_t;
    Series residual_s;
};
LaxResiduals check_lax_flows(const Series& Fo, const Series& Fc, int n, int depth);

}  // namespace okdv

#endif
