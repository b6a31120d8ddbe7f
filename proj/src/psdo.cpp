#include "okdv/psdo.hpp"

#include "okdv/errors.hpp"
#include "okdv/open.hpp"

namespace okdv {

void PseudoDiffOp::set_coef(int order, Series s) {
    if (order < floor_ || s.empty())
        coef_.erase(order);
    if (order < floor_ || s.empty()) return;
    coef_.insert_or_assign(order, std::move(s));
}

Series PseudoDiffOp::order_coefficient(int order) const {
    if (order < floor_)
        throw TruncationError("pseudo-differential coefficient below the certified window (order " +
                              std::to_string(order) + " < " + std::to_string(floor_) + ")");
    auto it = coef_.find(order);
    if (it != coef_.end()) return it->second;
    return make_zero(space_, Region::exact(*space_));
}

PseudoDiffOp psdo_dx(SpacePtr sp, const Region& rg, int k, int floor) {
    PseudoDiffOp r(sp, floor);
    r.set_coef(k, make_const(sp, rg, Rat(1)));
    return r;
}

PseudoDiffOp psdo_of_series(const Series& f, int floor) {
    PseudoDiffOp r(f.space_ptr(), floor);
    r.set_coef(0, f);
    return r;
}

PseudoDiffOp psdo_add(const PseudoDiffOp& a, const PseudoDiffOp& b) {
    if (!a.space().same_shape(b.space()))
        throw ConfigError("psdo_add: incompatible spaces");
    PseudoDiffOp r(a.space_ptr(), std::max(a.floor_order(), b.floor_order()));
    for (const auto& [k, s] : a.coef())
        if (k >= r.floor_order()) r.set_coef(k, s);
    for (const auto& [k, s] : b.coef()) {
        if (k < r.floor_order()) continue;
        auto it = r.coef().find(k);
        r.set_coef(k, it == r.coef().end() ? s : add(it->second, s));
    }
    return r;
}

PseudoDiffOp psdo_scale(const PseudoDiffOp& a, const Rat& c) {
    PseudoDiffOp r(a.space_ptr(), a.floor_order());
    if (is_zero(c)) return r;
    for (const auto& [k, s] : a.coef()) r.set_coef(k, scale(s, c));
    return r;
}

PseudoDiffOp psdo_mul(const PseudoDiffOp& a, const PseudoDiffOp& b) {
    if (!a.space().same_shape(b.space()))
        throw ConfigError("psdo_mul: incompatible spaces");
    // certification floor of the product, z-window style
    int floor = std::max(cap_add(a.floor_order(), b.top_order()),
                         cap_add(b.floor_order(), a.top_order()));
    if (a.empty() || b.empty()) return PseudoDiffOp(a.space_ptr(), floor);
    PseudoDiffOp r(a.space_ptr(), floor);
    Var t0{VarKind::T, 0};
    std::map<int, Series> acc;
    for (const auto& [k, ak] : a.coef()) {
        for (const auto& [m, bm] : b.coef()) {
            Series df = bm;
            Rat binom(1);
            for (int l = 0;; ++l) {
                int order = k + m - l;
                if (order < floor) break;
                if (l > 0) {
                    binom *= Rat(k - l + 1) / Rat(l);
                    df = diff(df, t0);
                }
                if (df.empty() && l > 0) break;
                if (is_zero(binom)) break;
                Series term = scale(mul(ak, df), binom);
                auto it = acc.find(order);
                if (it == acc.end())
                    acc.emplace(order, std::move(term));
                else
                    it->second = add(it->second, term);
            }
        }
    }
    for (auto& [k, s] : acc) r.set_coef(k, std::move(s));
    return r;
}

PseudoDiffOp psdo_plus(const PseudoDiffOp& a) {
    if (a.floor_order() > 0)
        throw TruncationError("psdo_plus: window does not reach order 0");
    // exact below order 0 by construction: everything there is zero
    PseudoDiffOp r(a.space_ptr(), -kInf);
    for (const auto& [k, s] : a.coef())
        if (k >= 0) r.set_coef(k, s);
    return r;
}

PseudoDiffOp psdo_pow(const PseudoDiffOp& a, int p) {
    if (p < 1) throw ConfigError("psdo_pow: positive powers only");
    PseudoDiffOp r = a;
    for (int i = 1; i < p; ++i) r = psdo_mul(r, a);
    return r;
}

PseudoDiffOp psdo_root(const PseudoDiffOp& a, int m, int depth) {
    if (m < 2) throw ConfigError("psdo_root: m >= 2 required");
    if (a.top_order() != m)
        throw ConfigError("psdo_root: operator is not d_x^m + lower orders");
    {
        Series lead = a.order_coefficient(m);
        Key one = Key::zero(a.space());
        if (lead.coeff_raw(one) != Rat(1) || lead.term_count() != 1)
            throw ConfigError("psdo_root: leading coefficient is not 1");
        if (!a.coef().count(m - 1)) {
            // required shape: d^m + a_1 d^{m-2} + ... (no order m-1 term)
        } else if (!a.order_coefficient(m - 1).empty()) {
            throw ConfigError("psdo_root: order m-1 coefficient must vanish");
        }
    }
    Region rg = Region::exact(a.space());
    for (const auto& [k, s] : a.coef()) rg = rg.meet(s.region());

    // iterate: r_n is pinned by the order m-1-n coefficient of A - R^m,
    // where it enters linearly with coefficient m
    PseudoDiffOp R(a.space_ptr(), -depth - 1);
    R.set_coef(1, make_const(a.space_ptr(), rg, Rat(1)));
    for (int n = 0; n <= depth; ++n) {
        PseudoDiffOp P = psdo_pow(R, m);
        Series want = a.floor_order() <= m - 1 - n && a.coef().count(m - 1 - n)
                          ? a.order_coefficient(m - 1 - n)
                          : make_zero(a.space_ptr(), rg);
        Series have = P.coef().count(m - 1 - n) ? P.coef().at(m - 1 - n)
                                                : make_zero(a.space_ptr(), rg);
        Series rn = scale(sub(want, have), Rat(1) / Rat(m));
        if (!rn.empty()) R.set_coef(-n, std::move(rn));
    }
    R.set_floor(-depth);
    return R;
}

PseudoDiffOp psdo_sqrt_direct(const PseudoDiffOp& a, int depth) {
    if (a.top_order() != 2) throw ConfigError("psdo_sqrt_direct: order 2 expected");
    Region rg = Region::exact(a.space());
    for (const auto& [k, s] : a.coef()) rg = rg.meet(s.region());
    Var t0{VarKind::T, 0};

    // R = d + sum_{k>=0} r_k d^{-k}. Matching orders of R^2 = A descending:
    //   order q:  2 r_{1-q} + r_{-q}' + sum_{j+k+l=-q} C(-j,l) r_j r_k^{(l)} = A_q
    // which pins r_{1-q} from strictly lower-index data.
    std::map<int, Series> r;
    auto r_at = [&](int k) -> Series {
        auto it = r.find(k);
        return it == r.end() ? make_zero(a.space_ptr(), rg) : it->second;
    };
    for (int q = 1; q >= 1 - depth; --q) {
        Series rhs = (q >= a.floor_order() && a.coef().count(q))
                         ? a.order_coefficient(q)
                         : make_zero(a.space_ptr(), rg);
        Series acc = make_zero(a.space_ptr(), rg);
        if (-q >= 0) {
            acc = add(acc, diff(r_at(-q), t0));
            for (int j = 0; j <= -q; ++j) {
                for (int l = 0; l + j <= -q; ++l) {
                    int k = -q - j - l;
                    Rat c(1);
                    for (int i = 0; i < l; ++i) c *= Rat(-j - i) / Rat(i + 1);
                    if (is_zero(c)) continue;
                    Series rk = r_at(k);
                    for (int i = 0; i < l; ++i) rk = diff(rk, t0);
                    acc = add(acc, scale(mul(r_at(j), rk), c));
                }
            }
        }
        Series rn = scale(sub(rhs, acc), rat(1, 2));
        if (!rn.empty()) r.emplace(1 - q, std::move(rn));
    }
    PseudoDiffOp R(a.space_ptr(), -depth);
    R.set_coef(1, make_const(a.space_ptr(), rg, Rat(1)));
    for (auto& [k, s] : r)
        if (!s.empty()) R.set_coef(-k, std::move(s));
    return R;
}

Series psdo_apply(const PseudoDiffOp& a, const Series& f) {
    Var t0{VarKind::T, 0};
    Series acc = make_zero(f.space_ptr(), Region::exact(f.space()));
    bool first = true;
    Series df = f;
    int at = 0;
    for (const auto& [k, s] : a.coef()) {
        if (k < 0) throw ConfigError("psdo_apply: operator has negative orders");
        (void)s;
    }
    for (const auto& [k, s] : a.coef()) {
        while (at < k) {
            df = diff(df, t0);
            ++at;
        }
        Series term = mul(s, df);
        acc = first ? term : add(acc, term);
        first = false;
    }
    return acc;
}

LaxResiduals check_lax_flows(const Series& Fo, const Series& Fc, int n, int depth) {
    if (n < 0) throw ConfigError("check_lax_flows: n >= 0 required");
    SpacePtr sp = Fo.space_ptr();
    Series E = exp_series(set_u_one(Fo));
    Series w = closed_into(set_u_one(Fc), sp);
    Var t0{VarKind::T, 0};
    // L = d^2 + 2 F^c_{t_0 t_0}. The doubled potential is forced by the
    // flow system itself: d/ds e^F = (1/2) L e^F expands to the s-flow only
    // with the 2 in place.
    Series wxx = scale(diff(diff(w, t0), t0), Rat(2));
    PseudoDiffOp L = psdo_dx(sp, Region::exact(*sp), 2, -depth);
    L.set_coef(0, wxx);

    Series residual_s = sub(diff(E, {VarKind::S, 0}),
                            scale(add(diff(diff(E, t0), t0), mul(wxx, E)), rat(1, 2)));

    PseudoDiffOp S = psdo_root(L, 2, depth);
    PseudoDiffOp P = psdo_plus(psdo_pow(S, 2 * n + 1));
    Series flow = scale(psdo_apply(P, E), Rat(1) / double_factorial(2 * n + 1));
    Series residual_t = sub(diff(E, {VarKind::T, n}), flow);
    return {std::move(residual_t), std::move(residual_s)};
}

}  // namespace okdv
