#include "okdv/open.hpp"

#include <algorithm>
#include <map>

#include "okdv/errors.hpp"

namespace okdv {

namespace {

Key u_mono(const VariableSpace& sp, int uexp) {
    Key k = Key::zero(sp);
    if (sp.has_u()) k[sp.slot_of({VarKind::U, 0})] = static_cast<int16_t>(uexp);
    else if (uexp != 0)
        throw ConfigError("u power requested but the space has no u");
    return k;
}

Key t_mono(const VariableSpace& sp, int a, int e = 1) {
    Key k = Key::zero(sp);
    k[sp.slot_of({VarKind::T, a})] = static_cast<int16_t>(e);
    return k;
}

Key s_mono(const VariableSpace& sp, int n, int e = 1) {
    Key k = Key::zero(sp);
    k[sp.slot_of({VarKind::S, n})] = static_cast<int16_t>(e);
    return k;
}

Rat leading_coeff(int n) {
    return double_factorial(2 * n + 3) / pow_rat(Rat(2), n + 1);
}

void enumerate_weight(const VariableSpace& sp, int w, int from_index, Key& acc,
                      std::vector<Key>& out) {
    if (w == 0) {
        out.push_back(acc);
        return;
    }
    for (int a = from_index; a < sp.t_count(); ++a) {
        int wa = 2 * a + 1;
        if (wa > w) break;
        int slot = sp.slot_of({VarKind::T, a});
        acc[slot] = static_cast<int16_t>(acc[slot] + 1);
        enumerate_weight(sp, w - wa, a, acc, out);
        acc[slot] = static_cast<int16_t>(acc[slot] - 1);
    }
}

}  // namespace

Series embed(const Series& a, SpacePtr target) { return substitute(a, {}, std::move(target)); }

Series closed_into(const Series& Fc, SpacePtr target) {
    std::vector<Var> extra;
    for (int a = target->t_count(); a < Fc.space().t_count(); ++a)
        extra.push_back({VarKind::T, a});
    if (extra.empty()) return embed(Fc, std::move(target));
    return embed(restrict_zero(Fc, extra), std::move(target));
}

SpacePtr open_space(const OpenBounds& b) {
    int t_count = std::max(1, (b.d_t - 1) / 2 + 1);
    return VariableSpace::make(t_count, 1 + static_cast<int>(b.sn_caps.size()), false, 0,
                               false, true);
}

Series open_virasoro_apply(int n, const Series& g, bool extended) {
    if (n < -1) throw ConfigError("open_virasoro_apply: n < -1");
    const VariableSpace& sp = g.space();
    Series acc = virasoro_apply(n, g);
    if (!extended) {
        Series d = g;
        for (int k = 0; k < n + 1; ++k) d = diff(d, {VarKind::S, 0});
        Key sk = s_mono(sp, 0);
        if (sp.has_u()) sk[sp.slot_of({VarKind::U, 0})] = static_cast<int16_t>(n);
        acc = add(acc, mul_monomial(d, sk, Rat(1)));
        if (n != -1) {
            Series dn = g;
            for (int k = 0; k < n; ++k) dn = diff(dn, {VarKind::S, 0});
            acc = add(acc, mul_monomial(dn, u_mono(sp, n), Rat(3 * n + 3) / 4));
        }
        return acc;
    }
    // Terms s_i d/ds_{n+i} whose target variable lies beyond the space act
    // on data the series does not carry; the result is certified only where
    // such an s_i cannot appear.
    std::vector<int> starved;
    for (int i = 0; i < sp.s_count(); ++i) {
        int j = n + i;
        if (j < 0) continue;
        if (j >= sp.s_count()) {
            starved.push_back(i);
            continue;
        }
        Rat c = factorial(i + n + 1) / factorial(i);
        acc = add(acc, mul_monomial(diff(g, {VarKind::S, j}), s_mono(sp, i), c));
    }
    if (n - 1 >= 0 && n - 1 < sp.s_count())
        acc = add(acc, mul_monomial(diff(g, {VarKind::S, n - 1}), u_mono(sp, 1),
                                    Rat(3) * factorial(n + 1) / 4));
    if (n == -1) {
        Key sk = s_mono(sp, 0);
        if (sp.has_u()) sk[sp.slot_of({VarKind::U, 0})] = -1;
        acc = add(acc, mul_monomial(g, sk, Rat(1)));
    }
    if (n == 0) acc = add(acc, scale(g, rat(3, 4)));
    if (!starved.empty()) {
        Region rg = acc.region();
        for (int i : starved) rg.s_caps[static_cast<size_t>(i)] = 0;
        acc = truncate_to(acc, rg);
    }
    return acc;
}

Series open_virasoro_conjugated(int n, const Series& F) {
    if (n < -1) throw ConfigError("open_virasoro_conjugated: n < -1");
    const VariableSpace& sp = F.space();
    Series acc = virasoro_conjugated(n, F);

    // B_k = e^{-F} d^k/ds^k e^{F};  B_{k+1} = F_s B_k + dB_k/ds
    Series Fs = diff(F, {VarKind::S, 0});
    std::vector<Series> bell;
    bell.push_back(make_const(F.space_ptr(), Region::exact(sp), Rat(1)));
    for (int k = 0; k < n + 1; ++k)
        bell.push_back(add(mul(Fs, bell.back()), diff(bell.back(), {VarKind::S, 0})));

    Key sk = s_mono(sp, 0);
    if (sp.has_u()) sk[sp.slot_of({VarKind::U, 0})] = static_cast<int16_t>(n);
    acc = add(acc, mul_monomial(bell[static_cast<size_t>(n + 1)], sk, Rat(1)));
    if (n != -1)
        acc = add(acc, mul_monomial(bell[static_cast<size_t>(n)], u_mono(sp, n),
                                    Rat(3 * n + 3) / 4));
    return acc;
}

Series solve_open_virasoro(const Series& Fc, const OpenBounds& b, SolveOrder order) {
    if (Fc.region().t_cap < b.d_t)
        throw ConfigError("solve_open_virasoro: F^c truncation below the requested D_t");
    OpenBounds base = b;
    base.sn_caps.clear();
    SpacePtr sp = open_space(base);
    int s_int = b.s_cap + std::max(0, (b.d_t - 3) / 2);

    Region rg = Region::exact(*sp);
    rg.t_cap = b.d_t;
    rg.s_caps[0] = s_int;

    Series Fc_e = truncate_to(closed_into(Fc, sp), rg);
    Key seed = s_mono(*sp, 0, 3);
    seed[sp->slot_of({VarKind::U, 0})] = -1;
    Series F = add(Fc_e, make_monomial(sp, rg, seed, rat(1, 6)));

    int uslot = sp->slot_of({VarKind::U, 0});
    int sslot = sp->slot_of({VarKind::S, 0});
    for (int w = 1; w <= b.d_t; ++w) {
        Key zero = Key::zero(*sp);
        std::vector<Key> tparts;
        enumerate_weight(*sp, w, 0, zero, tparts);
        std::map<int, std::vector<Key>> by_j;
        for (const Key& m : tparts) {
            int j = -1;
            for (int a = 0; a < sp->t_count(); ++a) {
                if (m[sp->slot_of({VarKind::T, a})] > 0) {
                    j = a;
                    if (order == SolveOrder::MinIndex) break;
                }
            }
            by_j[j].push_back(m);
        }
        for (const auto& [j, list] : by_j) {
            int n = j - 1;
            Series W = open_virasoro_conjugated(n, F);
            std::map<Key, std::vector<std::pair<int, Rat>>> by_rest;
            for (const auto& [k, c] : W.terms()) {
                Key rest = k;
                rest[uslot] = 0;
                by_rest[rest].push_back({k[uslot], c});
            }
            Rat c_lead = leading_coeff(n);
            for (const Key& tpart : list) {
                int e = tpart[sp->slot_of({VarKind::T, j})];
                for (int se = 0; se <= s_int; ++se) {
                    Key m = tpart;
                    m[sp->slot_of({VarKind::T, j})] = static_cast<int16_t>(e - 1);
                    m[sslot] = static_cast<int16_t>(se);
                    auto it = by_rest.find(m);
                    if (it == by_rest.end()) continue;
                    for (const auto& [uexp, val] : it->second) {
                        Key full = tpart;
                        full[sslot] = static_cast<int16_t>(se);
                        full[uslot] = static_cast<int16_t>(uexp);
                        F.add_term(full, val / (c_lead * Rat(e)));
                    }
                }
            }
        }
    }

    Series Fo = sub(F, Fc_e);
    Region final_rg = rg;
    final_rg.s_caps[0] = b.s_cap;
    return truncate_to(Fo, final_rg);
}

namespace {

// (1/2) d^2G/dt_0^2 + F_{t_0} dG/dt_0 + (F_{t_0}^2/2 + F_{t_0 t_0}/2 + Fc_{t_0 t_0}) G
Series burgers_operator(const Series& F, const Series& Fc, const Series& G) {
    Var t0{VarKind::T, 0};
    Series Ft0 = diff(F, t0);
    Series amp = add(add(scale(mul(Ft0, Ft0), rat(1, 2)), scale(diff(Ft0, t0), rat(1, 2))),
                     diff(diff(Fc, t0), t0));
    Series Gt0 = diff(G, t0);
    return add(add(scale(diff(Gt0, t0), rat(1, 2)), mul(Ft0, Gt0)), mul(amp, G));
}

}  // namespace

Series evolve_burgers_kdv(const Series& Fc, const OpenBounds& b, bool extended) {
    int m_ext = extended ? static_cast<int>(b.sn_caps.size()) : 0;
    OpenBounds bb = b;
    if (!extended) bb.sn_caps.clear();
    SpacePtr sp = open_space(bb);

    int sum_cn = 0, phi_ext = 0;
    for (int n = 1; n <= m_ext; ++n) {
        sum_cn += b.sn_caps[static_cast<size_t>(n - 1)];
        phi_ext += (2 * n + 2) * b.sn_caps[static_cast<size_t>(n - 1)];
    }
    int s0_int = b.s_cap + sum_cn;
    int phi_max = b.d_t + 2 * b.s_cap + phi_ext;
    if (Fc.region().t_cap < phi_max)
        throw ConfigError("evolve_burgers_kdv: F^c must be solved to t-weight " +
                          std::to_string(phi_max));

    Region rg = Region::exact(*sp);
    rg.t_cap = phi_max;
    rg.t1w_cap = b.d_t;
    rg.zw_cap = phi_max;
    rg.s_caps[0] = s0_int;
    for (int n = 1; n <= m_ext; ++n) {
        int cap = b.sn_caps[static_cast<size_t>(n - 1)];
        for (int k = n + 1; k <= m_ext; ++k) cap += b.sn_caps[static_cast<size_t>(k - 1)];
        rg.s_caps[static_cast<size_t>(n)] = cap;
    }

    Series Fc_e = truncate_to(closed_into(Fc, sp), rg);
    Series F = make_zero(sp, rg);

    int uslot = sp->slot_of({VarKind::U, 0});
    auto harvest = [&](const Series& rhs, Var var, int degree, int u_shift, const Rat& scale_by) {
        const VariableSpace& s = *sp;
        int vslot = s.slot_of(var);
        for (const auto& [k, val] : rhs.terms()) {
            if (k[vslot] != degree - 1) continue;
            bool owned = true;
            if (var.kind == VarKind::T) {
                for (int a = var.index + 1; a < s.t_count() && owned; ++a)
                    if (k[s.slot_of({VarKind::T, a})] != 0) owned = false;
                for (int n = 1; n < s.s_count() && owned; ++n)
                    if (k[s.slot_of({VarKind::S, n})] != 0) owned = false;
            } else {
                for (int n = var.index + 1; n < s.s_count() && owned; ++n)
                    if (k[s.slot_of({VarKind::S, n})] != 0) owned = false;
            }
            if (!owned) continue;
            Key target = k;
            target[vslot] = static_cast<int16_t>(degree);
            target[uslot] = static_cast<int16_t>(target[uslot] + u_shift);
            F.add_term(target, val * scale_by);
        }
    };

    // stage 0: the (t_0, s) slice, integrating F_s order by order in s
    for (int k = 1; k <= s0_int; ++k) {
        Var t0{VarKind::T, 0};
        Series Ft0 = diff(F, t0);
        Series rhs0 = add(add(scale(mul(Ft0, Ft0), rat(1, 2)), scale(diff(Ft0, t0), rat(1, 2))),
                          diff(diff(Fc_e, t0), t0));
        // stage-0 targets carry no t_{>=1}: reuse the ownership filter of s_0
        Series rhs_slice = restrict_zero(rhs0, [&] {
            std::vector<Var> vars;
            for (int a = 1; a < sp->t_count(); ++a) vars.push_back({VarKind::T, a});
            return vars;
        }());
        harvest(rhs_slice, {VarKind::S, 0}, k, 1, Rat(1) / Rat(k));
    }

    // stages t_1, t_2, ...: bring each t_m in degree by degree
    for (int m = 1; m < sp->t_count(); ++m) {
        int j_max = b.d_t / (2 * m + 1);
        for (int j = 1; j <= j_max; ++j) {
            Series rhs = burgers_operator(F, Fc_e, diff(F, {VarKind::T, m - 1}));
            Var t0{VarKind::T, 0};
            rhs = add(rhs, scale(mul(diff(F, t0), diff(diff(Fc_e, t0), {VarKind::T, m - 1})),
                                 rat(1, 2)));
            rhs = add(rhs, scale(diff(diff(diff(Fc_e, t0), t0), {VarKind::T, m - 1}), rat(3, 4)));
            harvest(rhs, {VarKind::T, m}, j, 2, Rat(2) / Rat((2 * m + 1) * j));
        }
    }

    // extended stages: s_1, s_2, ...
    for (int n = 1; n <= m_ext; ++n) {
        int j_max = rg.s_caps[static_cast<size_t>(n)];
        for (int j = 1; j <= j_max; ++j) {
            Series rhs = burgers_operator(F, Fc_e, diff(F, {VarKind::S, n - 1}));
            harvest(rhs, {VarKind::S, n}, j, 2, Rat(1) / Rat((n + 1) * j));
        }
    }

    Region final_rg = rg;
    final_rg.t_cap = b.d_t;
    final_rg.s_caps[0] = b.s_cap;
    for (int n = 1; n <= m_ext; ++n)
        final_rg.s_caps[static_cast<size_t>(n)] = b.sn_caps[static_cast<size_t>(n - 1)];
    return truncate_to(F, final_rg);
}

namespace {
const Series* as_same_space(const Series& Fc, const Series& Fo, Series& storage) {
    if (Fc.space().same_shape(Fo.space())) return &Fc;
    storage = closed_into(Fc, Fo.space_ptr());
    return &storage;
}
}  // namespace

Series check_open_kdv(const Series& Fo, const Series& Fc, int n) {
    if (n < 1) throw ConfigError("check_open_kdv: n >= 1 required");
    Series storage(Fo.space_ptr(), Fo.region());
    const Series& C = *as_same_space(Fc, Fo, storage);
    const VariableSpace& sp = Fo.space();
    Var t0{VarKind::T, 0};
    Var s0{VarKind::S, 0};

    Series lhs = mul_monomial(diff(Fo, {VarKind::T, n}), u_mono(sp, sp.has_u() ? -1 : 0),
                              Rat(2 * n + 1));
    Series r1 = mul_monomial(mul(diff(diff(C, {VarKind::T, n - 1}), t0), diff(Fo, t0)),
                             u_mono(sp, sp.has_u() ? 1 : 0), Rat(1));
    Series r2 = mul_monomial(diff(diff(diff(C, {VarKind::T, n - 1}), t0), t0),
                             u_mono(sp, sp.has_u() ? 1 : 0), rat(1, 2));
    Series r3 = scale(mul(diff(Fo, {VarKind::T, n - 1}), diff(Fo, s0)), Rat(2));
    Series r4 = scale(diff(diff(Fo, {VarKind::T, n - 1}), s0), Rat(2));
    return sub(add(sub(sub(lhs, r1), r3), r2), r4);
}

std::pair<Series, Series> check_open_string_dilaton(const Series& Fo) {
    const VariableSpace& sp = Fo.space();
    Var t0{VarKind::T, 0};
    Var s0{VarKind::S, 0};

    Series str = diff(Fo, t0);
    for (int i = 0; i + 1 < sp.t_count(); ++i)
        str = sub(str, mul_monomial(diff(Fo, {VarKind::T, i}), t_mono(sp, i + 1), Rat(1)));
    Key us = s_mono(sp, 0);
    if (sp.has_u()) us[sp.slot_of({VarKind::U, 0})] = -1;
    str = sub(str, make_monomial(Fo.space_ptr(), Region::exact(sp), us, Rat(1)));

    // a series over a space without t_1 simply does not depend on it
    Series dil = sp.t_count() > 1 ? diff(Fo, {VarKind::T, 1})
                                  : make_zero(Fo.space_ptr(), Region::exact(sp));
    for (int i = 0; i < sp.t_count(); ++i)
        dil = sub(dil, mul_monomial(diff(Fo, {VarKind::T, i}), t_mono(sp, i), Rat(2 * i + 1) / 3));
    dil = sub(dil, mul_monomial(diff(Fo, s0), s_mono(sp, 0), rat(2, 3)));
    dil = sub(dil, make_const(Fo.space_ptr(), Region::exact(sp), rat(1, 2)));
    return {std::move(str), std::move(dil)};
}

Series check_sn_reduction(const Series& tau_ext, int n) {
    const VariableSpace& sp = tau_ext.space();
    if (n < 1 || n >= sp.s_count())
        throw ConfigError("check_sn_reduction: s_n outside the extended variable set");
    Series lhs = diff(tau_ext, {VarKind::S, n});
    Series rhs = tau_ext;
    for (int k = 0; k <= n; ++k) rhs = diff(rhs, {VarKind::S, 0});
    rhs = mul_monomial(rhs, u_mono(sp, sp.has_u() ? n : 0), Rat(1) / factorial(n + 1));
    return sub(lhs, rhs);
}

Series check_s_flow(const Series& F, const Series& Fc) {
    Series storage(F.space_ptr(), F.region());
    const Series& C = *as_same_space(Fc, F, storage);
    const VariableSpace& sp = F.space();
    Var t0{VarKind::T, 0};
    Series Ft0 = diff(F, t0);
    Series rhs = add(add(scale(mul(Ft0, Ft0), rat(1, 2)), scale(diff(Ft0, t0), rat(1, 2))),
                     diff(diff(C, t0), t0));
    return sub(diff(F, {VarKind::S, 0}), mul_monomial(rhs, u_mono(sp, sp.has_u() ? 1 : 0), Rat(1)));
}

Series check_t_flow(const Series& F, const Series& Fc, int n) {
    if (n < 1) throw ConfigError("check_t_flow: n >= 1 required");
    Series storage(F.space_ptr(), F.region());
    const Series& C = *as_same_space(Fc, F, storage);
    const VariableSpace& sp = F.space();
    Var t0{VarKind::T, 0};
    Series rhs = burgers_operator(F, C, diff(F, {VarKind::T, n - 1}));
    rhs = add(rhs, scale(mul(diff(F, t0), diff(diff(C, t0), {VarKind::T, n - 1})), rat(1, 2)));
    rhs = add(rhs, scale(diff(diff(diff(C, t0), t0), {VarKind::T, n - 1}), rat(3, 4)));
    Series lhs = mul_monomial(diff(F, {VarKind::T, n}), u_mono(sp, sp.has_u() ? -2 : 0),
                              Rat(2 * n + 1) / 2);
    return sub(lhs, rhs);
}

Series check_higher_s_flow(const Series& F, const Series& Fc, int n) {
    if (n < 1) throw ConfigError("check_higher_s_flow: n >= 1 required");
    Series storage(F.space_ptr(), F.region());
    const Series& C = *as_same_space(Fc, F, storage);
    const VariableSpace& sp = F.space();
    Series rhs = burgers_operator(F, C, diff(F, {VarKind::S, n - 1}));
    Series lhs = mul_monomial(diff(F, {VarKind::S, n}), u_mono(sp, sp.has_u() ? -2 : 0),
                              Rat(n + 1));
    return sub(lhs, rhs);
}

}  // namespace okdv
