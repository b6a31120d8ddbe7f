#include "okdv/closed.hpp"

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

// Leading coefficient (2n+3)!!/2^{n+1} of -d/dt_{n+1} in L_n.
Rat leading_coeff(int n) {
    return double_factorial(2 * n + 3) / pow_rat(Rat(2), n + 1);
}

// Coefficient (2i+2n+1)!!/((2i-1)!! 2^{n+1}) of t_i d/dt_{i+n}.
Rat dilation_coeff(int n, int i) {
    return double_factorial(2 * i + 2 * n + 1) / double_factorial(2 * i - 1) /
           pow_rat(Rat(2), n + 1);
}

// Coefficient (2i+1)!!(2n-2i-1)!!/2^{n+1} inside the u^2 sum.
Rat second_order_coeff(int n, int i) {
    return double_factorial(2 * i + 1) * double_factorial(2 * (n - 1 - i) + 1) /
           pow_rat(Rat(2), n + 1);
}

}  // namespace

Series virasoro_apply(int n, const Series& g) {
    if (n < -1) throw ConfigError("virasoro_apply: n < -1");
    const VariableSpace& sp = g.space();
    SpacePtr spp = g.space_ptr();
    bool with_u = sp.has_u();

    Series acc = scale(diff(g, {VarKind::T, n + 1}), -leading_coeff(n));
    for (int i = std::max(0, -n); i < sp.t_count() && i + n < sp.t_count(); ++i)
        acc = add(acc, mul_monomial(diff(g, {VarKind::T, i + n}), t_mono(sp, i), dilation_coeff(n, i)));
    if (n >= 1) {
        for (int i = 0; i <= n - 1; ++i) {
            if (i >= sp.t_count() || n - 1 - i >= sp.t_count()) continue;
            Series d2 = diff(diff(g, {VarKind::T, i}), {VarKind::T, n - 1 - i});
            acc = add(acc, mul_monomial(d2, u_mono(sp, with_u ? 2 : 0), second_order_coeff(n, i) / 2));
        }
    }
    if (n == -1) {
        Key k = t_mono(sp, 0, 2);
        if (with_u) k[sp.slot_of({VarKind::U, 0})] = -2;
        acc = add(acc, mul_monomial(g, k, rat(1, 2)));
    }
    if (n == 0) acc = add(acc, scale(g, rat(1, 16)));
    return acc;
}

Series virasoro_conjugated(int n, const Series& F) {
    if (n < -1) throw ConfigError("virasoro_conjugated: n < -1");
    const VariableSpace& sp = F.space();
    bool with_u = sp.has_u();

    Series acc = scale(diff(F, {VarKind::T, n + 1}), -leading_coeff(n));
    for (int i = std::max(0, -n); i < sp.t_count() && i + n < sp.t_count(); ++i)
        acc = add(acc, mul_monomial(diff(F, {VarKind::T, i + n}), t_mono(sp, i), dilation_coeff(n, i)));
    if (n >= 1) {
        for (int i = 0; i <= n - 1; ++i) {
            if (i >= sp.t_count() || n - 1 - i >= sp.t_count()) continue;
            Series di = diff(F, {VarKind::T, i});
            Series dj = diff(F, {VarKind::T, n - 1 - i});
            Series quad = add(diff(di, {VarKind::T, n - 1 - i}), mul(di, dj));
            acc = add(acc, mul_monomial(quad, u_mono(sp, with_u ? 2 : 0), second_order_coeff(n, i) / 2));
        }
    }
    if (n == -1) {
        Key k = t_mono(sp, 0, 2);
        if (with_u) k[sp.slot_of({VarKind::U, 0})] = -2;
        acc = add(acc, make_monomial(F.space_ptr(), Region::exact(sp), k, rat(1, 2)));
    }
    if (n == 0)
        acc = add(acc, make_const(F.space_ptr(), Region::exact(sp), rat(1, 16)));
    return acc;
}

namespace {

// All t-exponent vectors of exact weight w over t_0..t_{count-1}.
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

ClosedSolveResult solve_closed_free_energy(int d_t, SolveOrder order) {
    if (d_t < 3) throw ConfigError("solve_closed_free_energy: D_t must be at least 3");
    int a_max = (d_t - 1) / 2;
    SpacePtr sp = VariableSpace::make(a_max + 1, 0, false, 0, false, true);
    Region rg = Region::exact(*sp);
    rg.t_cap = d_t;
    Series F = make_zero(sp, rg);

    for (int w = 1; w <= d_t; ++w) {
        Key zero = Key::zero(*sp);
        std::vector<Key> targets;
        enumerate_weight(*sp, w, 0, zero, targets);
        // group targets by the index whose constraint determines them
        std::map<int, std::vector<Key>> by_j;
        for (const Key& m : targets) {
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
            Series W = virasoro_conjugated(n, F);
            // bucket W's terms by their t-part
            std::map<Key, std::vector<std::pair<int, Rat>>> by_tpart;
            int uslot = sp->slot_of({VarKind::U, 0});
            for (const auto& [k, c] : W.terms()) {
                Key tp = k;
                tp[uslot] = 0;
                by_tpart[tp].push_back({k[uslot], c});
            }
            Rat c_lead = leading_coeff(n);
            for (const Key& target : list) {
                int e = target[sp->slot_of({VarKind::T, j})];
                Key m = target;
                m[sp->slot_of({VarKind::T, j})] = static_cast<int16_t>(e - 1);
                auto it = by_tpart.find(m);
                if (it == by_tpart.end()) continue;
                for (const auto& [uexp, val] : it->second) {
                    Key full = target;
                    full[uslot] = static_cast<int16_t>(uexp);
                    F.add_term(full, val / (c_lead * Rat(e)));
                }
            }
        }
    }

    ClosedSolveResult result{std::move(F), {}};
    result.table = extract_closed_table(result.F, "virasoro");
    result.table.d_t = d_t;
    return result;
}

Series double_bracket(const Series& F, const std::vector<int>& a) {
    Series r = F;
    for (int x : a) r = diff(r, {VarKind::T, x});
    return r;
}

Series check_kdv(const Series& F, int n) {
    if (n < 1) throw ConfigError("check_kdv: n >= 1 required");
    const VariableSpace& sp = F.space();
    Series lhs = mul_monomial(double_bracket(F, {n, 0, 0}), u_mono(sp, sp.has_u() ? -2 : 0),
                              Rat(2 * n + 1));
    Series r1 = mul(double_bracket(F, {n - 1, 0}), double_bracket(F, {0, 0, 0}));
    Series r2 = scale(mul(double_bracket(F, {n - 1, 0, 0}), double_bracket(F, {0, 0})), Rat(2));
    Series r3 = scale(double_bracket(F, {n - 1, 0, 0, 0, 0}), rat(1, 4));
    Series res = sub(sub(sub(lhs, r1), r2), r3);
    if (res.region().t_cap < 0)
        throw ConfigError("check_kdv: truncation too small for the n-th equation");
    return res;
}

Series check_string(const Series& F) {
    const VariableSpace& sp = F.space();
    Series acc = diff(F, {VarKind::T, 0});
    for (int i = 0; i + 1 < sp.t_count(); ++i)
        acc = sub(acc, mul_monomial(diff(F, {VarKind::T, i}), t_mono(sp, i + 1), Rat(1)));
    Key k = t_mono(sp, 0, 2);
    if (sp.has_u()) k[sp.slot_of({VarKind::U, 0})] = -2;
    acc = sub(acc, make_monomial(F.space_ptr(), Region::exact(sp), k, rat(1, 2)));
    return acc;
}

CmpWindow full_window(const Series& s) {
    const VariableSpace& sp = s.space();
    const Region& rg = s.region();
    CmpWindow w;
    if (rg.t_cap >= kInf && sp.t_count() > 0)
        throw ConfigError("full_window: t-weight cap is unbounded");
    w.t_cap = std::min(rg.t_cap, kInf - 1);
    for (int n = 0; n < sp.s_count(); ++n) {
        if (rg.s_cap(n) >= kInf)
            throw ConfigError("full_window: s cap is unbounded");
        w.s_caps.push_back(rg.s_cap(n));
    }
    w.sminus_cap = sp.has_sminus() ? rg.sminus_cap : 0;
    w.lam_cap = sp.lambda_count() > 0 ? rg.lam_cap : 0;
    if (sp.has_z()) {
        w.z = rg.z_cert.intersect(rg.z_supp);
        w.shift_cap = rg.shift_cap;
    }
    return w;
}

}  // namespace okdv
