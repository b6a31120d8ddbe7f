#include "okdv/fourier.hpp"

#include "okdv/closed.hpp"
#include "okdv/errors.hpp"
#include "okdv/open.hpp"

namespace okdv {

GaussianMoment gaussian_moment(int m) {
    if (m < 0) throw ConfigError("gaussian_moment: m >= 0 required");
    if (m % 2 == 1) return {0, Rat(0)};
    return {-m / 2, double_factorial(m - 1)};
}

AdmissibleSeries make_admissible(const Series& tau, int s_bound) {
    const VariableSpace& sp = tau.space();
    if (sp.s_count() < 1) throw ConfigError("make_admissible: no s variable");
    if (sp.has_u() && !(tau.region().u_supp == Window::point(0)))
        throw ConfigError("make_admissible: series must be at u = 1");
    Region rg = Region::exact(sp);
    rg.s_caps = tau.region().s_caps;
    rg.s_caps[0] = s_bound;
    Key s3 = Key::zero(sp);
    s3[sp.slot_of({VarKind::S, 0})] = 3;
    Series factor = exp_series(make_monomial(tau.space_ptr(), rg, s3, rat(-1, 6)));
    Series ft = mul(truncate_to(tau, rg.meet(tau.region())), factor);
    return {std::move(ft), s_bound};
}

Series fourier_transform(const AdmissibleSeries& f, SpacePtr target, int z_floor) {
    const VariableSpace& A = f.f_tilde.space();
    const VariableSpace& B = *target;
    if (!B.has_z()) throw ConfigError("fourier_transform: target needs z");
    int sslot = A.slot_of({VarKind::S, 0});
    int zslot = B.slot_of({VarKind::Z, 0});

    Region rg;
    rg.s_caps.assign(static_cast<size_t>(B.s_count()), kInf);
    rg.t_cap = f.f_tilde.region().t_cap;
    rg.lam_cap = 0;
    rg.sminus_cap = kInf;
    rg.z_cert = Window{z_floor, kInf};
    rg.shift_cap = kInf;
    rg.z_supp = Window{-kInf, f.s_bound};
    rg.dshift_lo = -f.s_bound;
    Series out(target, rg);

    for (const auto& [k, c] : f.f_tilde.terms()) {
        int j = k[sslot];
        if (j > f.s_bound)
            throw ConfigError("fourier_transform: s-degree exceeds the admissible bound");
        Key base = Key::zero(B);
        for (int slot = 0; slot < A.slot_count(); ++slot) {
            if (slot == sslot || k[slot] == 0) continue;
            Var v = A.var_of_slot(slot);
            if (v.kind == VarKind::U) continue;  // u = 1
            base[B.slot_of(v)] = k[slot];
        }
        // Phi[s^j]: sum over k moments of (-is+z)^j (i s^3/6)^k / k!
        for (int m = 0;; ++m) {
            int r0 = m % 2;  // smallest r with r + 3m even
            if (j - r0 - (r0 + 3 * m) / 2 < z_floor) break;
            Rat mk = pow_rat(rat(1, 6), m) / factorial(m);
            for (int r = r0; r <= j; r += 2) {
                int zexp = j - r - (r + 3 * m) / 2;
                if (zexp < z_floor) break;
                int ipow = (m + 3 * r) % 4;
                if (ipow % 2 != 0)
                    throw InternalInconsistency("fourier_transform: residual imaginary unit");
                Rat sign = (ipow == 0) ? Rat(1) : Rat(-1);
                GaussianMoment g = gaussian_moment(r + 3 * m);
                Rat val = c * sign * mk * binomial(j, r) * g.value;
                Key mono = base;
                mono[zslot] = static_cast<int16_t>(zexp);
                out.add_term(mono, val);
            }
        }
    }
    return out;
}

Series gz_shift(const Series& f) {
    SpacePtr sp = f.space_ptr();
    const VariableSpace& B = *sp;
    if (!B.has_z()) throw ConfigError("gz_shift: space needs z");
    std::vector<std::pair<Var, Series>> bindings;
    Region rg = Region::exact(B);
    for (int i = 0; i < B.t_count(); ++i) {
        Series b = make_zero(sp, rg);
        Key ti = Key::zero(B);
        ti[B.slot_of({VarKind::T, i})] = 1;
        b.add_term(ti, Rat(1));
        Key zi = Key::zero(B);
        zi[B.slot_of({VarKind::Z, 0})] = static_cast<int16_t>(-(2 * i + 1));
        b.add_term(zi, -double_factorial(2 * i - 1));
        b.refresh_support();
        bindings.push_back({Var{VarKind::T, i}, std::move(b)});
    }
    return substitute(f, bindings, sp);
}

Series xi_series(SpacePtr sp, const Region& rg, bool with_s) {
    const VariableSpace& B = *sp;
    Series xi = make_zero(sp, rg);
    int zslot = B.slot_of({VarKind::Z, 0});
    for (int i = 0; i < B.t_count(); ++i) {
        if (2 * i + 1 > rg.t_cap) break;
        Key k = Key::zero(B);
        k[B.slot_of({VarKind::T, i})] = 1;
        k[zslot] = static_cast<int16_t>(2 * i + 1);
        xi.add_term(k, Rat(1) / double_factorial(2 * i + 1));
    }
    if (with_s) {
        for (int n = 0; n < B.s_count(); ++n) {
            if (rg.s_cap(n) < 1) continue;
            Key k = Key::zero(B);
            k[B.slot_of({VarKind::S, n})] = 1;
            k[zslot] = static_cast<int16_t>(2 * n + 2);
            xi.add_term(k, Rat(1) / double_factorial(2 * n + 2));
        }
    }
    xi.refresh_support();
    return xi;
}

namespace {

Series into_wave_space(const Series& with_u, SpacePtr target) {
    return embed(set_u_one(with_u), std::move(target));
}

}  // namespace

Series shift_and_dress(const Series& tau_c, SpacePtr target, int t_cap) {
    if (tau_c.region().t_cap < t_cap)
        throw ConfigError("shift_and_dress: tau^c solved below the requested t-weight");
    Series tc = into_wave_space(tau_c, target);
    Series shifted = gz_shift(tc);
    Region rg = Region::exact(*target);
    rg.t_cap = t_cap;
    for (auto& scap : rg.s_caps) scap = 0;
    Series xi = xi_series(target, rg, false);
    return mul(shifted, exp_series(xi));
}

Series wave_function(const Series& Fc, SpacePtr target, int t_cap,
                     const std::vector<int>& sn_caps) {
    Series fc = into_wave_space(Fc, target);
    Series tau = exp_series(truncate_to(fc, [&] {
        Region r = Region::exact(*target);
        r.t_cap = Fc.region().t_cap;
        return r;
    }()));
    Series shifted = gz_shift(tau);
    Region rg = Region::exact(*target);
    rg.t_cap = t_cap;
    for (size_t n = 0; n < rg.s_caps.size(); ++n)
        rg.s_caps[n] = n < sn_caps.size() ? sn_caps[n] : 0;
    Series xi = xi_series(target, rg, true);
    Series dress = exp_series(add(xi, neg(truncate_to(fc, rg))));
    return mul(shifted, dress);
}

Series check_wave_identity(const Series& tau_o, const Series& tau_c, SpacePtr target,
                           int t_cap, int s_bound, int z_floor) {
    AdmissibleSeries adm = make_admissible(tau_o, s_bound);
    Series lhs = fourier_transform(adm, target, z_floor);
    Series rhs = shift_and_dress(tau_c, target, t_cap);
    Series res = sub(lhs, rhs);
    if (res.region().z_cert.empty())
        throw ConfigError("check_wave_identity: empty comparison region");
    return res;
}

WaveFlowResiduals check_wave_flows(const Series& psi, const Series& Fc, int n, int depth) {
    if (n < 0) throw ConfigError("check_wave_flows: n >= 0 required");
    SpacePtr sp = psi.space_ptr();
    Series w = closed_into(set_u_one(Fc), sp);
    Var t0{VarKind::T, 0};
    Series wxx = scale(diff(diff(w, t0), t0), Rat(2));

    PseudoDiffOp L = psdo_dx(sp, Region::exact(*sp), 2, -depth);
    L.set_coef(0, wxx);

    PseudoDiffOp S = psdo_root(L, 2, depth);
    PseudoDiffOp P = psdo_plus(psdo_pow(S, 2 * n + 1));
    Series residual_t =
        sub(diff(psi, {VarKind::T, n}), scale(psdo_apply(P, psi), Rat(1) / double_factorial(2 * n + 1)));

    PseudoDiffOp Ln1 = psdo_plus(psdo_pow(L, n + 1));
    Series residual_s = sub(diff(psi, {VarKind::S, n}),
                            scale(psdo_apply(Ln1, psi), Rat(1) / double_factorial(2 * n + 2)));
    return {std::move(residual_t), std::move(residual_s)};
}

Series fourier_mul_image(const Series& w) {
    const VariableSpace& sp = w.space();
    Key zm2 = Key::zero(sp);
    zm2[sp.slot_of({VarKind::Z, 0})] = -2;
    Key zp1 = Key::zero(sp);
    zp1[sp.slot_of({VarKind::Z, 0})] = 1;
    Series dz = diff(w, {VarKind::Z, 0});
    Series a = mul_monomial(dz, [&] {
        Key k = Key::zero(sp);
        k[sp.slot_of({VarKind::Z, 0})] = -1;
        return k;
    }(), Rat(1));
    Series b = mul_monomial(w, zm2, rat(1, 2));
    Series c = mul_monomial(w, zp1, Rat(1));
    return add(sub(b, a), c);
}

Series check_virasoro_fourier(const Series& w, int n) {
    if (n < 0 || n > 2) throw ConfigError("check_virasoro_fourier: 0 <= n <= 2");
    const VariableSpace& sp = w.space();
    Series lhs = virasoro_apply(n, w);

    Rat p2 = pow_rat(Rat(2), n + 1);
    Key z2n1 = Key::zero(sp);
    z2n1[sp.slot_of({VarKind::Z, 0})] = static_cast<int16_t>(2 * n + 1);
    Key z2n = Key::zero(sp);
    z2n[sp.slot_of({VarKind::Z, 0})] = static_cast<int16_t>(2 * n);
    Key z2n3 = Key::zero(sp);
    z2n3[sp.slot_of({VarKind::Z, 0})] = static_cast<int16_t>(2 * n + 3);

    Series dz = diff(w, {VarKind::Z, 0});
    Series rhs = mul_monomial(dz, z2n1, Rat(1) / p2);
    rhs = sub(rhs, mul_monomial(w, z2n, Rat(1) / (p2 * 2)));
    rhs = sub(rhs, mul_monomial(w, z2n3, Rat(1) / p2));
    rhs = add(rhs, mul_monomial(w, z2n, Rat(n + 1) / (p2 * 2)));
    return sub(lhs, rhs);
}

}  // namespace okdv
