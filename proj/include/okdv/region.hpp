#ifndef OKDV_REGION_HPP
#define OKDV_REGION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "okdv/variable_space.hpp"

namespace okdv {

// Large-but-safe sentinel for "no bound".
constexpr int kInf = 1 << 26;

inline int cap_add(int a, int b) {
    if (a >= kInf || b >= kInf) return kInf;
    if (a <= -kInf || b <= -kInf) return -kInf;
    return a + b;
}

struct Window {
    int lo = -kInf;
    int hi = kInf;

    static Window all() { return {-kInf, kInf}; }
    static Window point(int v) { return {v, v}; }
    bool contains(int v) const { return v >= lo && v <= hi; }
    bool empty() const { return lo > hi; }
    Window intersect(const Window& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
    Window hull(const Window& o) const { return {std::min(lo, o.lo), std::max(hi, o.hi)}; }
    Window shifted(int d) const { return {cap_add(lo, d), cap_add(hi, d)}; }
    Window plus(const Window& o) const { return {cap_add(lo, o.lo), cap_add(hi, o.hi)}; }
    bool operator==(const Window& o) const { return lo == o.lo && hi == o.hi; }
};

// Truncation metadata carried by every series value.
//
// Certification: a stored coefficient is the exact coefficient of the
// underlying object whenever its monomial satisfies
//     t_weight <= t_cap, e(s_n) <= s_caps[n], e(s_-) <= sminus_cap,
//     lam_weight <= lam_cap, z in z_cert, deficiency <= shift_cap,
// where deficiency(m) = z_weight(m) - z_exp(m).
//
// Support claims (z_supp, dshift_lo, u_supp) are promises about the *exact*
// object restricted to the caps above: its z exponents lie in z_supp, its
// deficiency is >= dshift_lo, its u exponents lie in u_supp. These make
// products certifiable without global z/u caps.
struct Region {
    int t_cap = kInf;
    std::vector<int> s_caps;  // sized to the space's s_count
    int sminus_cap = kInf;
    int lam_cap = kInf;
    int zw_cap = kInf;   // cap on z_weight(m) = t_weight + sum (2n+2) e(s_n)
    int t1w_cap = kInf;  // cap on the t-weight carried by t_1, t_2, ...
    Window z_cert = Window::all();
    int shift_cap = kInf;
    Window z_supp = Window::point(0);
    int dshift_lo = 0;
    Window u_supp = Window::point(0);

    static Region exact(const VariableSpace& sp) {
        Region r;
        r.s_caps.assign(static_cast<size_t>(sp.s_count()), kInf);
        return r;
    }

    int s_cap(int n) const {
        return n < static_cast<int>(s_caps.size()) ? s_caps[static_cast<size_t>(n)] : kInf;
    }

    bool certifies(const VariableSpace& sp, const Key& k) const {
        KeyGrades g = grades_of(sp, k);
        return certifies(g, sp, k);
    }

    bool certifies(const KeyGrades& g, const VariableSpace& sp, const Key& k) const {
        if (g.t_weight > t_cap) return false;
        for (int n = 0; n < sp.s_count(); ++n)
            if (k[sp.slot_of({VarKind::S, n})] > s_cap(n)) return false;
        if (g.sminus > sminus_cap) return false;
        if (g.lam_weight > lam_cap) return false;
        if (g.z_weight > zw_cap) return false;
        if (g.t1_weight > t1w_cap) return false;
        if (!z_cert.contains(g.z_exp)) return false;
        if (g.deficiency() > shift_cap) return false;
        return true;
    }

    // Intersection of certified regions; support hulls. Used by add/sub.
    Region meet(const Region& o) const {
        Region r = *this;
        r.t_cap = std::min(t_cap, o.t_cap);
        size_t ns = std::max(s_caps.size(), o.s_caps.size());
        r.s_caps.resize(ns, kInf);
        for (size_t i = 0; i < ns; ++i)
            r.s_caps[i] = std::min(s_cap(static_cast<int>(i)), o.s_cap(static_cast<int>(i)));
        r.sminus_cap = std::min(sminus_cap, o.sminus_cap);
        r.lam_cap = std::min(lam_cap, o.lam_cap);
        r.zw_cap = std::min(zw_cap, o.zw_cap);
        r.t1w_cap = std::min(t1w_cap, o.t1w_cap);
        r.z_cert = z_cert.intersect(o.z_cert);
        r.shift_cap = std::min(shift_cap, o.shift_cap);
        r.z_supp = z_supp.hull(o.z_supp);
        r.dshift_lo = std::min(dshift_lo, o.dshift_lo);
        r.u_supp = u_supp.hull(o.u_supp);
        return r;
    }

    // Certified region of a product of series with these regions.
    Region product(const Region& o) const {
        Region r = meet(o);
        // z certification: a split z = z1 + z2 with z1 in supp(a), z2 in
        // supp(b) must land each factor inside its own certified window.
        r.z_cert.hi = std::min(cap_add(z_cert.hi, o.z_supp.lo), cap_add(o.z_cert.hi, z_supp.lo));
        r.z_cert.lo = std::max(cap_add(z_cert.lo, o.z_supp.hi), cap_add(o.z_cert.lo, z_supp.hi));
        r.shift_cap = std::min(cap_add(shift_cap, o.dshift_lo), cap_add(o.shift_cap, dshift_lo));
        r.z_supp = z_supp.plus(o.z_supp);
        r.dshift_lo = cap_add(dshift_lo, o.dshift_lo);
        r.u_supp = u_supp.plus(o.u_supp);
        return r;
    }

    // Region after multiplying by a single monomial.
    Region shift_by_monomial(const VariableSpace& sp, const Key& mono) const {
        KeyGrades g = grades_of(sp, mono);
        Region r = *this;
        r.t_cap = cap_add(r.t_cap, g.t_weight);
        r.s_caps.resize(static_cast<size_t>(sp.s_count()), kInf);
        for (int n = 0; n < sp.s_count(); ++n)
            r.s_caps[static_cast<size_t>(n)] =
                cap_add(r.s_caps[static_cast<size_t>(n)], mono[sp.slot_of({VarKind::S, n})]);
        r.sminus_cap = cap_add(r.sminus_cap, g.sminus);
        r.lam_cap = cap_add(r.lam_cap, g.lam_weight);
        r.zw_cap = cap_add(r.zw_cap, g.z_weight);
        r.t1w_cap = cap_add(r.t1w_cap, g.t1_weight);
        r.z_cert = r.z_cert.shifted(g.z_exp);
        r.shift_cap = cap_add(r.shift_cap, g.deficiency());
        r.z_supp = r.z_supp.shifted(g.z_exp);
        r.dshift_lo = cap_add(r.dshift_lo, g.deficiency());
        r.u_supp = r.u_supp.shifted(g.u_exp);
        return r;
    }

    bool operator==(const Region& o) const {
        return t_cap == o.t_cap && s_caps == o.s_caps && sminus_cap == o.sminus_cap &&
               lam_cap == o.lam_cap && zw_cap == o.zw_cap && t1w_cap == o.t1w_cap &&
               z_cert == o.z_cert && shift_cap == o.shift_cap && z_supp == o.z_supp &&
               dshift_lo == o.dshift_lo && u_supp == o.u_supp;
    }

    std::string describe() const;
};

}  // namespace okdv

#endif
