#include "okdv/series.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "okdv/errors.hpp"

namespace okdv {

std::string key_to_string(const VariableSpace& sp, const Key& k) {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < sp.slot_count(); ++i) {
        if (k[i] == 0) continue;
        if (!first) os << "*";
        first = false;
        os << sp.var_name(i);
        if (k[i] != 1) os << "^" << k[i];
    }
    if (first) os << "1";
    return os.str();
}

std::string Region::describe() const {
    std::ostringstream os;
    auto cap = [](int v) -> std::string {
        if (v >= kInf) return "inf";
        if (v <= -kInf) return "-inf";
        return std::to_string(v);
    };
    os << "t<=" << cap(t_cap);
    for (size_t i = 0; i < s_caps.size(); ++i) os << " s" << i << "<=" << cap(s_caps[i]);
    if (sminus_cap < kInf) os << " s-<=" << cap(sminus_cap);
    if (lam_cap < kInf) os << " lam<=" << cap(lam_cap);
    if (zw_cap < kInf) os << " zw<=" << cap(zw_cap);
    if (t1w_cap < kInf) os << " t1w<=" << cap(t1w_cap);
    if (!(z_cert == Window::all()))
        os << " z in [" << cap(z_cert.lo) << "," << cap(z_cert.hi) << "]";
    if (shift_cap < kInf) os << " defc<=" << cap(shift_cap);
    return os.str();
}

void Series::add_term(const Key& mono, const Rat& c) {
    if (is_zero(c)) return;
    KeyGrades g = grades_of(*space_, mono);
    if (!region_.certifies(g, *space_, mono)) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
        terms_.emplace(mono, c);
    } else {
        it->second += c;
        if (is_zero(it->second)) terms_.erase(it);
    }
}

void Series::add_term_unchecked(const Key& mono, const Rat& c) {
    if (is_zero(c)) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
        terms_.emplace(mono, c);
    } else {
        it->second += c;
        if (is_zero(it->second)) terms_.erase(it);
    }
}

Rat Series::coeff(const Key& mono) const {
    if (!region_.certifies(*space_, mono))
        throw TruncationError("coefficient of " + key_to_string(*space_, mono) +
                              " lies outside the certified region (" + region_.describe() + ")");
    return coeff_raw(mono);
}

Rat Series::coeff_raw(const Key& mono) const {
    auto it = terms_.find(mono);
    return it == terms_.end() ? Rat(0) : it->second;
}

std::vector<std::pair<Key, Rat>> Series::sorted_terms() const {
    std::vector<std::pair<Key, Rat>> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void Series::refresh_support() {
    Window zs = Window::point(0);
    Window us = Window::point(0);
    int dlo = 0;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        KeyGrades g = grades_of(*space_, k);
        if (first) {
            zs = Window::point(g.z_exp);
            us = Window::point(g.u_exp);
            dlo = g.deficiency();
            first = false;
        } else {
            zs = zs.hull(Window::point(g.z_exp));
            us = us.hull(Window::point(g.u_exp));
            dlo = std::min(dlo, g.deficiency());
        }
    }
    region_.z_supp = first ? Window::point(0) : zs;
    region_.u_supp = first ? Window::point(0) : us;
    region_.dshift_lo = first ? 0 : dlo;
}

void Series::drop_uncertified() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (!region_.certifies(*space_, it->first))
            it = terms_.erase(it);
        else
            ++it;
    }
}

std::string Series::to_string(size_t max_terms) const {
    std::ostringstream os;
    auto ts = sorted_terms();
    size_t shown = 0;
    for (const auto& [k, c] : ts) {
        if (shown++ >= max_terms) {
            os << " + ...(" << ts.size() - max_terms << " more)";
            break;
        }
        if (shown > 1) os << " + ";
        os << "(" << rat_to_string(c) << ")*" << key_to_string(*space_, k);
    }
    if (ts.empty()) os << "0";
    return os.str();
}

Series make_zero(SpacePtr sp, Region rg) { return Series(std::move(sp), std::move(rg)); }

Series make_const(SpacePtr sp, Region rg, const Rat& c) {
    Series r(std::move(sp), std::move(rg));
    r.add_term(Key::zero(r.space()), c);
    return r;
}

Series make_monomial(SpacePtr sp, Region rg, const Key& mono, const Rat& c) {
    Series r(std::move(sp), std::move(rg));
    r.add_term(mono, c);
    return r;
}

static void check_same_space(const Series& a, const Series& b, const char* op) {
    if (!a.space().same_shape(b.space()))
        throw ConfigError(std::string(op) + ": incompatible variable spaces");
}

Series add(const Series& a, const Series& b) {
    check_same_space(a, b, "add");
    Region rg = a.region().meet(b.region());
    if (rg.z_cert.empty())
        throw ConfigError("add: truncation windows have empty intersection");
    Series r(a.space_ptr(), rg);
    for (const auto& [k, c] : a.terms()) r.add_term(k, c);
    for (const auto& [k, c] : b.terms()) r.add_term(k, c);
    return r;
}

Series sub(const Series& a, const Series& b) { return add(a, neg(b)); }

Series neg(const Series& a) {
    Series r(a.space_ptr(), a.region());
    for (const auto& [k, c] : a.terms()) r.add_term_unchecked(k, -c);
    return r;
}

Series scale(const Series& a, const Rat& c) {
    Series r(a.space_ptr(), a.region());
    if (is_zero(c)) return r;
    for (const auto& [k, v] : a.terms()) r.add_term_unchecked(k, v * c);
    return r;
}

namespace {
struct GradedTerm {
    Key key;
    KeyGrades g;
    const Rat* coeff;
};

std::vector<GradedTerm> graded_terms_sorted_by_weight(const Series& s) {
    std::vector<GradedTerm> out;
    out.reserve(s.term_count());
    for (const auto& [k, c] : s.terms())
        out.push_back({k, grades_of(s.space(), k), &c});
    std::sort(out.begin(), out.end(), [](const GradedTerm& x, const GradedTerm& y) {
        return x.g.t_weight < y.g.t_weight;
    });
    return out;
}
}  // namespace

Series mul(const Series& a, const Series& b) {
    check_same_space(a, b, "mul");
    Region rg = a.region().product(b.region());
    Series r(a.space_ptr(), rg);
    if (a.empty() || b.empty()) return r;

    const Series& big = a.term_count() >= b.term_count() ? a : b;
    const Series& small = a.term_count() >= b.term_count() ? b : a;
    auto bt = graded_terms_sorted_by_weight(big);
    auto st = graded_terms_sorted_by_weight(small);

    const VariableSpace& sp = r.space();
    const int t_cap = rg.t_cap;
    for (const auto& x : st) {
        for (const auto& y : bt) {
            if (x.g.t_weight + y.g.t_weight > t_cap) break;
            // cheap grade pre-checks before touching rationals
            if (x.g.sminus + y.g.sminus > rg.sminus_cap) continue;
            if (x.g.lam_weight + y.g.lam_weight > rg.lam_cap) continue;
            if (x.g.z_weight + y.g.z_weight > rg.zw_cap) continue;
            if (x.g.t1_weight + y.g.t1_weight > rg.t1w_cap) continue;
            if (x.g.deficiency() + y.g.deficiency() > rg.shift_cap) continue;
            Key k = x.key.plus(y.key);
            bool ok = true;
            for (int n = 0; n < sp.s_count() && ok; ++n) {
                int slot = sp.slot_of({VarKind::S, n});
                if (k[slot] > rg.s_cap(n)) ok = false;
            }
            if (!ok) continue;
            if (sp.has_z()) {
                int zslot = sp.slot_of({VarKind::Z, 0});
                if (!rg.z_cert.contains(k[zslot])) continue;
            }
            r.add_term_unchecked(k, *x.coeff * *y.coeff);
        }
    }
    // accumulation may cancel to zero; unordered_map already drops those
    return r;
}

Series mul_monomial(const Series& a, const Key& mono, const Rat& c) {
    Region rg = a.region().shift_by_monomial(a.space(), mono);
    Series r(a.space_ptr(), rg);
    if (is_zero(c)) return r;
    for (const auto& [k, v] : a.terms()) r.add_term_unchecked(k.plus(mono), v * c);
    return r;
}

Series exp_series(const Series& a) {
    const VariableSpace& sp = a.space();
    for (const auto& [k, c] : a.terms()) {
        KeyGrades g = grades_of(sp, k);
        if (g.size == 0)
            throw ConfigError("exp: argument has a constant term in the non-u variables (" +
                              key_to_string(sp, k) + ")");
    }
    if (!(a.region().z_cert == Window::all()) || a.region().shift_cap < kInf)
        throw ConfigError("exp: argument must be exact in z");
    Series result = make_const(a.space_ptr(), a.region(), Rat(1));
    Series term = make_const(a.space_ptr(), a.region(), Rat(1));
    for (long k = 1;; ++k) {
        term = scale(mul(term, a), Rat(1) / Rat(k));
        term.region() = a.region();
        if (term.empty()) break;
        for (const auto& [mono, c] : term.terms()) result.add_term(mono, c);
        if (k > 100000) throw InternalInconsistency("exp: series failed to terminate");
    }
    result.region() = a.region();
    result.refresh_support();
    return result;
}

Series log_series(const Series& a) {
    const VariableSpace& sp = a.space();
    Key one = Key::zero(sp);
    if (a.coeff_raw(one) != Rat(1))
        throw ConfigError("log: constant term is not 1");
    Series x(a.space_ptr(), a.region());
    for (const auto& [k, c] : a.terms()) {
        if (k == one) continue;
        KeyGrades g = grades_of(sp, k);
        if (g.size == 0)
            throw ConfigError("log: argument has u-only terms besides the unit");
        x.add_term_unchecked(k, c);
    }
    Series result = make_zero(a.space_ptr(), a.region());
    Series term = make_const(a.space_ptr(), a.region(), Rat(1));
    for (long k = 1;; ++k) {
        term = mul(term, x);
        term.region() = a.region();
        if (term.empty()) break;
        Rat c = Rat((k % 2 == 1) ? 1 : -1) / Rat(k);
        for (const auto& [mono, v] : term.terms()) result.add_term(mono, v * c);
        if (k > 100000) throw InternalInconsistency("log: series failed to terminate");
    }
    result.refresh_support();
    return result;
}

Series diff(const Series& a, Var v) {
    const VariableSpace& sp = a.space();
    int slot = sp.slot_of(v);
    Region rg = a.region();
    switch (v.kind) {
        case VarKind::T: {
            int w = 2 * v.index + 1;
            rg.t_cap = cap_add(rg.t_cap, -w);
            rg.zw_cap = cap_add(rg.zw_cap, -w);
            if (v.index > 0) rg.t1w_cap = cap_add(rg.t1w_cap, -w);
            rg.shift_cap = cap_add(rg.shift_cap, -w);
            rg.dshift_lo = cap_add(rg.dshift_lo, -w);
            break;
        }
        case VarKind::S: {
            int w = 2 * v.index + 2;
            rg.s_caps[static_cast<size_t>(v.index)] =
                cap_add(rg.s_caps[static_cast<size_t>(v.index)], -1);
            rg.zw_cap = cap_add(rg.zw_cap, -w);
            rg.shift_cap = cap_add(rg.shift_cap, -w);
            rg.dshift_lo = cap_add(rg.dshift_lo, -w);
            break;
        }
        case VarKind::SMinus:
            rg.sminus_cap = cap_add(rg.sminus_cap, -1);
            break;
        case VarKind::Lambda:
            rg.lam_cap = cap_add(rg.lam_cap, -1);
            break;
        case VarKind::Z:
            rg.z_cert = rg.z_cert.shifted(-1);
            rg.z_supp = rg.z_supp.shifted(-1);
            rg.shift_cap = cap_add(rg.shift_cap, 1);
            rg.dshift_lo = cap_add(rg.dshift_lo, 1);
            break;
        case VarKind::U:
            rg.u_supp = rg.u_supp.shifted(-1);
            break;
    }
    Series r(a.space_ptr(), rg);
    for (const auto& [k, c] : a.terms()) {
        int e = k[slot];
        if (e == 0) continue;
        Key nk = k;
        nk[slot] = static_cast<int16_t>(e - 1);
        r.add_term_unchecked(nk, c * Rat(e));
    }
    return r;
}

Series integrate(const Series& a, Var v) {
    if (v.kind == VarKind::Z || v.kind == VarKind::U)
        throw ConfigError("integrate: only t/s/s_-/lambda variables supported");
    const VariableSpace& sp = a.space();
    int slot = sp.slot_of(v);
    Region rg = a.region();
    switch (v.kind) {
        case VarKind::T: {
            int w = 2 * v.index + 1;
            rg.t_cap = cap_add(rg.t_cap, w);
            rg.zw_cap = cap_add(rg.zw_cap, w);
            if (v.index > 0) rg.t1w_cap = cap_add(rg.t1w_cap, w);
            rg.shift_cap = cap_add(rg.shift_cap, w);
            rg.dshift_lo = cap_add(rg.dshift_lo, w);
            break;
        }
        case VarKind::S: {
            int w = 2 * v.index + 2;
            rg.s_caps[static_cast<size_t>(v.index)] =
                cap_add(rg.s_caps[static_cast<size_t>(v.index)], 1);
            rg.zw_cap = cap_add(rg.zw_cap, w);
            rg.shift_cap = cap_add(rg.shift_cap, w);
            rg.dshift_lo = cap_add(rg.dshift_lo, w);
            break;
        }
        case VarKind::SMinus:
            rg.sminus_cap = cap_add(rg.sminus_cap, 1);
            break;
        case VarKind::Lambda:
            rg.lam_cap = cap_add(rg.lam_cap, 1);
            break;
        default:
            break;
    }
    Series r(a.space_ptr(), rg);
    for (const auto& [k, c] : a.terms()) {
        int e = k[slot];
        Key nk = k;
        nk[slot] = static_cast<int16_t>(e + 1);
        r.add_term_unchecked(nk, c / Rat(e + 1));
    }
    return r;
}

namespace {
// Mass functional used by the substitution preconditions.
int binding_mass(const VariableSpace& sp, const Key& k) {
    KeyGrades g = grades_of(sp, k);
    int s_mass = 0;
    for (int n = 0; n < sp.s_count(); ++n) s_mass += (2 * n + 2) * k[sp.slot_of({VarKind::S, n})];
    return g.t_weight + g.lam_weight + s_mass + 2 * g.sminus;
}
}  // namespace

Series substitute(const Series& a, const std::vector<std::pair<Var, Series>>& bindings,
                  SpacePtr target) {
    const VariableSpace& A = a.space();
    const VariableSpace& B = *target;

    std::vector<int> bound_slot(static_cast<size_t>(A.slot_count()), -1);
    bool z_absorbing = false;
    bool lam_producing = false;
    for (size_t i = 0; i < bindings.size(); ++i) {
        const auto& [v, g] = bindings[i];
        if (!g.space().same_shape(B)) throw ConfigError("substitute: binding not over target space");
        int slot = A.slot_of(v);
        if (bound_slot[static_cast<size_t>(slot)] != -1)
            throw ConfigError("substitute: variable bound twice");
        bound_slot[static_cast<size_t>(slot)] = static_cast<int>(i);
        int vw = 0;
        switch (v.kind) {
            case VarKind::T: vw = 2 * v.index + 1; break;
            case VarKind::S: vw = 2 * v.index + 2; break;
            case VarKind::SMinus: vw = 2; break;
            case VarKind::Lambda: vw = 1; break;
            default: throw ConfigError("substitute: cannot bind z or u");
        }
        for (const auto& [k, c] : g.terms()) {
            KeyGrades kg = grades_of(B, k);
            if (kg.lam_weight > 0) lam_producing = true;
            int deficit = vw - binding_mass(B, k);
            if (deficit <= 0) continue;
            if (B.has_z() && deficit == -kg.z_exp) {
                z_absorbing = true;
                continue;
            }
            throw ConfigError("substitute: binding for " + A.var_name(slot) +
                              " would make a truncation bound unenforceable");
        }
    }

    // Unbound variables pass through by identity. A variable missing from
    // the target space is tolerated as long as no stored term uses it.
    std::vector<int> pass_slot(static_cast<size_t>(A.slot_count()), -1);
    for (int slot = 0; slot < A.slot_count(); ++slot) {
        if (bound_slot[static_cast<size_t>(slot)] >= 0) continue;
        try {
            pass_slot[static_cast<size_t>(slot)] = B.slot_of(A.var_of_slot(slot));
        } catch (const ConfigError&) {
            pass_slot[static_cast<size_t>(slot)] = -2;
        }
    }

    if (lam_producing) {
        // Weight bookkeeping moves wholesale from t-weight to lambda-weight;
        // only sound when no t variable survives.
        for (int a0 = 0; a0 < A.t_count(); ++a0)
            if (bound_slot[static_cast<size_t>(A.slot_of({VarKind::T, a0}))] == -1)
                throw ConfigError("substitute: lambda-producing bindings require all t bound");
    }

    const Region& ra = a.region();
    if (!bindings.empty()) {
        // Substitution re-derives certification from the rectangle caps; a
        // tighter auxiliary cap on the input would be silently forgotten.
        int implied_zw = ra.t_cap;
        for (int n = 0; n < A.s_count(); ++n) {
            if (ra.s_cap(n) >= kInf) { implied_zw = kInf; break; }
            implied_zw = cap_add(implied_zw, (2 * n + 2) * ra.s_cap(n));
        }
        if (ra.zw_cap < implied_zw || ra.t1w_cap < ra.t_cap)
            throw ConfigError("substitute: input carries auxiliary caps tighter than its rectangle");
    }

    Region out;
    out.s_caps.assign(static_cast<size_t>(B.s_count()), kInf);
    out.t_cap = lam_producing ? 0 : ra.t_cap;
    for (int n = 0; n < B.s_count(); ++n)
        out.s_caps[static_cast<size_t>(n)] = n < A.s_count() ? ra.s_cap(n) : kInf;
    out.sminus_cap = ra.sminus_cap;
    out.lam_cap = lam_producing ? ra.t_cap : (A.lambda_count() > 0 ? ra.lam_cap : kInf);
    if (bindings.empty()) {
        out.zw_cap = ra.zw_cap;
        out.t1w_cap = ra.t1w_cap;
    }
    if (z_absorbing) {
        out.shift_cap = std::min(ra.shift_cap, ra.t_cap);
        out.z_supp = Window{cap_add(-ra.t_cap, ra.z_supp.lo), ra.z_supp.hi};
        out.dshift_lo = std::min(0, ra.dshift_lo);
    } else {
        out.shift_cap = ra.shift_cap;
        out.z_supp = ra.z_supp;
        out.dshift_lo = ra.dshift_lo;
    }
    out.z_cert = ra.z_cert;
    out.u_supp = ra.u_supp;

    Series result(target, out);

    // Memoize powers of each binding.
    std::vector<std::map<int, Series>> powers(bindings.size());

    auto power_of = [&](int bi, int e) -> const Series& {
        auto& memo = powers[static_cast<size_t>(bi)];
        auto it = memo.find(e);
        if (it != memo.end()) return it->second;
        if (memo.find(1) == memo.end()) memo.emplace(1, bindings[static_cast<size_t>(bi)].second);
        int have = memo.rbegin()->first;
        while (have < e) {
            Series p = mul(memo.at(have), bindings[static_cast<size_t>(bi)].second);
            p.region() = out;  // intermediates share the output truncation
            p.drop_uncertified();
            ++have;
            memo.emplace(have, std::move(p));
        }
        return memo.at(e);
    };

    for (const auto& [k, c] : a.terms()) {
        Key base = Key::zero(B);
        std::vector<std::pair<int, int>> factor_list;  // (binding index, exponent)
        for (int slot = 0; slot < A.slot_count(); ++slot) {
            int e = k[slot];
            if (e == 0) continue;
            int bi = bound_slot[static_cast<size_t>(slot)];
            if (bi == -1) {
                int bslot = pass_slot[static_cast<size_t>(slot)];
                if (bslot < 0)
                    throw ConfigError("substitute: term uses variable " + A.var_name(slot) +
                                      " that the target space lacks");
                base[bslot] = static_cast<int16_t>(base[bslot] + e);
            } else {
                if (e < 0) throw ConfigError("substitute: negative exponent on bound variable");
                factor_list.push_back({bi, e});
            }
        }
        Series acc = make_monomial(target, out, base, c);
        for (const auto& [bi, e] : factor_list) {
            if (acc.empty()) break;
            acc = mul(acc, power_of(bi, e));
            acc.region() = out;
            acc.drop_uncertified();
        }
        for (const auto& [mono, v] : acc.terms()) result.add_term(mono, v);
    }
    return result;
}

Series set_u_one(const Series& a) {
    if (!a.space().has_u()) return a;
    const VariableSpace& sp = a.space();
    int uslot = sp.slot_of({VarKind::U, 0});
    Region rg = a.region();
    rg.u_supp = Window::point(0);
    Series r(a.space_ptr(), rg);
    for (const auto& [k, c] : a.terms()) {
        Key nk = k;
        nk[uslot] = 0;
        r.add_term_unchecked(nk, c);
    }
    return r;
}

Series restrict_zero(const Series& a, const std::vector<Var>& vars) {
    const VariableSpace& sp = a.space();
    std::vector<int> slots;
    for (Var v : vars) slots.push_back(sp.slot_of(v));
    Series r(a.space_ptr(), a.region());
    for (const auto& [k, c] : a.terms()) {
        bool keep = true;
        for (int s : slots)
            if (k[s] != 0) { keep = false; break; }
        if (keep) r.add_term_unchecked(k, c);
    }
    return r;
}

Series truncate_to(const Series& a, const Region& rg) {
    Series r(a.space_ptr(), a.region().meet(rg));
    for (const auto& [k, c] : a.terms()) r.add_term(k, c);
    return r;
}

bool CmpWindow::contains(const VariableSpace& sp, const Key& k) const {
    KeyGrades g = grades_of(sp, k);
    if (g.t_weight > t_cap) return false;
    for (int n = 0; n < sp.s_count(); ++n)
        if (k[sp.slot_of({VarKind::S, n})] > s_cap(n)) return false;
    if (g.sminus > sminus_cap) return false;
    if (g.lam_weight > lam_cap) return false;
    if (!z.contains(g.z_exp)) return false;
    if (g.deficiency() > shift_cap) return false;
    return true;
}

bool CmpWindow::certified_by(const VariableSpace& sp, const Region& rg) const {
    if (t_cap > rg.t_cap) return false;
    for (int n = 0; n < sp.s_count(); ++n)
        if (s_cap(n) > rg.s_cap(n)) return false;
    if (sminus_cap > rg.sminus_cap) return false;
    if (lam_cap > rg.lam_cap) return false;
    int max_zweight = t_cap;
    for (int n = 0; n < sp.s_count(); ++n) {
        int c = s_cap(n);
        if (c >= kInf) {
            max_zweight = kInf;
            break;
        }
        max_zweight += (2 * n + 2) * c;
    }
    if (max_zweight > rg.zw_cap) return false;
    if (t_cap > rg.t1w_cap) return false;
    if (sp.has_z()) {
        if (z.lo < rg.z_cert.lo || z.hi > rg.z_cert.hi) return false;
        int worst = std::min(shift_cap, cap_add(max_zweight, -z.lo));
        if (worst > rg.shift_cap) return false;
    }
    return true;
}

std::optional<std::pair<Key, Rat>> first_nonzero(const Series& a, const CmpWindow& w) {
    if (!w.certified_by(a.space(), a.region()))
        throw ConfigError("comparison window exceeds the certified region (" +
                          a.region().describe() + ")");
    std::optional<std::pair<Key, Rat>> best;
    for (const auto& [k, c] : a.terms()) {
        if (!w.contains(a.space(), k)) continue;
        if (!best || k < best->first) best = {k, c};
    }
    return best;
}

bool equal_on(const Series& a, const Series& b, const CmpWindow& w) {
    Series d = sub(a, b);
    return !first_nonzero(d, w).has_value();
}

}  // namespace okdv
