#ifndef OKDV_SERIES_HPP
#define OKDV_SERIES_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "okdv/rational.hpp"
#include "okdv/region.hpp"
#include "okdv/variable_space.hpp"

namespace okdv {

// Sparse truncated formal series with exact rational coefficients.
// Immutable by convention: operations return fresh values.
class Series {
public:
    Series(SpacePtr space, Region region)
        : space_(std::move(space)), region_(std::move(region)) {
        region_.s_caps.resize(static_cast<size_t>(space_->s_count()), kInf);
    }

    const VariableSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    const Region& region() const { return region_; }
    Region& region() { return region_; }

    const std::unordered_map<Key, Rat, KeyHash>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    // Accumulates c on mono, pruning zeros and anything outside the
    // certified region (partial sums must not masquerade as data).
    void add_term(const Key& mono, const Rat& c);
    // As add_term but the caller guarantees the monomial is certified.
    void add_term_unchecked(const Key& mono, const Rat& c);

    // Stored coefficient; throws TruncationError outside the certified region.
    Rat coeff(const Key& mono) const;
    // Stored coefficient or zero, no certification check (internal use).
    Rat coeff_raw(const Key& mono) const;

    std::vector<std::pair<Key, Rat>> sorted_terms() const;

    // Re-derives the z/u support claims and the deficiency floor from the
    // stored terms. Only sound when the series is exact in z (full z_cert,
    // no deficiency bound), i.e. freshly constructed objects.
    void refresh_support();

    void drop_uncertified();

    std::string to_string(size_t max_terms = 40) const;

private:
    SpacePtr space_;
    Region region_;
    std::unordered_map<Key, Rat, KeyHash> terms_;
};

// --- constructors ---------------------------------------------------------
Series make_zero(SpacePtr sp, Region rg);
Series make_const(SpacePtr sp, Region rg, const Rat& c);
Series make_monomial(SpacePtr sp, Region rg, const Key& mono, const Rat& c);

// --- arithmetic ------------------------------------------------------------
Series add(const Series& a, const Series& b);
Series sub(const Series& a, const Series& b);
Series neg(const Series& a);
Series scale(const Series& a, const Rat& c);
Series mul(const Series& a, const Series& b);
Series mul_monomial(const Series& a, const Key& mono, const Rat& c);

// exp: argument may have no constant term in the non-u variables (u-only
// monomials included). log: constant term must be exactly 1.
Series exp_series(const Series& a);
Series log_series(const Series& a);

// --- calculus --------------------------------------------------------------
Series diff(const Series& a, Var v);
Series integrate(const Series& a, Var v);

// --- substitution ----------------------------------------------------------
// Generic exact substitution. Unbound variables map through by identity and
// must exist in the target space. Each binding must either be weight
// balanced (every monomial's t/s/lambda mass >= the substituted variable's
// weight) or compensate its weight deficit exactly with z exponents, in
// which case the deficit is absorbed into the output's deficiency budget.
Series substitute(const Series& a, const std::vector<std::pair<Var, Series>>& bindings,
                  SpacePtr target);

// Sets u = 1 (folds u exponents away).
Series set_u_one(const Series& a);

// Drops every monomial that contains any of the given variables.
Series restrict_zero(const Series& a, const std::vector<Var>& vars);

// Narrow the certified region (never widens); prunes storage accordingly.
Series truncate_to(const Series& a, const Region& rg);

// --- queries ----------------------------------------------------------------
// First (lexicographically smallest) nonzero term inside `window`, or
// nullopt when the series vanishes there. Throws ConfigError when the
// requested window is not fully certified by the series.
struct CmpWindow {
    int t_cap = 0;
    std::vector<int> s_caps;
    int sminus_cap = 0;
    int lam_cap = 0;
    Window z = Window::point(0);
    int shift_cap = kInf;  // cap on deficiency(m) = z_weight(m) - z_exp(m)
    int s_cap_default = 0;

    int s_cap(int n) const {
        return n < static_cast<int>(s_caps.size()) ? s_caps[static_cast<size_t>(n)] : s_cap_default;
    }
    bool contains(const VariableSpace& sp, const Key& k) const;
    // Every monomial of the window must be certified by rg.
    bool certified_by(const VariableSpace& sp, const Region& rg) const;
};

std::optional<std::pair<Key, Rat>> first_nonzero(const Series& a, const CmpWindow& w);
bool equal_on(const Series& a, const Series& b, const CmpWindow& w);

std::string key_to_string(const VariableSpace& sp, const Key& k);

}  // namespace okdv

#endif
