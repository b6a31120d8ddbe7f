#ifndef OKDV_VARIABLE_SPACE_HPP
#define OKDV_VARIABLE_SPACE_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "okdv/errors.hpp"

namespace okdv {

// Variable roles. Every variable has exactly one role and one grading rule:
//   t_a   weight 2a+1, exponents >= 0
//   s_n   boundary variables (s == s_0), exponents >= 0, z-weight 2n+2
//   s_-   auxiliary boundary variable, exponents >= 0
//   lam_i stored as powers of lambda_i^{-1}, weight 1 per power
//   z     spectral variable, signed exponent
//   u     genus variable, signed exponent
enum class VarKind : uint8_t { T, S, SMinus, Lambda, Z, U };

struct Var {
    VarKind kind;
    int index;  // a for t_a, n for s_n, i for lambda_i; 0 otherwise
};

class VariableSpace;
using SpacePtr = std::shared_ptr<const VariableSpace>;

class VariableSpace {
public:
    static constexpr int kMaxSlots = 28;

    VariableSpace(int t_count, int s_count, bool has_sminus, int lambda_count,
                  bool has_z, bool has_u)
        : t_count_(t_count),
          s_count_(s_count),
          has_sminus_(has_sminus),
          lambda_count_(lambda_count),
          has_z_(has_z),
          has_u_(has_u) {
        if (t_count < 0 || s_count < 0 || lambda_count < 0)
            throw ConfigError("VariableSpace: negative variable count");
        if (slot_count() > kMaxSlots)
            throw ConfigError("VariableSpace: too many variables for one space");
    }

    static SpacePtr make(int t_count, int s_count, bool has_sminus,
                         int lambda_count, bool has_z, bool has_u) {
        return std::make_shared<VariableSpace>(t_count, s_count, has_sminus,
                                               lambda_count, has_z, has_u);
    }

    int t_count() const { return t_count_; }
    int s_count() const { return s_count_; }
    bool has_sminus() const { return has_sminus_; }
    int lambda_count() const { return lambda_count_; }
    bool has_z() const { return has_z_; }
    bool has_u() const { return has_u_; }

    int slot_count() const {
        return t_count_ + s_count_ + (has_sminus_ ? 1 : 0) + lambda_count_ +
               (has_z_ ? 1 : 0) + (has_u_ ? 1 : 0);
    }

    int slot_of(Var v) const {
        switch (v.kind) {
            case VarKind::T:
                if (v.index < 0 || v.index >= t_count_) throw ConfigError("no such t variable");
                return v.index;
            case VarKind::S:
                if (v.index < 0 || v.index >= s_count_) throw ConfigError("no such s variable");
                return t_count_ + v.index;
            case VarKind::SMinus:
                if (!has_sminus_) throw ConfigError("space has no s_- variable");
                return t_count_ + s_count_;
            case VarKind::Lambda:
                if (v.index < 0 || v.index >= lambda_count_) throw ConfigError("no such lambda variable");
                return t_count_ + s_count_ + (has_sminus_ ? 1 : 0) + v.index;
            case VarKind::Z:
                if (!has_z_) throw ConfigError("space has no z variable");
                return t_count_ + s_count_ + (has_sminus_ ? 1 : 0) + lambda_count_;
            case VarKind::U:
                if (!has_u_) throw ConfigError("space has no u variable");
                return t_count_ + s_count_ + (has_sminus_ ? 1 : 0) + lambda_count_ + (has_z_ ? 1 : 0);
        }
        throw ConfigError("slot_of: bad variable");
    }

    Var var_of_slot(int slot) const {
        int k = slot;
        if (k < t_count_) return {VarKind::T, k};
        k -= t_count_;
        if (k < s_count_) return {VarKind::S, k};
        k -= s_count_;
        if (has_sminus_) {
            if (k == 0) return {VarKind::SMinus, 0};
            k -= 1;
        }
        if (k < lambda_count_) return {VarKind::Lambda, k};
        k -= lambda_count_;
        if (has_z_) {
            if (k == 0) return {VarKind::Z, 0};
            k -= 1;
        }
        if (has_u_ && k == 0) return {VarKind::U, 0};
        throw ConfigError("var_of_slot: bad slot");
    }

    bool signed_slot(int slot) const {
        Var v = var_of_slot(slot);
        return v.kind == VarKind::Z || v.kind == VarKind::U;
    }

    std::string var_name(int slot) const {
        Var v = var_of_slot(slot);
        switch (v.kind) {
            case VarKind::T: return "t" + std::to_string(v.index);
            case VarKind::S: return v.index == 0 ? "s" : "s" + std::to_string(v.index);
            case VarKind::SMinus: return "s-";
            case VarKind::Lambda: return "l" + std::to_string(v.index + 1);
            case VarKind::Z: return "z";
            case VarKind::U: return "u";
        }
        return "?";
    }

    bool same_shape(const VariableSpace& o) const {
        return t_count_ == o.t_count_ && s_count_ == o.s_count_ &&
               has_sminus_ == o.has_sminus_ && lambda_count_ == o.lambda_count_ &&
               has_z_ == o.has_z_ && has_u_ == o.has_u_;
    }

private:
    int t_count_;
    int s_count_;
    bool has_sminus_;
    int lambda_count_;
    bool has_z_;
    bool has_u_;
};

// Exponent vector over a VariableSpace. Fixed-capacity, value type.
struct Key {
    std::array<int16_t, VariableSpace::kMaxSlots> e{};
    uint8_t n = 0;

    static Key zero(const VariableSpace& sp) {
        Key k;
        k.n = static_cast<uint8_t>(sp.slot_count());
        return k;
    }

    int16_t operator[](int i) const { return e[static_cast<size_t>(i)]; }
    int16_t& operator[](int i) { return e[static_cast<size_t>(i)]; }

    bool operator==(const Key& o) const {
        return n == o.n && std::memcmp(e.data(), o.e.data(), sizeof(int16_t) * n) == 0;
    }
    bool operator!=(const Key& o) const { return !(*this == o); }

    // Lexicographic order on exponents; used wherever determinism matters.
    bool operator<(const Key& o) const {
        if (n != o.n) return n < o.n;
        return std::memcmp(e.data(), o.e.data(), sizeof(int16_t) * n) < 0;
    }

    Key plus(const Key& o) const {
        Key r = *this;
        for (int i = 0; i < n; ++i) r.e[static_cast<size_t>(i)] = static_cast<int16_t>(r.e[static_cast<size_t>(i)] + o.e[static_cast<size_t>(i)]);
        return r;
    }
};

struct KeyHash {
    size_t operator()(const Key& k) const {
        uint64_t h = 1469598103934665603ull;
        for (int i = 0; i < k.n; ++i) {
            h ^= static_cast<uint16_t>(k.e[static_cast<size_t>(i)]);
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

// Grading functionals used by truncation bookkeeping.
struct KeyGrades {
    int t_weight;     // sum (2a+1) * e(t_a)
    int t1_weight;    // t_weight excluding the t_0 contribution
    int s_total;      // sum e(s_n)
    int sminus;       // e(s_-)
    int lam_weight;   // sum e(lambda_i^{-1})
    int z_exp;        // signed
    int u_exp;        // signed
    int z_weight;     // t_weight + sum (2n+2) e(s_n); z-units carried by t/s monomials
    int size;         // t_weight + s_total + sminus + lam_weight (non-u, non-z mass)

    int deficiency() const { return z_weight - z_exp; }
};

inline KeyGrades grades_of(const VariableSpace& sp, const Key& k) {
    KeyGrades g{0, 0, 0, 0, 0, 0, 0, 0, 0};
    int slot = 0;
    for (int a = 0; a < sp.t_count(); ++a, ++slot) g.t_weight += (2 * a + 1) * k[slot];
    if (sp.t_count() > 0) g.t1_weight = g.t_weight - k[0];
    for (int n = 0; n < sp.s_count(); ++n, ++slot) {
        g.s_total += k[slot];
        g.z_weight += (2 * n + 2) * k[slot];
    }
    if (sp.has_sminus()) { g.sminus = k[slot]; ++slot; }
    for (int i = 0; i < sp.lambda_count(); ++i, ++slot) g.lam_weight += k[slot];
    if (sp.has_z()) { g.z_exp = k[slot]; ++slot; }
    if (sp.has_u()) { g.u_exp = k[slot]; ++slot; }
    g.z_weight += g.t_weight;
    g.size = g.t_weight + g.s_total + g.sminus + g.lam_weight;
    return g;
}

}  // namespace okdv

#endif
