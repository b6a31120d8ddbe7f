#ifndef OKDV_TEST_UTIL_HPP
#define OKDV_TEST_UTIL_HPP

#include <initializer_list>
#include <utility>

#include "okdv/series.hpp"

namespace okdvtest {

using namespace okdv;

inline Key mono(const VariableSpace& sp, std::initializer_list<std::pair<Var, int>> exps) {
    Key k = Key::zero(sp);
    for (auto& [v, e] : exps) k[sp.slot_of(v)] = static_cast<int16_t>(e);
    return k;
}

inline Var T(int a) { return {VarKind::T, a}; }
inline Var S(int n = 0) { return {VarKind::S, n}; }
inline Var SM() { return {VarKind::SMinus, 0}; }
inline Var LAM(int i) { return {VarKind::Lambda, i}; }
inline Var Z() { return {VarKind::Z, 0}; }
inline Var U() { return {VarKind::U, 0}; }

// Simple deterministic RNG for property tests.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    int range(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
    Rat rat_small() {
        int num = range(-6, 6);
        int den = range(1, 5);
        return Rat(num, den);
    }
};

}  // namespace okdvtest

#endif
