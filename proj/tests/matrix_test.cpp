#include "okdv/matrix_model.hpp"

#include "doctest.h"
#include "okdv/errors.hpp"
#include "okdv/open.hpp"
#include "test_util.hpp"

using namespace okdv;
using namespace okdvtest;

namespace {

EntryMono entry_mono(int N, std::vector<std::pair<std::pair<int, int>, int>> entries) {
    EntryMono m(static_cast<size_t>(N * N), 0);
    for (auto& [ij, e] : entries) m[static_cast<size_t>(ij.first * N + ij.second)] = e;
    return m;
}

}  // namespace

TEST_CASE("Wick pair covariances") {
    LambdaSpec spec{2, {parse_rat("3"), parse_rat("5")}};
    WickEngine w(spec, 24);
    // <h_{1,2} h_{2,1}> = 2/(l1+l2); indices 0-based internally
    CHECK(w.expectation(entry_mono(2, {{{0, 1}, 1}, {{1, 0}, 1}})) == rat(2, 8));
    // <h_{1,1}^2> = 1/l1
    CHECK(w.expectation(entry_mono(2, {{{0, 0}, 2}})) == rat(1, 3));
    // <h_{1,1} h_{2,2}> = 0
    CHECK(w.expectation(entry_mono(2, {{{0, 0}, 1}, {{1, 1}, 1}})) == Rat(0));
    // odd degree
    CHECK(w.expectation(entry_mono(2, {{{0, 1}, 3}})) == Rat(0));

    LambdaSpec spec1{1, {parse_rat("7")}};
    WickEngine w1(spec1, 24);
    // <h^6> = 15/l^3
    CHECK(w1.expectation(entry_mono(1, {{{0, 0}, 6}})) == Rat(15) / pow_rat(Rat(7), 3));

    CHECK_THROWS_AS((LambdaSpec{2, {Rat(3), Rat(3)}}.validate()), ConfigError);
}

TEST_CASE("Wick symmetry under factor permutation and relabeling") {
    // expectation depends only on the multiset; relabeling lambda with the
    // word's indices leaves trace expectations unchanged
    LambdaSpec spec{2, {parse_rat("3"), parse_rat("5")}};
    LambdaSpec swapped{2, {parse_rat("5"), parse_rat("3")}};
    WickEngine w(spec, 24), ws(swapped, 24);
    // <tr H^4> under both labelings
    MatrixBounds b0;
    b0.grade_cap = 4;
    TracePolynomial p;
    TraceKey k;
    k.words.push_back(canonical_rotation({0, 0, 0, 0}));
    p.add(k, {Rat(1), Rat(0)});
    GradedCoeffs a = trace_expectation(p, w, b0);
    GradedCoeffs b = trace_expectation(p, ws, b0);
    CHECK(a.at(0, 0, 2) == b.at(0, 0, 2));
}

TEST_CASE("trace expectations") {
    LambdaSpec spec{2, {parse_rat("3"), parse_rat("5")}};
    WickEngine w(spec, 24);
    MatrixBounds b0;
    b0.grade_cap = 6;

    // <tr H^2> = 1/3 + 1/5 + 2 * 2/8
    TracePolynomial p;
    TraceKey k;
    k.words.push_back(canonical_rotation({0, 0}));
    p.add(k, {Rat(1), Rat(0)});
    CHECK(trace_expectation(p, w, b0).at(0, 0, 1) == rat(1, 3) + rat(1, 5) + rat(1, 2));

    // <(tr H^3)^2> at N=1 reduces to <h^6> = 15/l^3
    LambdaSpec spec1{1, {parse_rat("2")}};
    WickEngine w1(spec1, 24);
    TracePolynomial q;
    TraceKey k2;
    k2.words.push_back(canonical_rotation({0, 0, 0}));
    k2.words.push_back(canonical_rotation({0, 0, 0}));
    q.add(k2, {Rat(1), Rat(0)});
    CHECK(trace_expectation(q, w1, b0).at(0, 0, 3) == Rat(15) / pow_rat(Rat(2), 3));

    // <tr H^3> = 0 (odd)
    TracePolynomial odd;
    TraceKey k3;
    k3.words.push_back(canonical_rotation({0, 0, 0}));
    odd.add(k3, {Rat(1), Rat(0)});
    CHECK(trace_expectation(odd, w, b0).coef.empty());
}

TEST_CASE("catalan resolvent") {
    MatrixBounds b0;
    b0.grade_cap = 2 * 9;
    b0.sminus_cap = 4;
    MatSeries g = catalan_resolvent(b0);
    // coefficients 1, 1, 2, 5 on s_-^0..s_-^3
    std::vector<Rat> want{Rat(1), Rat(1), Rat(2), Rat(5)};
    for (int m = 0; m <= 3; ++m) {
        MatKey k;
        k.word = {2 * m + 1};
        k.sminus = m;
        auto it = g.terms.find(k);
        REQUIRE(it != g.terms.end());
        CHECK(it->second.re == want[static_cast<size_t>(m)]);
        CHECK(is_zero(it->second.im));
    }

    // s_- G^2 - Lambda G + 1 = 0, checked on the collapsed Laurent series
    std::map<std::pair<int, int>, Rat> G;  // (power of Lambda^{-1}, s_- exp)
    for (const auto& [k, c] : g.terms) G[{k.word[0], k.sminus}] = c.re;
    std::map<std::pair<int, int>, Rat> resid;
    for (const auto& [k1, v1] : G)
        for (const auto& [k2, v2] : G) {
            int d = k1.first + k2.first, m = k1.second + k2.second + 1;
            if (d > b0.grade_cap / 2 || m > 4) continue;
            resid[{d, m}] += v1 * v2;
        }
    for (const auto& [k, v] : G) resid[{k.first - 1, k.second}] -= v;
    resid[{0, 0}] += Rat(1);
    for (const auto& [k, v] : resid) {
        if (k.first > b0.grade_cap / 2 - 2 || k.second > 3) continue;
        CHECK(is_zero(v));
    }
}

TEST_CASE("boundary action") {
    MatrixBounds b0;
    b0.grade_cap = 8;
    b0.s_cap = 4;
    b0.sminus_cap = 2;
    TracePolynomial ib = boundary_action(b0);

    // s^1 s_-^0 with no H: -tr Lambda^{-1}
    TraceKey k;
    k.s = 1;
    k.words.push_back(Word{1});
    auto it = ib.terms.find(k);
    REQUIRE(it != ib.terms.end());
    CHECK(it->second.re == Rat(-1));
    CHECK(is_zero(it->second.im));

    // odd in s: every term carries odd s-degree
    for (const auto& [key, c] : ib.terms) CHECK(key.s % 2 == 1);
}

TEST_CASE("Kontsevich expectation matches Miwa(tau^c)") {
    Series tau_c = exp_series(solve_closed_free_energy(9).F);

    for (auto spec : {LambdaSpec{1, {parse_rat("3")}},
                      LambdaSpec{2, {parse_rat("3"), parse_rat("5")}}}) {
        GradedCoeffs lhs = kontsevich_expectation(spec, 6);
        GradedCoeffs rhs = miwa_substitute(tau_c, spec);
        for (int m = 0; m <= 6; ++m) CHECK(lhs.at(0, 0, m) == rhs.at(0, 0, m));
    }

    // N=1 closed form at low order: 1 - 5/(24 l^3)
    LambdaSpec s1{1, {parse_rat("3")}};
    GradedCoeffs k1 = kontsevich_expectation(s1, 3);
    CHECK(k1.at(0, 0, 0) == Rat(1));
    CHECK(k1.at(0, 0, 3) == rat(-5, 24) / pow_rat(Rat(3), 3));
    // odd grading levels vanish
    CHECK(k1.at(0, 0, 1) == Rat(0));
    CHECK(k1.at(0, 0, 2) == Rat(0));
}

TEST_CASE("grading homogeneity under lambda rescaling") {
    LambdaSpec spec{2, {parse_rat("3"), parse_rat("5")}};
    LambdaSpec doubled{2, {parse_rat("6"), parse_rat("10")}};
    GradedCoeffs a = kontsevich_expectation(spec, 6);
    GradedCoeffs c = kontsevich_expectation(doubled, 6);
    for (const auto& [key, v] : a.coef) {
        auto [s, sm, m] = key;
        CHECK(c.at(s, sm, m) == v / pow_rat(Rat(2), m));
    }
}

TEST_CASE("Miwa substitution basics") {
    // t_0^2 at N=2, lambda=(1,2): (-(1 + 1/2))^2 = 9/4
    auto sp = VariableSpace::make(1, 1, false, 0, false, true);
    Region rg = Region::exact(*sp);
    rg.t_cap = 4;
    rg.s_caps[0] = 4;
    Series t0sq = make_monomial(sp, rg, mono(*sp, {{T(0), 2}}), Rat(1));
    LambdaSpec spec{2, {parse_rat("1"), parse_rat("2")}};
    CHECK(miwa_substitute(t0sq, spec).at(0, 0, 2) == rat(9, 4));

    // the s^3/6 coefficient passes through untouched
    Series s3 = make_monomial(sp, rg, mono(*sp, {{S(0), 3}, {U(), -1}}), rat(1, 6));
    CHECK(miwa_substitute(s3, spec).at(3, 0, 0) == rat(1, 6));
}

TEST_CASE("open matrix integral reproduces Miwa(tau^o)") {
    int Dlam = 6, s_cap = 3;
    Series Fc = solve_closed_free_energy(Dlam).F;
    OpenBounds b{Dlam, s_cap, {}};
    Series Fo = solve_open_virasoro(Fc, b);
    Series F = add(Fo, closed_into(Fc, Fo.space_ptr()));
    Region r = Region::exact(Fo.space());
    r.t_cap = Dlam;
    r.s_caps[0] = s_cap;
    Series tau_o = exp_series(truncate_to(F, r));

    for (auto spec : {LambdaSpec{1, {parse_rat("3")}},
                      LambdaSpec{2, {parse_rat("3"), parse_rat("5")}}}) {
        OpenMatrixResult om = open_matrix_integral(spec, Dlam, s_cap);
        GradedCoeffs expect = miwa_substitute(tau_o, spec);
        // the s = s_- = 0 slice of f^o_N is the Kontsevich expectation
        GradedCoeffs closed = kontsevich_expectation(spec, Dlam);
        for (int m = 0; m <= Dlam; ++m) CHECK(om.f_o.at(0, 0, m) == closed.at(0, 0, m));
        for (int a = 0; a <= s_cap; ++a)
            for (int m = 0; m <= Dlam; ++m) {
                INFO("N=", spec.N, " a=", a, " m=", m);
                CHECK(om.tau_o.at(a, 0, m) == expect.at(a, 0, m));
            }
    }
}

TEST_CASE("N=3 cross check at small grading") {
    Series tau_c = exp_series(solve_closed_free_energy(6).F);
    LambdaSpec spec{3, {parse_rat("2"), parse_rat("3"), parse_rat("7/2")}};
    GradedCoeffs lhs = kontsevich_expectation(spec, 6);
    GradedCoeffs rhs = miwa_substitute(tau_c, spec);
    for (int m = 0; m <= 6; ++m) CHECK(lhs.at(0, 0, m) == rhs.at(0, 0, m));
}
