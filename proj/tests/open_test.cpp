#include "okdv/open.hpp"

#include "doctest.h"
#include "okdv/errors.hpp"
#include "test_util.hpp"

using namespace okdv;
using namespace okdvtest;

namespace {

const Series& closed_F(int d_t) {
    static std::map<int, Series> cache;
    auto it = cache.find(d_t);
    if (it == cache.end())
        it = cache.emplace(d_t, solve_closed_free_energy(d_t).F).first;
    return it->second;
}

}  // namespace

TEST_CASE("open Virasoro operators on the constant series") {
    OpenBounds b{6, 4, {}};
    auto sp = open_space(b);
    Region rg = Region::exact(*sp);
    rg.t_cap = 6;
    rg.s_caps[0] = 4;
    Series one = make_const(sp, rg, Rat(1));

    // cal L_0 1 = 1/16 + 3/4
    Series l0 = open_virasoro_apply(0, one, false);
    CHECK(l0.coeff(Key::zero(*sp)) == rat(1, 16) + rat(3, 4));
    CHECK(l0.term_count() == 1);

    // cal L_{-1} 1 = u^{-2} t_0^2/2 + u^{-1} s
    Series lm1 = open_virasoro_apply(-1, one, false);
    CHECK(lm1.coeff(mono(*sp, {{T(0), 2}, {U(), -2}})) == rat(1, 2));
    CHECK(lm1.coeff(mono(*sp, {{S(0), 1}, {U(), -1}})) == Rat(1));
    CHECK(lm1.term_count() == 2);

    // extended cal L_{-1} on 1 agrees (s_1-terms act by derivative only)
    OpenBounds be{6, 4, {2}};
    auto spe = open_space(be);
    Region rge = Region::exact(*spe);
    rge.t_cap = 6;
    rge.s_caps[0] = 4;
    rge.s_caps[1] = 2;
    Series onee = make_const(spe, rge, Rat(1));
    Series lm1e = open_virasoro_apply(-1, onee, true);
    CHECK(lm1e.coeff(mono(*spe, {{T(0), 2}, {U(), -2}})) == rat(1, 2));
    CHECK(lm1e.coeff(mono(*spe, {{S(0), 1}, {U(), -1}})) == Rat(1));
    CHECK(lm1e.term_count() == 2);

    CHECK_THROWS_AS(open_virasoro_apply(-2, one, false), ConfigError);
}

TEST_CASE("solve_open_virasoro reproduces the initial condition") {
    OpenBounds b{8, 5, {}};
    Series Fo = solve_open_virasoro(closed_F(8), b);
    const VariableSpace& sp = Fo.space();

    CHECK(Fo.coeff(mono(sp, {{S(0), 3}, {U(), -1}})) == rat(1, 6));
    CHECK(Fo.coeff(mono(sp, {{T(0), 1}, {S(0), 1}, {U(), -1}})) == Rat(1));

    // restriction to t_{>=1} = 0 is u^{-1}(s^3/6 + t_0 s) exactly
    std::vector<Var> higher;
    for (int a = 1; a < sp.t_count(); ++a) higher.push_back(T(a));
    Series slice = restrict_zero(Fo, higher);
    CHECK(slice.term_count() == 2);

    // <tau_0^2 sigma>_g = 0 for every g: no u power carries t_0^2 s
    for (int u = -3; u <= 6; ++u)
        CHECK(Fo.coeff(mono(sp, {{T(0), 2}, {S(0), 1}, {U(), u}})) == Rat(0));

    // <tau_1>^o_1 = 1/2 (coefficient of t_1 u^0)
    CHECK(Fo.coeff(mono(sp, {{T(1), 1}})) == rat(1, 2));
}

TEST_CASE("route equality: Virasoro solve vs Burgers-KdV evolution") {
    OpenBounds b{8, 5, {}};
    Series a = solve_open_virasoro(closed_F(8), b);
    Series c = evolve_burgers_kdv(closed_F(8 + 2 * 5), b, false);
    CmpWindow w;
    w.t_cap = 8;
    w.s_caps = {5};
    CHECK(equal_on(a, c, w));
}

TEST_CASE("open string and dilaton") {
    OpenBounds b{8, 5, {}};
    Series Fo = solve_open_virasoro(closed_F(8), b);
    auto [str, dil] = check_open_string_dilaton(Fo);
    CHECK_FALSE(first_nonzero(str, full_window(str)).has_value());
    CHECK_FALSE(first_nonzero(dil, full_window(dil)).has_value());

    // F = 0: inhomogeneous terms only
    auto sp = Fo.space_ptr();
    Region rg = Region::exact(*sp);
    rg.t_cap = 6;
    rg.s_caps[0] = 4;
    Series zero = make_zero(sp, rg);
    auto [str0, dil0] = check_open_string_dilaton(zero);
    CHECK(str0.coeff(mono(*sp, {{S(0), 1}, {U(), -1}})) == Rat(-1));
    CHECK(str0.term_count() == 1);
    CHECK(dil0.coeff(Key::zero(*sp)) == rat(-1, 2));
    CHECK(dil0.term_count() == 1);

    // toy F = u^{-1} t_0 s over a (t_0, s) space: string holds, dilaton fails
    auto spt = VariableSpace::make(1, 1, false, 0, false, true);
    Region rgt = Region::exact(*spt);
    rgt.t_cap = 4;
    rgt.s_caps[0] = 3;
    Series toy = make_monomial(spt, rgt, mono(*spt, {{T(0), 1}, {S(0), 1}, {U(), -1}}), Rat(1));
    auto [strt, dilt] = check_open_string_dilaton(toy);
    CHECK_FALSE(first_nonzero(strt, full_window(strt)).has_value());
    CHECK(first_nonzero(dilt, full_window(dilt)).has_value());
}

TEST_CASE("open KdV residuals") {
    OpenBounds b{8, 5, {}};
    Series Fo = solve_open_virasoro(closed_F(8), b);
    for (int n = 1; n <= 2; ++n) {
        Series r = check_open_kdv(Fo, closed_F(8), n);
        CHECK_FALSE(first_nonzero(r, full_window(r)).has_value());
    }

    // F^o = u^{-1} s^3/6 alone fails the n=1 equation at some t-monomial
    auto sp = Fo.space_ptr();
    Region rg = Fo.region();
    Series toy = make_monomial(sp, rg, mono(*sp, {{S(0), 3}, {U(), -1}}), rat(1, 6));
    Series rt = check_open_kdv(toy, closed_F(8), 1);
    CHECK(first_nonzero(rt, full_window(rt)).has_value());
}

TEST_CASE("open Virasoro annihilation on tau^o") {
    OpenBounds b{8, 4, {}};
    Series Fo = solve_open_virasoro(closed_F(8), b);
    Series F = add(Fo, closed_into(closed_F(8), Fo.space_ptr()));
    Series tau = exp_series(truncate_to(F, Fo.region()));
    for (int n = -1; n <= 2; ++n) {
        Series r = open_virasoro_apply(n, tau, false);
        CHECK_FALSE(first_nonzero(r, full_window(r)).has_value());
    }
}

TEST_CASE("extended evolution restricts to the plain one") {
    OpenBounds be{6, 3, {2, 2}};
    // plain bounds for comparison
    OpenBounds bp{6, 3, {}};
    int phi = 6 + 2 * 3 + 4 * 2 + 6 * 2;
    Series Fext = evolve_burgers_kdv(closed_F(phi), be, true);
    Series Fpl = evolve_burgers_kdv(closed_F(6 + 2 * 3), bp, false);

    Series restricted = restrict_zero(Fext, {S(1), S(2)});
    Series Fpl_e = embed(Fpl, Fext.space_ptr());
    CmpWindow w;
    w.t_cap = 6;
    w.s_caps = {3, 0, 0};
    CHECK(equal_on(restricted, Fpl_e, w));
}

TEST_CASE("extended sector: s_n reduction and extended Virasoro") {
    // s_3 rides along as a spectator: cal L_1^ext reads d/ds_3 on s_2 data
    OpenBounds be{6, 4, {2, 2, 1}};
    int phi = 6 + 2 * 4 + 4 * 2 + 6 * 2 + 8 * 1;
    Series Fext = evolve_burgers_kdv(closed_F(phi), be, true);
    Series F = add(Fext, closed_into(closed_F(phi), Fext.space_ptr()));
    Series tau = exp_series(truncate_to(F, Fext.region()));

    for (int n = 1; n <= 2; ++n) {
        Series r = check_sn_reduction(tau, n);
        CHECK_FALSE(first_nonzero(r, full_window(r)).has_value());
    }
    for (int n = -1; n <= 1; ++n) {
        Series r = open_virasoro_apply(n, tau, true);
        CHECK_FALSE(first_nonzero(r, full_window(r)).has_value());
    }

    // toy violation: tau = e^{s_0} has d tau/ds_1 = 0 but rhs = (u/2) e^{s_0}
    auto sp = tau.space_ptr();
    Region rg = Region::exact(*sp);
    rg.t_cap = 4;
    rg.s_caps.assign(rg.s_caps.size(), 0);
    rg.s_caps[0] = 4;
    rg.s_caps[1] = 1;  // the d/ds_1 side must stay certified at s_1 = 0
    Series es = exp_series(make_monomial(sp, rg, mono(*sp, {{S(0), 1}}), Rat(1)));
    Series rt = check_sn_reduction(es, 1);
    CHECK(first_nonzero(rt, full_window(rt)).has_value());
}

TEST_CASE("flow residuals vanish on the evolved solution") {
    OpenBounds b{8, 4, {}};
    const Series& Fc = closed_F(8 + 2 * 4);
    Series F = evolve_burgers_kdv(Fc, b, false);
    Series rs = check_s_flow(F, Fc);
    CHECK_FALSE(first_nonzero(rs, full_window(rs)).has_value());
    for (int n = 1; n <= 3; ++n) {
        Series rt = check_t_flow(F, Fc, n);
        CHECK_FALSE(first_nonzero(rt, full_window(rt)).has_value());
    }
}

TEST_CASE("open correlator table extraction") {
    OpenBounds b{8, 5, {}};
    Series Fo = solve_open_virasoro(closed_F(8), b);
    OpenCorrelatorTable table = extract_open_table(Fo, "virasoro");
    CHECK(table.lookup({0, 3, {}}) == Rat(1));      // <sigma^3>_0
    CHECK(table.lookup({0, 1, {0}}) == Rat(1));     // <tau_0 sigma>_0
    CHECK(table.lookup({1, 0, {1}}) == rat(1, 2));  // <tau_1>_1
    CHECK(table.lookup({0, 1, {0, 0}}) == Rat(0));  // dimension constraint
}
