#include "okdv/matrix_model.hpp"

#include <algorithm>
#include <tuple>

#include "okdv/errors.hpp"

namespace okdv {

void LambdaSpec::validate() const {
    if (N < 1 || static_cast<int>(lambda.size()) != N)
        throw ConfigError("LambdaSpec: need N positive entries");
    for (int i = 0; i < N; ++i) {
        if (sgn(lambda[static_cast<size_t>(i)]) <= 0)
            throw ConfigError("LambdaSpec: lambda entries must be positive");
        for (int j = i + 1; j < N; ++j)
            if (lambda[static_cast<size_t>(i)] == lambda[static_cast<size_t>(j)])
                throw ConfigError("LambdaSpec: lambda entries must be pairwise distinct");
    }
}

int word_grade(const Word& w) {
    int g = 0;
    for (int l : w) g += l == 0 ? 1 : 2 * l;
    return g;
}

int word_h_count(const Word& w) {
    int c = 0;
    for (int l : w) c += l == 0 ? 1 : 0;
    return c;
}

Word canonical_rotation(Word w) {
    if (w.size() <= 1) return w;
    Word best = w;
    for (size_t r = 1; r < w.size(); ++r) {
        std::rotate(w.begin(), w.begin() + 1, w.end());
        if (w < best) best = w;
    }
    return best;
}

bool TraceKey::operator<(const TraceKey& o) const {
    if (s != o.s) return s < o.s;
    if (sminus != o.sminus) return sminus < o.sminus;
    return words < o.words;
}

bool MatKey::operator<(const MatKey& o) const {
    if (s != o.s) return s < o.s;
    if (sminus != o.sminus) return sminus < o.sminus;
    return word < o.word;
}

void TracePolynomial::add(const TraceKey& k, const CxRat& c) {
    if (c.zero()) return;
    auto it = terms.find(k);
    if (it == terms.end()) {
        terms.emplace(k, c);
    } else {
        it->second.re += c.re;
        it->second.im += c.im;
        if (it->second.zero()) terms.erase(it);
    }
}

int TracePolynomial::max_grade() const {
    int g = 0;
    for (const auto& [k, c] : terms) {
        int tg = 0;
        for (const auto& w : k.words) tg += word_grade(w);
        g = std::max(g, tg);
    }
    return g;
}

void MatSeries::add(const MatKey& k, const CxRat& c) {
    if (c.zero()) return;
    auto it = terms.find(k);
    if (it == terms.end()) {
        terms.emplace(k, c);
    } else {
        it->second.re += c.re;
        it->second.im += c.im;
        if (it->second.zero()) terms.erase(it);
    }
}

namespace {
CxRat cx_mul(const CxRat& a, const CxRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
int term_grade(const TraceKey& k) {
    int g = 0;
    for (const auto& w : k.words) g += word_grade(w);
    return g;
}
}  // namespace

TracePolynomial tp_mul(const TracePolynomial& a, const TracePolynomial& b,
                       const MatrixBounds& b0) {
    TracePolynomial r;
    for (const auto& [ka, ca] : a.terms) {
        int ga = term_grade(ka);
        for (const auto& [kb, cb] : b.terms) {
            if (ga + term_grade(kb) > b0.grade_cap) continue;
            TraceKey k;
            k.s = ka.s + kb.s;
            k.sminus = ka.sminus + kb.sminus;
            if (k.s > b0.s_cap || k.sminus > b0.sminus_cap) continue;
            k.words = ka.words;
            k.words.insert(k.words.end(), kb.words.begin(), kb.words.end());
            std::sort(k.words.begin(), k.words.end());
            r.add(k, cx_mul(ca, cb));
        }
    }
    return r;
}

TracePolynomial tp_exp(const TracePolynomial& a, const MatrixBounds& b0) {
    for (const auto& [k, c] : a.terms)
        if (term_grade(k) + 2 * k.s + 2 * k.sminus == 0)
            throw ConfigError("tp_exp: constant term present");
    TracePolynomial r, term;
    term.add(TraceKey{}, {Rat(1), Rat(0)});
    r.add(TraceKey{}, {Rat(1), Rat(0)});
    for (long k = 1;; ++k) {
        term = tp_mul(term, a, b0);
        if (term.terms.empty()) break;
        for (auto& [key, c] : term.terms)
            r.add(key, {c.re / Rat(k), c.im / Rat(k)});
        // fold the 1/k into term so the next product keeps 1/k!
        for (auto& [key, c] : term.terms) {
            c.re /= Rat(k);
            c.im /= Rat(k);
        }
        if (k > 10000) throw InternalInconsistency("tp_exp failed to terminate");
    }
    return r;
}

MatSeries mat_mul(const MatSeries& a, const MatSeries& b, const MatrixBounds& b0) {
    MatSeries r;
    for (const auto& [ka, ca] : a.terms) {
        int ga = word_grade(ka.word);
        for (const auto& [kb, cb] : b.terms) {
            if (ga + word_grade(kb.word) > b0.grade_cap) continue;
            MatKey k;
            k.s = ka.s + kb.s;
            k.sminus = ka.sminus + kb.sminus;
            if (k.s > b0.s_cap || k.sminus > b0.sminus_cap) continue;
            k.word = ka.word;
            k.word.insert(k.word.end(), kb.word.begin(), kb.word.end());
            r.add(k, cx_mul(ca, cb));
        }
    }
    return r;
}

TracePolynomial mat_trace(const MatSeries& a, int trace_of_identity) {
    TracePolynomial r;
    for (const auto& [k, c] : a.terms) {
        TraceKey tk;
        tk.s = k.s;
        tk.sminus = k.sminus;
        if (k.word.empty()) {
            r.add(tk, {c.re * Rat(trace_of_identity), c.im * Rat(trace_of_identity)});
            continue;
        }
        tk.words.push_back(canonical_rotation(k.word));
        r.add(tk, c);
    }
    return r;
}

MatSeries catalan_resolvent(const MatrixBounds& b0) {
    MatSeries g;
    for (int m = 0;; ++m) {
        if (2 * (2 * m + 1) > b0.grade_cap || m > b0.sminus_cap) break;
        MatKey k;
        k.word = {2 * m + 1};
        k.sminus = m;
        g.add(k, {catalan_number(m), Rat(0)});
    }
    return g;
}

TracePolynomial boundary_action(const MatrixBounds& b0) {
    MatSeries g = catalan_resolvent(b0);
    // X = (iH - s) G / 2, Y = (iH + s) G / 2
    MatSeries hminus, hplus;
    {
        MatKey h;
        h.word = {0};
        hminus.add(h, {Rat(0), rat(1, 2)});
        hplus.add(h, {Rat(0), rat(1, 2)});
        MatKey sc;
        sc.s = 1;
        hminus.add(sc, {rat(-1, 2), Rat(0)});
        hplus.add(sc, {rat(1, 2), Rat(0)});
    }
    MatSeries X = mat_mul(hminus, g, b0);
    MatSeries Y = mat_mul(hplus, g, b0);

    TracePolynomial acc;
    MatSeries xp = X, yp = Y;
    for (int m = 1;; ++m) {
        if (xp.terms.empty() && yp.terms.empty()) break;
        TracePolynomial tx = mat_trace(xp, 0);  // traces of X^m; no empty words arise
        TracePolynomial ty = mat_trace(yp, 0);
        for (const auto& [k, c] : tx.terms) acc.add(k, {c.re / Rat(m), c.im / Rat(m)});
        for (const auto& [k, c] : ty.terms) acc.add(k, {-c.re / Rat(m), -c.im / Rat(m)});
        xp = mat_mul(xp, X, b0);
        yp = mat_mul(yp, Y, b0);
        if (m > b0.grade_cap) break;
    }
    return acc;
}

WickEngine::WickEngine(LambdaSpec spec, int pairing_budget)
    : spec_(std::move(spec)), budget_(pairing_budget) {
    spec_.validate();
}

Rat WickEngine::expectation(const EntryMono& mono) {
    int total = 0;
    for (int e : mono) total += e;
    if (total == 0) return Rat(1);
    if (total % 2 == 1) return Rat(0);
    if (total > budget_) throw ConfigError("WickEngine: pairing budget exceeded");
    auto it = memo_.find(mono);
    if (it != memo_.end()) return it->second;

    int N = spec_.N;
    // first remaining factor, lexicographically by (i, j)
    int first = -1;
    for (int idx = 0; idx < N * N && first < 0; ++idx)
        if (mono[static_cast<size_t>(idx)] > 0) first = idx;
    int i = first / N, j = first % N;
    int partner = j * N + i;  // only h_{j,i} pairs with h_{i,j}

    Rat acc(0);
    EntryMono rest = mono;
    rest[static_cast<size_t>(first)] -= 1;
    int avail = rest[static_cast<size_t>(partner)];
    if (avail > 0) {
        Rat cov = Rat(2) / (spec_.lambda[static_cast<size_t>(i)] +
                            spec_.lambda[static_cast<size_t>(j)]);
        rest[static_cast<size_t>(partner)] -= 1;
        acc = Rat(avail) * cov * expectation(rest);
        rest[static_cast<size_t>(partner)] += 1;
    }
    memo_.emplace(mono, acc);
    return acc;
}

std::map<EntryMono, Rat> expand_word(const Word& w, const LambdaSpec& spec) {
    int N = spec.N;
    std::map<EntryMono, Rat> out;
    if (w.empty()) {
        out.emplace(EntryMono(static_cast<size_t>(N * N), 0), Rat(N));
        return out;
    }
    size_t r = w.size();
    std::vector<int> idx(r, 0);
    for (;;) {
        // value of the current index assignment
        Rat val(1);
        EntryMono mono(static_cast<size_t>(N * N), 0);
        bool dead = false;
        for (size_t p = 0; p < r && !dead; ++p) {
            int a = idx[p], b = idx[(p + 1) % r];
            if (w[p] == 0) {
                mono[static_cast<size_t>(a * N + b)] += 1;
            } else {
                if (a != b) { dead = true; break; }
                val *= pow_rat(spec.lambda[static_cast<size_t>(a)], -w[p]);
            }
        }
        if (!dead) {
            auto it = out.find(mono);
            if (it == out.end())
                out.emplace(std::move(mono), val);
            else {
                it->second += val;
                if (is_zero(it->second)) out.erase(it);
            }
        }
        // next assignment
        size_t p = 0;
        while (p < r && ++idx[p] == N) {
            idx[p] = 0;
            ++p;
        }
        if (p == r) break;
    }
    return out;
}

Rat GradedCoeffs::at(int a, int b, int m) const {
    auto it = coef.find({a, b, m});
    return it == coef.end() ? Rat(0) : it->second;
}

void GradedCoeffs::add(int a, int b, int m, const Rat& v) {
    if (is_zero(v)) return;
    auto it = coef.find({a, b, m});
    if (it == coef.end())
        coef.emplace(std::make_tuple(a, b, m), v);
    else {
        it->second += v;
        if (is_zero(it->second)) coef.erase(it);
    }
}

GradedCoeffs trace_expectation(const TracePolynomial& p, WickEngine& engine,
                               const MatrixBounds& b0) {
    const LambdaSpec& spec = engine.spec();
    int N = spec.N;
    GradedCoeffs out;
    for (const auto& [k, c] : p.terms) {
        int grade = term_grade(k);
        if (grade < 2 * (k.s + 2 * k.sminus))
            throw InternalInconsistency("trace_expectation: grading bound violated");
        // expand the product of words into entry monomials
        std::map<EntryMono, Rat> poly;
        poly.emplace(EntryMono(static_cast<size_t>(N * N), 0), Rat(1));
        for (const auto& w : k.words) {
            auto factor = expand_word(w, spec);
            std::map<EntryMono, Rat> next;
            for (const auto& [m1, v1] : poly)
                for (const auto& [m2, v2] : factor) {
                    EntryMono m = m1;
                    for (size_t i = 0; i < m.size(); ++i) m[i] += m2[i];
                    Rat v = v1 * v2;
                    auto it = next.find(m);
                    if (it == next.end())
                        next.emplace(std::move(m), std::move(v));
                    else {
                        it->second += v;
                        if (is_zero(it->second)) next.erase(it);
                    }
                }
            poly = std::move(next);
        }
        Rat total(0);
        for (const auto& [m, v] : poly) total += v * engine.expectation(m);
        if (is_zero(total)) continue;
        // reality: i-powers must have cancelled into the real component
        CxRat contrib = {c.re * total, c.im * total};
        if (!is_zero(contrib.im))
            throw InternalInconsistency("trace_expectation: residual imaginary part");
        if (grade % 2 != 0)
            throw InternalInconsistency("trace_expectation: odd grade with nonzero value");
        out.add(k.s, k.sminus, grade / 2, contrib.re);
    }
    return out;
}

GradedCoeffs kontsevich_expectation(const LambdaSpec& spec, int lam_degree_cap,
                                    int pairing_budget) {
    MatrixBounds b0;
    b0.grade_cap = 2 * lam_degree_cap;
    b0.s_cap = 0;
    b0.sminus_cap = 0;
    b0.pairing_budget = pairing_budget;
    TracePolynomial S;
    TraceKey h3;
    h3.words.push_back(canonical_rotation({0, 0, 0}));
    S.add(h3, {Rat(0), rat(1, 6)});  // (i/6) tr H^3
    TracePolynomial E = tp_exp(S, b0);
    WickEngine engine(spec, pairing_budget);
    return trace_expectation(E, engine, b0);
}

OpenMatrixResult open_matrix_integral(const LambdaSpec& spec, int lam_degree_cap,
                                      int s_cap, int pairing_budget) {
    MatrixBounds b0;
    b0.grade_cap = 2 * lam_degree_cap;
    // the relation operator trades s_- against s and e^{s^3/6} raises s
    b0.sminus_cap = lam_degree_cap / 2;
    b0.s_cap = s_cap + b0.sminus_cap;
    b0.pairing_budget = pairing_budget;

    TracePolynomial S = boundary_action(b0);
    TraceKey h3;
    h3.words.push_back(canonical_rotation({0, 0, 0}));
    S.add(h3, {Rat(0), rat(1, 6)});
    TracePolynomial E = tp_exp(S, b0);
    WickEngine engine(spec, pairing_budget);

    OpenMatrixResult result;
    result.f_o = trace_expectation(E, engine, b0);

    // e^{s^3/6} f^o, then tau^o = sum_p 2^{-p} d_s^p [ . ]_{s_-^p}
    GradedCoeffs dressed;
    for (const auto& [key, v] : result.f_o.coef) {
        auto [a, b, m] = key;
        for (int c = 0; 3 * c + a <= b0.s_cap + 3 * s_cap; ++c)
            dressed.add(a + 3 * c, b, m, v * pow_rat(rat(1, 6), c) / factorial(c));
    }
    for (const auto& [key, v] : dressed.coef) {
        auto [ap, p, m] = key;
        int a = ap - p;
        if (a < 0 || a > s_cap) continue;
        result.tau_o.add(a, 0, m,
                         v * factorial(ap) / factorial(a) / pow_rat(Rat(2), p));
    }
    return result;
}

GradedCoeffs miwa_substitute(const Series& f, const LambdaSpec& spec) {
    spec.validate();
    const VariableSpace& sp = f.space();
    Series g = sp.has_u() ? set_u_one(f) : f;
    // power sums of lambda^{-1}
    std::vector<Rat> psum(static_cast<size_t>(2 * sp.t_count() + 1), Rat(0));
    for (int d = 1; d <= 2 * sp.t_count(); ++d)
        for (int i = 0; i < spec.N; ++i)
            psum[static_cast<size_t>(d)] += pow_rat(spec.lambda[static_cast<size_t>(i)], -d);

    GradedCoeffs out;
    for (const auto& [k, c] : g.terms()) {
        Rat v = c;
        int m = 0;
        for (int a = 0; a < sp.t_count(); ++a) {
            int e = k[sp.slot_of({VarKind::T, a})];
            if (e == 0) continue;
            Rat base = -double_factorial(2 * a - 1) * psum[static_cast<size_t>(2 * a + 1)];
            v *= pow_rat(base, e);
            m += (2 * a + 1) * e;
        }
        int s_exp = sp.s_count() > 0 ? k[sp.slot_of({VarKind::S, 0})] : 0;
        int sm_exp = sp.has_sminus() ? k[sp.slot_of({VarKind::SMinus, 0})] : 0;
        out.add(s_exp, sm_exp, m, v);
    }
    return out;
}

}  // namespace okdv
