#ifndef OKDV_MATRIX_MODEL_HPP
#define OKDV_MATRIX_MODEL_HPP

#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "okdv/rational.hpp"
#include "okdv/series.hpp"

namespace okdv {

// u = 1 throughout this module.

struct LambdaSpec {
    int N = 1;
    std::vector<Rat> lambda;

    void validate() const;
};

// Formal trace words over the alphabet {H, Lambda^{-d}}. A letter is 0 for
// H and d >= 1 for Lambda^{-d}; words are stored in their minimal cyclic
// rotation once traced. Grading: deg H = 1, deg Lambda^{-d} = 2d.
using Word = std::vector<int>;
int word_grade(const Word& w);
int word_h_count(const Word& w);
Word canonical_rotation(Word w);

struct CxRat {
    Rat re, im;
    bool zero() const { return is_zero(re) && is_zero(im); }
};

// Scalar polynomial in trace words, s and s_-. Keys keep the word multiset
// sorted; coefficients carry the residual power of i as a complex pair.
struct TraceKey {
    std::vector<Word> words;  // sorted, each in canonical rotation
    int s = 0;
    int sminus = 0;
    bool operator<(const TraceKey& o) const;
};

struct MatrixBounds {
    int grade_cap = 6;   // word grading (lambda-degree cap is grade/2)
    int s_cap = 3;
    int sminus_cap = 3;
    int pairing_budget = 24;  // max Wick monomial degree
};

struct TracePolynomial {
    std::map<TraceKey, CxRat> terms;

    void add(const TraceKey& k, const CxRat& c);
    int max_grade() const;
};

TracePolynomial tp_mul(const TracePolynomial& a, const TracePolynomial& b,
                       const MatrixBounds& b0);
TracePolynomial tp_exp(const TracePolynomial& a, const MatrixBounds& b0);

// Matrix-valued word series (open words, not yet traced).
struct MatKey {
    Word word;
    int s = 0;
    int sminus = 0;
    bool operator<(const MatKey& o) const;
};
struct MatSeries {
    std::map<MatKey, CxRat> terms;
    void add(const MatKey& k, const CxRat& c);
};
MatSeries mat_mul(const MatSeries& a, const MatSeries& b, const MatrixBounds& b0);
TracePolynomial mat_trace(const MatSeries& a, int trace_of_identity);

// G(Lambda, s_-) = sum_m Catalan(m) s_-^m Lambda^{-2m-1}.
MatSeries catalan_resolvent(const MatrixBounds& b0);

// I_B = tr sum_{m>=1} (1/m) [ ((iH-s)G/2)^m - ((iH+s)G/2)^m ].
TracePolynomial boundary_action(const MatrixBounds& b0);

// --- Wick engine ------------------------------------------------------------
// Entry monomials are exponent maps over the N^2 matrix entries h_{i,j}.
using EntryMono = std::vector<int>;  // length N*N, exponent of h_{i,j} at i*N+j

class WickEngine {
public:
    WickEngine(LambdaSpec spec, int pairing_budget);
    const LambdaSpec& spec() const { return spec_; }
    // Pairing sum with covariance <h_{ij} h_{kl}> = 2/(lambda_i+lambda_j)
    // iff j == k and i == l. Zero for odd degree.
    Rat expectation(const EntryMono& mono);

private:
    struct VecHash {
        size_t operator()(const EntryMono& v) const {
            size_t h = 1469598103934665603ull;
            for (int x : v) {
                h ^= static_cast<size_t>(x) + 0x9e3779b9;
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    LambdaSpec spec_;
    int budget_;
    std::unordered_map<EntryMono, Rat, VecHash> memo_;
};

// Exact expansion of one trace word at the given spectrum: a polynomial in
// the entries with rational coefficients (the Lambda letters evaluate).
std::map<EntryMono, Rat> expand_word(const Word& w, const LambdaSpec& spec);

// Polynomial in s, s_- with lambda-degree tagged coefficients: the value at
// key (a, b, m) is the homogeneous degree -m part of the s^a s_-^b
// coefficient.
struct GradedCoeffs {
    std::map<std::tuple<int, int, int>, Rat> coef;

    Rat at(int a, int b, int m) const;
    void add(int a, int b, int m, const Rat& v);
};

// Formal Gaussian expectation of a trace polynomial, graded by word degree
// (degree 2m terms land in lambda-degree -m). Asserts reality and the
// grading bound degree >= 2(s + 2 s_-).
GradedCoeffs trace_expectation(const TracePolynomial& p, WickEngine& engine,
                               const MatrixBounds& b0);

// c int e^{(i/6) tr H^3 - (1/2) tr H^2 Lambda} dH as a graded series;
// grading D = lambda-degree cap.
GradedCoeffs kontsevich_expectation(const LambdaSpec& spec, int lam_degree_cap,
                                    int pairing_budget = 40);

struct OpenMatrixResult {
    GradedCoeffs f_o;    // f^o_N(Lambda, s, s_-)
    GradedCoeffs tau_o;  // tau^o_N via e^{(1/2) d^2/ds ds_-}(e^{s^3/6} f^o_N)|_{s_-=0}
};
OpenMatrixResult open_matrix_integral(const LambdaSpec& spec, int lam_degree_cap,
                                      int s_cap, int pairing_budget = 40);

// Exact Miwa evaluation t_i = -(2i-1)!! tr Lambda^{-2i-1} of a (t, s, u)
// series at u = 1; output graded by lambda-degree (= the consumed t-weight).
GradedCoeffs miwa_substitute(const Series& f, const LambdaSpec& spec);

}  // namespace okdv

#endif
