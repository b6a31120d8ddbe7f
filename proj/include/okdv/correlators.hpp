#ifndef OKDV_CORRELATORS_HPP
#define OKDV_CORRELATORS_HPP

#include <map>
#include <string>
#include <vector>

#include "okdv/rational.hpp"
#include "okdv/series.hpp"

namespace okdv {

// <tau_{a_1} ... tau_{a_l}>_g. Exponents kept sorted descending.
struct ClosedCorrelatorKey {
    int g = 0;
    std::vector<int> a;

    bool stable() const { return 2 * g - 2 + static_cast<int>(a.size()) > 0; }
    bool dimension_ok() const {
        int sum = 0;
        for (int x : a) sum += x;
        return 3 * g - 3 + static_cast<int>(a.size()) == sum;
    }
    bool operator<(const ClosedCorrelatorKey& o) const {
        if (g != o.g) return g < o.g;
        return a < o.a;
    }
    bool operator==(const ClosedCorrelatorKey& o) const { return g == o.g && a == o.a; }
};

// <tau_{a_1} ... tau_{a_l} sigma^k>_g with the paper's built-in
// 2^{-(g+k-1)/2} normalization. g is the doubled genus.
struct OpenCorrelatorKey {
    int g = 0;
    int k = 0;
    std::vector<int> a;

    bool stable() const { return 2 * g - 2 + k + 2 * static_cast<int>(a.size()) > 0; }
    bool dimension_ok() const {
        int sum = 0;
        for (int x : a) sum += x;
        return 2 * sum == 3 * g - 3 + k + 2 * static_cast<int>(a.size());
    }
    bool operator<(const OpenCorrelatorKey& o) const {
        if (g != o.g) return g < o.g;
        if (k != o.k) return k < o.k;
        return a < o.a;
    }
    bool operator==(const OpenCorrelatorKey& o) const {
        return g == o.g && k == o.k && a == o.a;
    }
};

struct ClosedCorrelatorTable {
    std::map<ClosedCorrelatorKey, Rat> values;
    std::string provenance;
    int d_t = 0;

    void insert(ClosedCorrelatorKey key, Rat value);
    Rat lookup(const ClosedCorrelatorKey& key) const;  // 0 when unstable/off-dimension
};

struct OpenCorrelatorTable {
    std::map<OpenCorrelatorKey, Rat> values;
    std::string provenance;
    int d_t = 0;

    void insert(OpenCorrelatorKey key, Rat value);
    Rat lookup(const OpenCorrelatorKey& key) const;
};

// Reads correlators off the free-energy coefficients:
// closed, coefficient of prod t_a^{n_a} u^{2g-2} times prod n_a!;
// open, coefficient of prod t_a^{n_a} s^k u^{g-1} times prod n_a! k!.
ClosedCorrelatorTable extract_closed_table(const Series& F, const std::string& provenance);
OpenCorrelatorTable extract_open_table(const Series& Fo, const std::string& provenance);

}  // namespace okdv

#endif
