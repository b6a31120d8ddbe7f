#include "okdv/correlators.hpp"

#include <algorithm>

#include "okdv/errors.hpp"

namespace okdv {

void ClosedCorrelatorTable::insert(ClosedCorrelatorKey key, Rat value) {
    std::sort(key.a.begin(), key.a.end(), std::greater<int>());
    if (!key.stable() || !key.dimension_ok())
        throw InternalInconsistency("closed correlator violates stability or dimension constraint");
    if (is_zero(value)) return;
    values[std::move(key)] = std::move(value);
}

Rat ClosedCorrelatorTable::lookup(const ClosedCorrelatorKey& key) const {
    ClosedCorrelatorKey k = key;
    std::sort(k.a.begin(), k.a.end(), std::greater<int>());
    if (!k.stable() || !k.dimension_ok()) return Rat(0);
    auto it = values.find(k);
    return it == values.end() ? Rat(0) : it->second;
}

void OpenCorrelatorTable::insert(OpenCorrelatorKey key, Rat value) {
    std::sort(key.a.begin(), key.a.end(), std::greater<int>());
    if (!key.stable() || !key.dimension_ok())
        throw InternalInconsistency("open correlator violates stability or dimension constraint");
    if (is_zero(value)) return;
    values[std::move(key)] = std::move(value);
}

Rat OpenCorrelatorTable::lookup(const OpenCorrelatorKey& key) const {
    OpenCorrelatorKey k = key;
    std::sort(k.a.begin(), k.a.end(), std::greater<int>());
    if (!k.stable() || !k.dimension_ok()) return Rat(0);
    auto it = values.find(k);
    return it == values.end() ? Rat(0) : it->second;
}

ClosedCorrelatorTable extract_closed_table(const Series& F, const std::string& provenance) {
    const VariableSpace& sp = F.space();
    if (!sp.has_u()) throw ConfigError("extract_closed_table: series must carry u");
    ClosedCorrelatorTable table;
    table.provenance = provenance;
    table.d_t = F.region().t_cap;
    int uslot = sp.slot_of({VarKind::U, 0});
    for (const auto& [k, c] : F.terms()) {
        ClosedCorrelatorKey key;
        Rat value = c;
        int uexp = k[uslot];
        if ((uexp + 2) % 2 != 0)
            throw InternalInconsistency("closed free energy has odd u exponent");
        key.g = (uexp + 2) / 2;
        for (int a = 0; a < sp.t_count(); ++a) {
            int e = k[sp.slot_of({VarKind::T, a})];
            for (int r = 0; r < e; ++r) key.a.push_back(a);
            value *= factorial(e);
        }
        table.insert(std::move(key), std::move(value));
    }
    return table;
}

OpenCorrelatorTable extract_open_table(const Series& Fo, const std::string& provenance) {
    const VariableSpace& sp = Fo.space();
    if (!sp.has_u() || sp.s_count() < 1)
        throw ConfigError("extract_open_table: series must carry u and s");
    OpenCorrelatorTable table;
    table.provenance = provenance;
    table.d_t = Fo.region().t_cap;
    int uslot = sp.slot_of({VarKind::U, 0});
    int sslot = sp.slot_of({VarKind::S, 0});
    for (const auto& [k, c] : Fo.terms()) {
        for (int n = 1; n < sp.s_count(); ++n)
            if (k[sp.slot_of({VarKind::S, n})] != 0)
                throw ConfigError("extract_open_table: extended s_n variables present");
        OpenCorrelatorKey key;
        key.g = k[uslot] + 1;
        key.k = k[sslot];
        Rat value = c * factorial(key.k);
        for (int a = 0; a < sp.t_count(); ++a) {
            int e = k[sp.slot_of({VarKind::T, a})];
            for (int r = 0; r < e; ++r) key.a.push_back(a);
            value *= factorial(e);
        }
        table.insert(std::move(key), std::move(value));
    }
    return table;
}

}  // namespace okdv
