#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gctwist/errors.hpp"

namespace gctwist {

/// Raw input tables before any axiom has been checked. Indices into
/// `units`/`arrows` are already resolved; producing them from ids is the
/// parser's job and parse failures are reported as SchemaError, never as
/// axiom violations.
struct GroupoidTables {
    std::vector<std::string> units;
    std::vector<std::string> arrows;
    std::vector<int> range;    // arrow -> unit
    std::vector<int> source;   // arrow -> unit
    std::vector<int> inverse;  // arrow -> arrow
    std::vector<std::array<int, 3>> compose;  // (g, h, gh) with source(g) = range(h)
};

struct Violation {
    std::string axiom;                   // short machine-readable tag
    std::vector<std::string> witnesses;  // arrow/unit ids involved
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }

    std::string summary() const {
        if (valid()) return "valid";
        std::string s;
        for (const auto& v : violations) {
            s += v.axiom + " [";
            for (std::size_t i = 0; i < v.witnesses.size(); ++i) {
                if (i) s += ", ";
                s += v.witnesses[i];
            }
            s += "] " + v.detail + "\n";
        }
        return s;
    }
};

/// A finite groupoid with a fully materialized composition table.
///
/// Conventions: an arrow goes source -> range; compose(g, h) = gh is
/// defined exactly when source(g) = range(h), and range(gh) = range(g),
/// source(gh) = source(h). Units are embedded as identity arrows.
/// Immutable after construction.
class FiniteGroupoid {
public:
    FiniteGroupoid() = default;  // empty; populated via validate_groupoid

    int n_units() const { return static_cast<int>(unit_ids_.size()); }
    int n_arrows() const { return static_cast<int>(arrow_ids_.size()); }

    int range(int a) const { return range_[a]; }
    int source(int a) const { return source_[a]; }
    int inverse(int a) const { return inverse_[a]; }
    int unit_arrow(int u) const { return unit_arrow_[u]; }
    bool is_unit_arrow(int a) const { return unit_arrow_[range_[a]] == a; }
    bool is_isotropy(int a) const { return range_[a] == source_[a]; }

    bool composable(int a, int b) const { return source_[a] == range_[b]; }

    /// gh, or -1 when not composable.
    int try_compose(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_arrows() + b]; }

    int compose(int a, int b) const {
        int c = try_compose(a, b);
        if (c < 0) throw PreconditionError("compose(" + arrow_ids_[a] + ", " + arrow_ids_[b] + ") undefined");
        return c;
    }

    const std::string& arrow_id(int a) const { return arrow_ids_[a]; }
    const std::string& unit_id(int u) const { return unit_ids_[u]; }

    int find_arrow(const std::string& id) const {
        auto it = arrow_index_.find(id);
        return it == arrow_index_.end() ? -1 : it->second;
    }
    int find_unit(const std::string& id) const {
        auto it = unit_index_.find(id);
        return it == unit_index_.end() ? -1 : it->second;
    }

    const std::vector<int>& arrows_from(int u) const { return by_source_[u]; }  // s = u
    const std::vector<int>& arrows_into(int u) const { return by_range_[u]; }   // r = u

    /// Connected component (orbit) index per unit; two units are in the
    /// same component when some arrow joins them.
    const std::vector<int>& unit_component() const { return component_; }

    /// Isotropy group at u as a sorted list of arrows with r = s = u.
    std::vector<int> isotropy_at(int u) const {
        std::vector<int> iso;
        for (int a : by_range_[u])
            if (source_[a] == u) iso.push_back(a);
        return iso;
    }

    friend std::pair<ValidationReport, std::optional<FiniteGroupoid>> validate_groupoid(const GroupoidTables&);

private:
    std::vector<std::string> unit_ids_, arrow_ids_;
    std::vector<int> range_, source_, inverse_, unit_arrow_;
    std::vector<int> table_;  // n*n, -1 where undefined
    std::vector<std::vector<int>> by_source_, by_range_;
    std::vector<int> component_;
    std::unordered_map<std::string, int> arrow_index_, unit_index_;
};

/// Checks every axiom exhaustively and either promotes the tables to a
/// FiniteGroupoid or reports each violated axiom with witnessing arrows.
/// Malformed tables (out-of-range indices, size mismatches) throw
/// SchemaError instead of being reported: they are not axiom failures.
inline std::pair<ValidationReport, std::optional<FiniteGroupoid>> validate_groupoid(const GroupoidTables& t) {
    const int nu = static_cast<int>(t.units.size());
    const int na = static_cast<int>(t.arrows.size());
    if (static_cast<int>(t.range.size()) != na || static_cast<int>(t.source.size()) != na ||
        static_cast<int>(t.inverse.size()) != na)
        throw SchemaError("range/source/inverse tables must cover every arrow");
    for (int a = 0; a < na; ++a) {
        if (t.range[a] < 0 || t.range[a] >= nu || t.source[a] < 0 || t.source[a] >= nu)
            throw SchemaError("arrow '" + t.arrows[a] + "' references an unknown unit");
        if (t.inverse[a] < 0 || t.inverse[a] >= na)
            throw SchemaError("inverse of '" + t.arrows[a] + "' references an unknown arrow");
    }

    ValidationReport report;
    auto flag = [&](std::string axiom, std::vector<int> arrows, std::string detail) {
        Violation v;
        v.axiom = std::move(axiom);
        for (int a : arrows) v.witnesses.push_back(t.arrows[a]);
        v.detail = std::move(detail);
        report.violations.push_back(std::move(v));
    };

    // Composition table: reject duplicates as malformed, then check the
    // domain is exactly the composable pairs.
    std::vector<int> table(static_cast<std::size_t>(na) * na, -1);
    for (const auto& row : t.compose) {
        auto [g, h, gh] = row;
        if (g < 0 || g >= na || h < 0 || h >= na || gh < 0 || gh >= na)
            throw SchemaError("compose entry references an unknown arrow");
        int& cell = table[static_cast<std::size_t>(g) * na + h];
        if (cell >= 0 && cell != gh)
            throw SchemaError("conflicting compose entries for (" + t.arrows[g] + ", " + t.arrows[h] + ")");
        cell = gh;
    }
    for (int g = 0; g < na; ++g)
        for (int h = 0; h < na; ++h) {
            int gh = table[static_cast<std::size_t>(g) * na + h];
            bool comp = t.source[g] == t.range[h];
            if (comp && gh < 0)
                flag("composition-missing", {g, h}, "composable pair has no table entry");
            if (!comp && gh >= 0)
                flag("composition-domain", {g, h}, "table entry for non-composable pair");
            if (comp && gh >= 0) {
                if (t.range[gh] != t.range[g] || t.source[gh] != t.source[h])
                    flag("range-source", {g, h, gh}, "range(gh) != range(g) or source(gh) != source(h)");
            }
        }

    // Identities: for each unit, exactly one two-sided neutral isotropy arrow.
    std::vector<int> unit_arrow(nu, -1);
    for (int u = 0; u < nu; ++u) {
        for (int e = 0; e < na; ++e) {
            if (t.range[e] != u || t.source[e] != u) continue;
            bool neutral = true;
            for (int x = 0; x < na && neutral; ++x) {
                if (t.range[x] == u && table[static_cast<std::size_t>(e) * na + x] != x) neutral = false;
                if (t.source[x] == u && table[static_cast<std::size_t>(x) * na + e] != x) neutral = false;
            }
            if (neutral) {
                if (unit_arrow[u] >= 0)
                    flag("identity-unique", {unit_arrow[u], e}, "two neutral arrows at unit " + t.units[u]);
                else
                    unit_arrow[u] = e;
            }
        }
        if (unit_arrow[u] < 0) {
            Violation v;
            v.axiom = "identity-missing";
            v.witnesses = {t.units[u]};
            v.detail = "no neutral arrow at this unit";
            report.violations.push_back(std::move(v));
        }
    }

    // Inverses (only meaningful once identities exist).
    if (std::all_of(unit_arrow.begin(), unit_arrow.end(), [](int e) { return e >= 0; })) {
        for (int a = 0; a < na; ++a) {
            int b = t.inverse[a];
            if (t.range[b] != t.source[a] || t.source[b] != t.range[a]) {
                flag("inverse-endpoints", {a, b}, "inverse swaps range and source");
                continue;
            }
            if (table[static_cast<std::size_t>(a) * na + b] != unit_arrow[t.range[a]])
                flag("inverse-right", {a, b}, "a * inv(a) != unit at range(a)");
            if (table[static_cast<std::size_t>(b) * na + a] != unit_arrow[t.source[a]])
                flag("inverse-left", {a, b}, "inv(a) * a != unit at source(a)");
        }
    }

    // Associativity over every composable triple.
    for (int g = 0; g < na; ++g)
        for (int h = 0; h < na; ++h) {
            int gh = table[static_cast<std::size_t>(g) * na + h];
            if (gh < 0 || t.source[g] != t.range[h]) continue;
            for (int k = 0; k < na; ++k) {
                if (t.source[h] != t.range[k]) continue;
                int hk = table[static_cast<std::size_t>(h) * na + k];
                if (hk < 0) continue;
                int left = table[static_cast<std::size_t>(gh) * na + k];
                int right = table[static_cast<std::size_t>(g) * na + hk];
                if (left != right || left < 0) {
                    flag("associativity", {g, h, k}, "(gh)k != g(hk)");
                }
            }
        }

    if (!report.valid()) return {report, std::nullopt};

    FiniteGroupoid G;
    G.unit_ids_ = t.units;
    G.arrow_ids_ = t.arrows;
    G.range_ = t.range;
    G.source_ = t.source;
    G.inverse_ = t.inverse;
    G.unit_arrow_ = unit_arrow;
    G.table_ = std::move(table);
    G.by_source_.resize(nu);
    G.by_range_.resize(nu);
    for (int a = 0; a < na; ++a) {
        G.by_source_[t.source[a]].push_back(a);
        G.by_range_[t.range[a]].push_back(a);
    }
    for (int i = 0; i < na; ++i) G.arrow_index_[t.arrows[i]] = i;
    for (int i = 0; i < nu; ++i) G.unit_index_[t.units[i]] = i;

    // Union-find over units through arrows.
    std::vector<int> parent(nu);
    for (int u = 0; u < nu; ++u) parent[u] = u;
    auto find = [&](int u) {
        while (parent[u] != u) u = parent[u] = parent[parent[u]];
        return u;
    };
    for (int a = 0; a < na; ++a) parent[find(t.range[a])] = find(t.source[a]);
    G.component_.resize(nu);
    std::unordered_map<int, int> remap;
    for (int u = 0; u < nu; ++u) {
        int root = find(u);
        auto [it, fresh] = remap.try_emplace(root, static_cast<int>(remap.size()));
        G.component_[u] = it->second;
    }

    return {report, std::move(G)};
}

/// Convenience for generators and tests: validate and throw on failure.
inline FiniteGroupoid make_groupoid(const GroupoidTables& t) {
    auto [report, g] = validate_groupoid(t);
    if (!g) throw AxiomError("groupoid axioms violated:\n" + report.summary());
    return *std::move(g);
}

}  // namespace gctwist
