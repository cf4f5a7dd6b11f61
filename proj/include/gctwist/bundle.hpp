#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gctwist/errors.hpp"
#include "gctwist/groupoid.hpp"
#include "gctwist/rational.hpp"

namespace gctwist {

/// A distinguished subset of arrows of a parent groupoid together with the
/// per-unit fibers it spans. Only stores membership; analyze_subbundle
/// decides what kind of bundle it is.
struct SubgroupBundle {
    const FiniteGroupoid* parent = nullptr;
    std::vector<char> member;              // arrow -> 0/1
    std::vector<std::vector<int>> fibers;  // unit -> member arrows at that unit (sorted)

    static SubgroupBundle of(const FiniteGroupoid& g, const std::vector<int>& arrows) {
        SubgroupBundle b;
        b.parent = &g;
        b.member.assign(g.n_arrows(), 0);
        b.fibers.resize(g.n_units());
        for (int a : arrows) {
            if (a < 0 || a >= g.n_arrows()) throw SchemaError("bundle references an unknown arrow");
            if (!b.member[a]) {
                b.member[a] = 1;
                if (g.is_isotropy(a)) b.fibers[g.range(a)].push_back(a);
            }
        }
        for (auto& f : b.fibers) std::sort(f.begin(), f.end());
        return b;
    }

    bool contains(int a) const { return member[a] != 0; }
    int fiber_size(int u) const { return static_cast<int>(fibers[u].size()); }
};

struct BundleReport {
    bool wide = false;             // every unit arrow is a member
    bool subgroup_bundle = false;  // isotropy only, closed under compose and inverse
    bool abelian = false;          // each fiber commutative
    bool normal = false;           // sigma*A == A*sigma as sets for every arrow
    std::string witness;           // first failure found, for diagnostics

    bool quotient_ready() const { return wide && subgroup_bundle && normal; }
};

/// Computes the four bundle flags exactly by enumeration. Degenerate inputs
/// produce flags, never errors.
inline BundleReport analyze_subbundle(const FiniteGroupoid& g, const SubgroupBundle& b) {
    BundleReport rep;
    auto note = [&](const std::string& w) {
        if (rep.witness.empty()) rep.witness = w;
    };

    rep.subgroup_bundle = true;
    for (int a = 0; a < g.n_arrows(); ++a) {
        if (!b.contains(a)) continue;
        if (!g.is_isotropy(a)) {
            rep.subgroup_bundle = false;
            note("member " + g.arrow_id(a) + " is not isotropy");
        } else if (!b.contains(g.inverse(a))) {
            rep.subgroup_bundle = false;
            note("member " + g.arrow_id(a) + " has non-member inverse");
        }
    }
    if (rep.subgroup_bundle) {
        for (int u = 0; u < g.n_units() && rep.subgroup_bundle; ++u)
            for (int a : b.fibers[u]) {
                for (int c : b.fibers[u])
                    if (!b.contains(g.compose(a, c))) {
                        rep.subgroup_bundle = false;
                        note("fiber at " + g.unit_id(u) + " not closed under composition");
                        break;
                    }
                if (!rep.subgroup_bundle) break;
            }
    }

    rep.wide = true;
    for (int u = 0; u < g.n_units(); ++u)
        if (!b.contains(g.unit_arrow(u))) {
            rep.wide = false;
            note("unit arrow at " + g.unit_id(u) + " missing");
        }

    rep.abelian = rep.subgroup_bundle;
    if (rep.abelian) {
        for (int u = 0; u < g.n_units() && rep.abelian; ++u)
            for (int a : b.fibers[u]) {
                for (int c : b.fibers[u])
                    if (g.compose(a, c) != g.compose(c, a)) {
                        rep.abelian = false;
                        note("fiber at " + g.unit_id(u) + " is not commutative");
                        break;
                    }
                if (!rep.abelian) break;
            }
    }

    // Normality: enumerate both cosets of every arrow and compare as sets.
    rep.normal = rep.subgroup_bundle && rep.wide;
    if (rep.normal) {
        for (int s = 0; s < g.n_arrows() && rep.normal; ++s) {
            std::set<int> right, left;  // sigma*A and A*sigma
            for (int a : b.fibers[g.source(s)]) right.insert(g.compose(s, a));
            for (int a : b.fibers[g.range(s)]) left.insert(g.compose(a, s));
            if (right != left) {
                rep.normal = false;
                note("cosets of " + g.arrow_id(s) + " differ");
            }
        }
    }

    return rep;
}

/// Haar data for a groupoid/bundle pair. On a finite group every Haar
/// measure is a positive multiple of counting measure, so a system is one
/// positive rational per unit: lambda^u = d_u * counting on r^-1(u) and
/// beta^u = c_u * counting on A(u). mu is a fully supported measure on
/// units used by the modular machinery.
struct HaarWeights {
    std::vector<Rational> lambda;  // d_u, per unit
    std::vector<Rational> beta;    // c_u, per unit
    std::vector<Rational> mu;      // per unit

    static HaarWeights ones(int n_units) {
        HaarWeights w;
        w.lambda.assign(n_units, Rational(1));
        w.beta.assign(n_units, Rational(1));
        w.mu.assign(n_units, Rational(1));
        return w;
    }

    void check(int n_units) const {
        if (static_cast<int>(lambda.size()) != n_units || static_cast<int>(beta.size()) != n_units ||
            static_cast<int>(mu.size()) != n_units)
            throw SchemaError("haar weights must cover every unit");
        for (int u = 0; u < n_units; ++u)
            if (lambda[u] <= 0 || beta[u] <= 0 || mu[u] <= 0)
                throw SchemaError("haar weights must be strictly positive");
    }

    /// Left invariance of lambda as a Haar system: d must be constant on
    /// each connected component (an arrow u <- v transports counting
    /// measure on r^-1(v) to r^-1(u)). The exact modular identities hold
    /// for arbitrary weights, but convolution is only associative under
    /// this condition, so algebra construction requires it.
    bool lambda_invariant(const FiniteGroupoid& g, std::string* witness = nullptr) const {
        for (int a = 0; a < g.n_arrows(); ++a)
            if (lambda[g.range(a)] != lambda[g.source(a)]) {
                if (witness) *witness = g.arrow_id(a);
                return false;
            }
        return true;
    }
};

}  // namespace gctwist
