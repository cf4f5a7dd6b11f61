#pragma once

#include <string>
#include <vector>

#include "gctwist/bundle.hpp"
#include "gctwist/errors.hpp"
#include "gctwist/groupoid.hpp"

namespace gctwist {

/// A right action of a groupoid on a finite set: points carry a moment map
/// into the units, and x . gamma is defined when moment(x) = range(gamma).
struct GroupoidAction {
    const FiniteGroupoid* gamma = nullptr;
    std::vector<std::string> points;
    std::vector<int> moment;  // point -> unit of gamma
    std::vector<int> act;     // point * n_arrows + arrow -> point, -1 if undefined

    int apply(int x, int a) const { return act[static_cast<std::size_t>(x) * gamma->n_arrows() + a]; }

    void validate() const {
        const auto& g = *gamma;
        for (std::size_t x = 0; x < points.size(); ++x) {
            for (int a = 0; a < g.n_arrows(); ++a) {
                int y = apply(static_cast<int>(x), a);
                bool defined = moment[x] == g.range(a);
                if (defined != (y >= 0))
                    throw PreconditionError("action domain mismatch at (" + points[x] + ", " + g.arrow_id(a) + ")");
                if (y < 0) continue;
                if (moment[y] != g.source(a))
                    throw PreconditionError("moment(x.gamma) != source(gamma) at (" + points[x] + ", " +
                                            g.arrow_id(a) + ")");
                if (g.is_unit_arrow(a) && y != static_cast<int>(x))
                    throw PreconditionError("unit arrow moves point " + points[x]);
                for (int b = 0; b < g.n_arrows(); ++b) {
                    int ab = g.try_compose(a, b);
                    if (ab < 0) continue;
                    if (apply(y, b) != apply(static_cast<int>(x), ab))
                        throw PreconditionError("(x.gamma).eta != x.(gamma eta) at (" + points[x] + ", " +
                                                g.arrow_id(a) + ", " + g.arrow_id(b) + ")");
                }
            }
        }
    }
};

/// The transformation groupoid X x| Gamma together with the pull-back
/// bundle X * N. Arrows are pairs (x, gamma) with moment(x) = range(gamma);
/// r(x, gamma) = x, s(x, gamma) = x.gamma. N must act trivially, which
/// makes {(x, a) : a in N} a wide normal subgroup bundle.
struct TransformationGroupoid {
    FiniteGroupoid sigma;
    SubgroupBundle bundle;                 // X * N inside sigma
    std::vector<std::pair<int, int>> arrow_parts;  // sigma arrow -> (point, gamma arrow)
};

inline TransformationGroupoid transformation_groupoid(const FiniteGroupoid& gamma, const GroupoidAction& action,
                                                      const SubgroupBundle& N) {
    action.validate();
    // N acts trivially; refuse with a witness pair otherwise.
    for (std::size_t x = 0; x < action.points.size(); ++x)
        for (int a = 0; a < gamma.n_arrows(); ++a) {
            if (!N.contains(a) || action.moment[x] != gamma.range(a)) continue;
            if (action.apply(static_cast<int>(x), a) != static_cast<int>(x))
                throw PreconditionError("bundle arrow acts non-trivially: (" + action.points[x] + ", " +
                                        gamma.arrow_id(a) + ")");
        }

    const int np = static_cast<int>(action.points.size());
    GroupoidTables t;
    t.units = action.points;
    std::vector<std::pair<int, int>> parts;
    std::vector<std::vector<int>> index(np, std::vector<int>(gamma.n_arrows(), -1));
    for (int x = 0; x < np; ++x)
        for (int a = 0; a < gamma.n_arrows(); ++a) {
            if (action.moment[x] != gamma.range(a)) continue;
            index[x][a] = static_cast<int>(parts.size());
            parts.emplace_back(x, a);
            t.arrows.push_back("(" + action.points[x] + ")" + gamma.arrow_id(a));
            t.range.push_back(x);
            t.source.push_back(action.apply(x, a));
        }
    t.inverse.resize(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto [x, a] = parts[i];
        t.inverse[i] = index[action.apply(x, a)][gamma.inverse(a)];
    }
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = 0; j < parts.size(); ++j) {
            auto [x, a] = parts[i];
            auto [y, b] = parts[j];
            if (t.source[i] != t.range[j]) continue;  // y == x.a
            t.compose.push_back({static_cast<int>(i), static_cast<int>(j), index[x][gamma.compose(a, b)]});
        }

    TransformationGroupoid out;
    out.sigma = make_groupoid(t);
    std::vector<int> members;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (N.contains(parts[i].second)) members.push_back(static_cast<int>(i));
    out.bundle = SubgroupBundle::of(out.sigma, members);
    out.arrow_parts = std::move(parts);

    BundleReport rep = analyze_subbundle(out.sigma, out.bundle);
    if (!(rep.wide && rep.subgroup_bundle && rep.normal))
        throw InternalError("pull-back bundle failed its flags: " + rep.witness);
    return out;
}

}  // namespace gctwist
