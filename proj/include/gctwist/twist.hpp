#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gctwist/duality.hpp"
#include "gctwist/errors.hpp"
#include "gctwist/groupoid.hpp"
#include "gctwist/quotient.hpp"
#include "gctwist/rational.hpp"
#include "gctwist/snf.hpp"

namespace gctwist {

enum class SectionPolicy { First, Last, Custom };

/// Section-and-cocycle presentation of the T-groupoid over the
/// transformation groupoid of the dual action.
///
/// The base groupoid has arrows (chi, gamma) with the character over
/// r(gamma); a section gamma -> Sigma picks coset representatives with
/// units mapped to unit arrows; the defect a(gamma, eta) =
/// s(gamma) s(eta) s(gamma eta)^-1 lands in the bundle fiber at r(gamma);
/// and the extracted 2-cocycle on composable base arrows is the exact
/// phase  omega((chi, gamma), (chi.gamma, eta)) = chi(a(gamma, eta)).
struct TwistModel {
    const FiniteGroupoid* sigma = nullptr;
    const SubgroupBundle* A = nullptr;
    const Quotient* quotient = nullptr;
    const DualBundle* dual = nullptr;

    FiniteGroupoid base;                           // dual transformation groupoid
    std::vector<std::pair<int, int>> base_parts;   // base arrow -> (global char, G arrow)
    std::vector<std::vector<int>> base_index;      // char x G arrow -> base arrow (-1)
    std::vector<int> section;                      // G arrow -> Sigma arrow
    std::vector<int> defect;                       // g1 * nG + g2 -> bundle arrow (-1 if not composable)
    SectionPolicy policy = SectionPolicy::First;

    int n_base_arrows() const { return base.n_arrows(); }

    /// chi . gamma through any coset member (the action factors through G).
    int act_G(int chi, int g_arrow) const { return dual->act(chi, quotient->canonical[g_arrow]); }

    int defect_of(int g1, int g2) const { return defect[static_cast<std::size_t>(g1) * quotient->G.n_arrows() + g2]; }

    /// Cocycle on composable base arrows x = (chi, g1), y = (chi.g1, g2).
    Phase cocycle(int x, int y) const {
        auto [chi, g1] = base_parts[x];
        auto [chi2, g2] = base_parts[y];
        if (chi2 != act_G(chi, g1) || base.try_compose(x, y) < 0)
            throw PreconditionError("cocycle evaluated on a non-composable pair");
        return dual->pair(chi, defect_of(g1, g2));
    }
};

inline TwistModel build_twist_model(const FiniteGroupoid& sigma, const SubgroupBundle& A, const Quotient& q,
                                    const DualBundle& dual, SectionPolicy policy = SectionPolicy::First,
                                    const std::map<std::string, std::string>* custom_section = nullptr) {
    TwistModel tm;
    tm.sigma = &sigma;
    tm.A = &A;
    tm.quotient = &q;
    tm.dual = &dual;
    tm.policy = policy;

    const FiniteGroupoid& G = q.G;
    const int nG = G.n_arrows();

    tm.section.resize(nG);
    for (int c = 0; c < nG; ++c) {
        if (G.is_unit_arrow(c)) {
            tm.section[c] = sigma.unit_arrow(G.range(c));
        } else if (policy == SectionPolicy::First) {
            tm.section[c] = q.cosets[c].front();
        } else if (policy == SectionPolicy::Last) {
            tm.section[c] = q.cosets[c].back();
        } else {
            if (!custom_section) throw PreconditionError("custom section policy requires a section map");
            auto it = custom_section->find(G.arrow_id(c));
            if (it == custom_section->end())
                throw PreconditionError("custom section missing coset " + G.arrow_id(c));
            int rep = sigma.find_arrow(it->second);
            if (rep < 0) throw PreconditionError("custom section names unknown arrow '" + it->second + "'");
            if (q.proj[rep] != c)
                throw PreconditionError("custom section representative " + it->second + " lies in coset " +
                                        G.arrow_id(q.proj[rep]) + ", not " + G.arrow_id(c));
            tm.section[c] = rep;
        }
    }
    if (policy == SectionPolicy::Custom) {
        for (int u = 0; u < G.n_units(); ++u) {
            int c = G.unit_arrow(u);
            if (tm.section[c] != sigma.unit_arrow(G.range(c)))
                throw PreconditionError("custom section must map the unit coset at " + G.unit_id(u) +
                                        " to the unit arrow");
        }
    }

    tm.defect.assign(static_cast<std::size_t>(nG) * nG, -1);
    for (int g1 = 0; g1 < nG; ++g1)
        for (int g2 = 0; g2 < nG; ++g2) {
            int g12 = G.try_compose(g1, g2);
            if (g12 < 0) continue;
            int d = sigma.compose(sigma.compose(tm.section[g1], tm.section[g2]), sigma.inverse(tm.section[g12]));
            if (!A.contains(d) || sigma.range(d) != G.range(g1))
                throw InternalError("section defect escapes the bundle fiber at r(gamma)");
            tm.defect[static_cast<std::size_t>(g1) * nG + g2] = d;
        }

    // Base groupoid: arrows (chi, gamma) with the character over r(gamma).
    GroupoidTables t;
    for (int chi = 0; chi < dual.total_chars; ++chi) t.units.push_back(dual.char_id(chi));
    tm.base_index.assign(dual.total_chars, std::vector<int>(nG, -1));
    for (int chi = 0; chi < dual.total_chars; ++chi) {
        int u = dual.unit_of_char(chi);
        for (int c = 0; c < nG; ++c) {
            if (G.range(c) != u) continue;
            tm.base_index[chi][c] = static_cast<int>(tm.base_parts.size());
            tm.base_parts.emplace_back(chi, c);
            t.arrows.push_back(dual.char_id(chi) + "|" + G.arrow_id(c));
            t.range.push_back(chi);
            t.source.push_back(dual.act(chi, q.canonical[c]));
        }
    }
    t.inverse.resize(tm.base_parts.size());
    for (std::size_t i = 0; i < tm.base_parts.size(); ++i) {
        auto [chi, c] = tm.base_parts[i];
        t.inverse[i] = tm.base_index[dual.act(chi, q.canonical[c])][G.inverse(c)];
    }
    for (std::size_t i = 0; i < tm.base_parts.size(); ++i)
        for (std::size_t j = 0; j < tm.base_parts.size(); ++j) {
            if (t.source[i] != t.range[j]) continue;
            auto [chi, c1] = tm.base_parts[i];
            int c2 = tm.base_parts[j].second;
            int c12 = G.try_compose(c1, c2);
            if (c12 < 0) throw InternalError("dual transformation groupoid has incompatible composability");
            t.compose.push_back({static_cast<int>(i), static_cast<int>(j), tm.base_index[chi][c12]});
        }
    tm.base = make_groupoid(t);

    // Exhaustive cocycle identity and normalization; a failure here is a
    // defect-table bug, never bad input.
    const FiniteGroupoid& B = tm.base;
    for (int x = 0; x < B.n_arrows(); ++x) {
        if (B.is_unit_arrow(x)) continue;
        int ux = tm.base_index[B.range(x)][G.unit_arrow(dual.unit_of_char(B.range(x)))];
        if (!tm.cocycle(ux, x).is_zero() || !tm.cocycle(x, B.unit_arrow(B.source(x))).is_zero())
            throw InternalError("cocycle is not normalized at " + B.arrow_id(x));
    }
    for (int x = 0; x < B.n_arrows(); ++x)
        for (int y = 0; y < B.n_arrows(); ++y) {
            int xy = B.try_compose(x, y);
            if (xy < 0) continue;
            for (int z = 0; z < B.n_arrows(); ++z) {
                if (B.try_compose(y, z) < 0) continue;
                int yz = B.compose(y, z);
                if (tm.cocycle(x, y) + tm.cocycle(xy, z) != tm.cocycle(y, z) + tm.cocycle(x, yz))
                    throw InternalError("cocycle identity fails at (" + B.arrow_id(x) + ", " + B.arrow_id(y) +
                                        ", " + B.arrow_id(z) + ")");
            }
        }

    return tm;
}

/// Outcome of the exact coboundary decision over Q/Z.
struct CoboundaryResult {
    bool trivial = false;
    std::vector<Phase> witness;                // per arrow of the groupoid, when trivial
    std::vector<std::array<int, 2>> pairs;     // composable pairs, row order of the system
    std::vector<Int> certificate;              // integer row combination, when nontrivial
    Phase certificate_value;                   // sum of certificate * omega, nonzero in Q/Z
};

/// Decides whether omega = db is solvable over the divisible group Q/Z.
///
/// The incidence system b(x) + b(y) - b(xy) = omega(x, y) is scaled by the
/// common denominator L and lifted to the integers; by divisibility every
/// nonzero elementary divisor is solvable, so solvability reduces to the
/// transformed right-hand side vanishing mod L on the zero rows of the
/// Smith form. On failure the offending row of U is an integer left-null
/// vector of the incidence matrix whose pairing with omega is nonzero in
/// Q/Z: an exact obstruction certificate.
inline CoboundaryResult coboundary_solve(const FiniteGroupoid& H, const std::function<Phase(int, int)>& omega,
                                         std::size_t max_pairs = 20000) {
    CoboundaryResult res;
    const int n = H.n_arrows();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (H.try_compose(x, y) >= 0) res.pairs.push_back({x, y});
    if (res.pairs.size() > max_pairs)
        throw PreconditionError("coboundary system has " + std::to_string(res.pairs.size()) +
                                " composable pairs; limit is " + std::to_string(max_pairs));

    // Refuse non-cocycles with the violating triple.
    for (const auto& [x, y] : res.pairs) {
        int xy = H.compose(x, y);
        for (int z = 0; z < n; ++z) {
            if (H.try_compose(y, z) < 0) continue;
            int yz = H.compose(y, z);
            if (omega(x, y) + omega(xy, z) != omega(y, z) + omega(x, yz))
                throw PreconditionError("not a cocycle: identity fails at (" + H.arrow_id(x) + ", " +
                                        H.arrow_id(y) + ", " + H.arrow_id(z) + ")");
        }
    }

    Int L(1);
    std::vector<Phase> values(res.pairs.size());
    for (std::size_t i = 0; i < res.pairs.size(); ++i) {
        values[i] = omega(res.pairs[i][0], res.pairs[i][1]);
        L = lcm(L, Int(denominator(values[i].value())));
    }

    IntMatrix D(res.pairs.size(), n);
    std::vector<Int> w(res.pairs.size());
    for (std::size_t i = 0; i < res.pairs.size(); ++i) {
        auto [x, y] = res.pairs[i];
        D(i, x) += 1;
        D(i, y) += 1;
        D(i, H.compose(x, y)) -= 1;
        w[i] = Int(numerator(values[i].value())) * (L / Int(denominator(values[i].value())));
    }

    SmithForm snf = smith_normal_form(D, /*with_U=*/false, &w);

    bool solvable = true;
    std::size_t bad_row = 0;
    for (std::size_t i = snf.rank; i < res.pairs.size(); ++i)
        if (snf.rhs[i] % L != 0) {
            solvable = false;
            bad_row = i;
            break;
        }

    if (solvable) {
        // c_i = rhs_i / (s_i L) on the pivot rows, 0 elsewhere; b = V c.
        std::vector<Rational> c(n, Rational(0));
        for (std::size_t i = 0; i < snf.rank && i < static_cast<std::size_t>(n); ++i)
            c[i] = Rational(snf.rhs[i], snf.diag(i) * L);
        res.witness.resize(n);
        for (int j = 0; j < n; ++j) {
            Rational acc(0);
            for (int k = 0; k < n; ++k)
                if (snf.V(j, k) != 0) acc += Rational(snf.V(j, k)) * c[k];
            res.witness[j] = Phase(acc);
        }
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            auto [x, y] = res.pairs[i];
            if (res.witness[x] + res.witness[y] - res.witness[H.compose(x, y)] != values[i])
                throw InternalError("coboundary witness fails verification");
        }
        res.trivial = true;
        return res;
    }

    // Rerun with U to extract the certificate row; only failures pay for it.
    SmithForm full = smith_normal_form(D, /*with_U=*/true, &w);
    if (full.rhs[bad_row] % L == 0) throw InternalError("certificate row disagrees between passes");
    res.certificate = full.U.row(bad_row);
    Rational pairing(0);
    for (std::size_t i = 0; i < res.pairs.size(); ++i)
        if (res.certificate[i] != 0) pairing += Rational(res.certificate[i]) * values[i].value();
    res.certificate_value = Phase(pairing);
    if (res.certificate_value.is_zero()) throw InternalError("obstruction certificate pairs to zero");
    // v must be an integer left-null vector of the incidence matrix.
    for (int j = 0; j < n; ++j) {
        Int acc(0);
        for (std::size_t i = 0; i < res.pairs.size(); ++i)
            if (res.certificate[i] != 0) acc += res.certificate[i] * D(i, j);
        if (acc != 0) throw InternalError("obstruction certificate is not a left-null vector");
    }
    res.trivial = false;
    return res;
}

inline CoboundaryResult coboundary_solve(const TwistModel& tm, std::size_t max_pairs = 20000) {
    return coboundary_solve(tm.base, [&tm](int x, int y) { return tm.cocycle(x, y); }, max_pairs);
}

}  // namespace gctwist
