#pragma once

#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "gctwist/bundle.hpp"
#include "gctwist/errors.hpp"
#include "gctwist/groupoid.hpp"
#include "gctwist/quotient.hpp"
#include "gctwist/rational.hpp"

namespace gctwist {

/// The character group of one finite abelian fiber, fully enumerated.
/// Elements are the fiber's member arrows in sorted order; characters are
/// indexed by exponent tuples against the invariant-factor generators and
/// their values are exact phases in Q/Z.
struct CharacterGroup {
    int unit = -1;
    std::vector<int> elements;              // local index -> parent arrow
    std::unordered_map<int, int> local_of;  // parent arrow -> local index
    std::vector<long> factors;              // d_1 | d_2 | ... (1-factors omitted)
    std::vector<int> generators;            // local indices, aligned with factors
    std::vector<std::vector<long>> coords;  // local element -> exponents
    std::vector<std::vector<Phase>> pairing;  // char x local element

    int size() const { return static_cast<int>(elements.size()); }
    int n_chars() const { return static_cast<int>(pairing.size()); }
    const Phase& phase(int chi, int local_elem) const { return pairing[chi][local_elem]; }

    std::string char_id(int chi) const {
        std::string s = "chi[";
        std::vector<long> k = char_tuple(chi);
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(k[i]);
        }
        return s + "]";
    }

    std::vector<long> char_tuple(int chi) const {
        std::vector<long> k(factors.size());
        for (std::size_t i = factors.size(); i-- > 0;) {
            k[i] = chi % factors[i];
            chi /= static_cast<int>(factors[i]);
        }
        return k;
    }

    /// Index of the character with the given exact phase vector, or -1.
    int char_with_phases(const std::vector<Phase>& phases) const {
        for (int c = 0; c < n_chars(); ++c)
            if (pairing[c] == phases) return c;
        return -1;
    }
};

namespace detail {

/// Invariant factors of a finite abelian group presented by callable
/// multiplication, found by repeatedly splitting off the cyclic subgroup
/// generated by an element of maximal order and lifting generators of the
/// quotient back along it.
struct AbelianDecomposition {
    std::vector<long> factors;  // ascending divisibility
    std::vector<int> gens;
};

inline AbelianDecomposition decompose_abelian(int n, const std::function<int(int, int)>& mul, int id) {
    AbelianDecomposition out;
    if (n == 1) return out;

    auto order = [&](int x) {
        long k = 1;
        int p = x;
        while (p != id) {
            p = mul(p, x);
            ++k;
        }
        return k;
    };
    auto power = [&](int x, long e) {
        int p = id;
        for (long i = 0; i < e; ++i) p = mul(p, x);
        return p;
    };

    long m = 0;
    int g = id;
    for (int x = 0; x < n; ++x) {
        long o = order(x);
        if (o > m) {
            m = o;
            g = x;
        }
    }

    std::vector<int> gpow(m);
    std::unordered_map<int, long> exp_of;
    for (long e = 0; e < m; ++e) {
        gpow[e] = power(g, e);
        exp_of[gpow[e]] = e;
    }

    // Quotient by <g>: canonical representative = least element index in
    // the coset. The quotient inherits a multiplication through reps.
    std::vector<int> coset_rep(n, -1);
    std::vector<int> reps;
    for (int x = 0; x < n; ++x) {
        if (coset_rep[x] >= 0) continue;
        int rep = x;
        for (long e = 0; e < m; ++e) rep = std::min(rep, mul(x, gpow[e]));
        for (long e = 0; e < m; ++e) coset_rep[mul(x, gpow[e])] = rep;
        reps.push_back(rep);
    }
    std::unordered_map<int, int> rep_index;
    for (std::size_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = static_cast<int>(i);
    auto qmul = [&](int i, int j) { return rep_index.at(coset_rep[mul(reps[i], reps[j])]); };

    AbelianDecomposition rec = decompose_abelian(static_cast<int>(reps.size()), qmul, rep_index.at(coset_rep[id]));

    for (std::size_t i = 0; i < rec.gens.size(); ++i) {
        long mi = rec.factors[i];
        int h0 = reps[rec.gens[i]];
        long t = exp_of.at(power(h0, mi));  // h0^mi = g^t with mi | t
        if (t % mi != 0) throw InternalError("abelian decomposition: lift exponent not divisible");
        long s = ((-(t / mi)) % (m / mi) + (m / mi)) % (m / mi);
        out.gens.push_back(mul(h0, gpow[static_cast<std::size_t>(s)]));
        out.factors.push_back(mi);
    }
    out.gens.push_back(g);
    out.factors.push_back(m);
    return out;
}

}  // namespace detail

/// Builds the full character group of the fiber A(u). Refuses non-abelian
/// fibers.
inline CharacterGroup character_group(const FiniteGroupoid& g, const SubgroupBundle& A, int u) {
    CharacterGroup cg;
    cg.unit = u;
    cg.elements = A.fibers[u];
    const int n = cg.size();
    for (int i = 0; i < n; ++i) cg.local_of[cg.elements[i]] = i;

    auto mul = [&](int i, int j) { return cg.local_of.at(g.compose(cg.elements[i], cg.elements[j])); };
    int id = cg.local_of.at(g.unit_arrow(u));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (mul(i, j) != mul(j, i))
                throw PreconditionError("fiber at " + g.unit_id(u) + " is not abelian");

    auto dec = detail::decompose_abelian(n, mul, id);
    cg.factors = dec.factors;
    cg.generators = dec.gens;

    // Coordinates by full enumeration of generator words; the map must be
    // a bijection or the decomposition is wrong.
    long total = 1;
    for (long d : cg.factors) total *= d;
    if (total != n) throw InternalError("invariant factors do not multiply to the fiber order");
    cg.coords.assign(n, {});
    std::vector<char> seen(n, 0);
    std::vector<long> tuple(cg.factors.size(), 0);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (std::size_t i = cg.factors.size(); i-- > 0;) {
            tuple[i] = rem % cg.factors[i];
            rem /= cg.factors[i];
        }
        int p = id;
        for (std::size_t i = 0; i < tuple.size(); ++i)
            for (long e = 0; e < tuple[i]; ++e) p = mul(p, cg.generators[i]);
        if (seen[p]) throw InternalError("generator words do not enumerate the fiber");
        seen[p] = 1;
        cg.coords[p] = tuple;
    }

    cg.pairing.assign(n, std::vector<Phase>(n));
    for (int c = 0; c < n; ++c) {
        std::vector<long> k(cg.factors.size());
        int rem = c;
        for (std::size_t i = cg.factors.size(); i-- > 0;) {
            k[i] = rem % cg.factors[i];
            rem /= static_cast<int>(cg.factors[i]);
        }
        for (int e = 0; e < n; ++e) {
            Rational acc(0);
            for (std::size_t i = 0; i < k.size(); ++i) acc += Rational(k[i] * cg.coords[e][i], cg.factors[i]);
            cg.pairing[c][e] = Phase(acc);
        }
    }
    return cg;
}

/// Per-unit character groups plus the right action chi . sigma given by
/// (chi . sigma)(a) = chi(sigma a sigma^-1). The action is verified to be
/// a groupoid action that fixes characters under member arrows, so it
/// factors through the quotient.
struct DualBundle {
    const FiniteGroupoid* sigma = nullptr;
    const SubgroupBundle* A = nullptr;
    std::vector<CharacterGroup> fibers;  // per unit
    std::vector<int> offset;             // unit -> first global char index
    int total_chars = 0;
    std::vector<int> action;  // global char * n_arrows + sigma arrow -> global char (-1 undefined)

    int global_char(int u, int local) const { return offset[u] + local; }
    int unit_of_char(int chi) const {
        int u = static_cast<int>(std::upper_bound(offset.begin(), offset.end(), chi) - offset.begin()) - 1;
        return u;
    }
    int local_of_char(int chi) const { return chi - offset[unit_of_char(chi)]; }

    const Phase& pair(int chi, int arrow) const {
        int u = unit_of_char(chi);
        const CharacterGroup& cg = fibers[u];
        return cg.pairing[chi - offset[u]][cg.local_of.at(arrow)];
    }

    int act(int chi, int sigma_arrow) const {
        return action[static_cast<std::size_t>(chi) * sigma->n_arrows() + sigma_arrow];
    }

    std::string char_id(int chi) const {
        int u = unit_of_char(chi);
        return fibers[u].char_id(chi - offset[u]) + "@" + sigma->unit_id(u);
    }
};

inline DualBundle dual_bundle_with_action(const FiniteGroupoid& g, const SubgroupBundle& A) {
    BundleReport flags = analyze_subbundle(g, A);
    if (!(flags.wide && flags.subgroup_bundle && flags.normal && flags.abelian))
        throw PreconditionError("dual bundle requires a wide normal abelian subgroup bundle" +
                                (flags.witness.empty() ? std::string() : " (" + flags.witness + ")"));

    DualBundle d;
    d.sigma = &g;
    d.A = &A;
    d.offset.resize(g.n_units() + 1, 0);
    for (int u = 0; u < g.n_units(); ++u) {
        d.fibers.push_back(character_group(g, A, u));
        d.offset[u + 1] = d.offset[u] + d.fibers[u].n_chars();
    }
    d.total_chars = d.offset[g.n_units()];

    // Pairing separates points: every non-unit fiber element is detected
    // by some character.
    for (int u = 0; u < g.n_units(); ++u) {
        const CharacterGroup& cg = d.fibers[u];
        for (int e = 0; e < cg.size(); ++e) {
            if (cg.elements[e] == g.unit_arrow(u)) continue;
            bool seen = false;
            for (int c = 0; c < cg.n_chars() && !seen; ++c) seen = !cg.pairing[c][e].is_zero();
            if (!seen) throw InternalError("pairing fails to separate " + g.arrow_id(cg.elements[e]));
        }
    }

    d.action.assign(static_cast<std::size_t>(d.total_chars) * g.n_arrows(), -1);
    for (int u = 0; u < g.n_units(); ++u) {
        const CharacterGroup& src = d.fibers[u];
        for (int s : g.arrows_into(u)) {  // r(s) = u, chi lives over r(s)
            int v = g.source(s);
            const CharacterGroup& dst = d.fibers[v];
            for (int c = 0; c < src.n_chars(); ++c) {
                std::vector<Phase> phases(dst.size());
                for (int e = 0; e < dst.size(); ++e) {
                    int conj = g.compose(g.compose(s, dst.elements[e]), g.inverse(s));
                    phases[e] = src.pairing[c][src.local_of.at(conj)];
                }
                int target = dst.char_with_phases(phases);
                if (target < 0) throw InternalError("conjugated character is not a character");
                d.action[static_cast<std::size_t>(d.offset[u] + c) * g.n_arrows() + s] = d.offset[v] + target;
            }
        }
    }

    // Action axioms: units fix, composition is compatible, member arrows
    // act trivially (so the action factors through the quotient).
    for (int chi = 0; chi < d.total_chars; ++chi) {
        int u = d.unit_of_char(chi);
        if (d.act(chi, g.unit_arrow(u)) != chi) throw InternalError("dual action moves a character under a unit");
        for (int a : A.fibers[u])
            if (d.act(chi, a) != chi) throw InternalError("dual action does not factor through the quotient");
    }
    for (int s = 0; s < g.n_arrows(); ++s)
        for (int t = 0; t < g.n_arrows(); ++t) {
            int st = g.try_compose(s, t);
            if (st < 0) continue;
            for (int c = 0; c < d.fibers[g.range(s)].n_chars(); ++c) {
                int chi = d.offset[g.range(s)] + c;
                if (d.act(d.act(chi, s), t) != d.act(chi, st))
                    throw InternalError("dual action is not multiplicative");
            }
        }

    return d;
}

/// Fiberwise Gelfand / Fourier transform with the c_u-weighted Haar
/// measure. Forward: fhat(chi) = c * sum_a f(a) * conj(chi(a)); the inverse
/// normalization 1/(c|A|) is forced by the round trip.
struct GelfandFiber {
    const CharacterGroup* cg = nullptr;
    Rational c;

    using CVec = std::vector<std::complex<double>>;

    CVec forward(const CVec& f) const {
        const int n = cg->size();
        CVec out(n, {0.0, 0.0});
        double cw = to_double(c);
        for (int chi = 0; chi < n; ++chi) {
            std::complex<double> acc{0.0, 0.0};
            for (int a = 0; a < n; ++a) acc += f[a] * std::conj(cg->pairing[chi][a].to_complex());
            out[chi] = cw * acc;
        }
        return out;
    }

    CVec inverse(const CVec& fhat) const {
        const int n = cg->size();
        CVec out(n, {0.0, 0.0});
        double norm = 1.0 / (to_double(c) * n);
        for (int a = 0; a < n; ++a) {
            std::complex<double> acc{0.0, 0.0};
            for (int chi = 0; chi < n; ++chi) acc += fhat[chi] * cg->pairing[chi][a].to_complex();
            out[a] = norm * acc;
        }
        return out;
    }

    /// c-weighted convolution f*g(a) = c * sum_b f(b) g(b^-1 a).
    CVec convolve(const FiniteGroupoid& g, const CVec& f, const CVec& h) const {
        const int n = cg->size();
        CVec out(n, {0.0, 0.0});
        double cw = to_double(c);
        for (int a = 0; a < n; ++a) {
            std::complex<double> acc{0.0, 0.0};
            for (int b = 0; b < n; ++b) {
                int binv_a = g.compose(g.inverse(cg->elements[b]), cg->elements[a]);
                acc += f[b] * h[cg->local_of.at(binv_a)];
            }
            out[a] = cw * acc;
        }
        return out;
    }

    CVec involute(const FiniteGroupoid& g, const CVec& f) const {
        const int n = cg->size();
        CVec out(n);
        for (int a = 0; a < n; ++a)
            out[a] = std::conj(f[cg->local_of.at(g.inverse(cg->elements[a]))]);
        return out;
    }
};

}  // namespace gctwist
