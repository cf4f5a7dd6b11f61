#pragma once

#include <complex>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "gctwist/bundle.hpp"
#include "gctwist/duality.hpp"
#include "gctwist/errors.hpp"
#include "gctwist/groupoid.hpp"
#include "gctwist/quotient.hpp"
#include "gctwist/rational.hpp"
#include "gctwist/twist.hpp"

namespace gctwist {

enum class Model { Sigma, Fell, Twisted, Cocycle };

inline const char* model_name(Model m) {
    switch (m) {
        case Model::Sigma: return "sigma";
        case Model::Fell: return "fell";
        case Model::Twisted: return "twisted";
        case Model::Cocycle: return "cocycle";
    }
    return "?";
}

/// A nonnegative rational magnitude times an exact root of unity. Every
/// structure constant of every model has this shape, so the tables can be
/// spot-checked exactly while the numeric layer uses the cached complex
/// values.
struct ExactScalar {
    Rational mag;
    Phase ph;

    bool operator==(const ExactScalar& o) const { return mag == o.mag && ph == o.ph; }
    std::complex<double> to_complex() const { return to_double(mag) * ph.to_complex(); }
    ExactScalar times(const ExactScalar& o) const { return {mag * o.mag, ph + o.ph}; }
};

using CVec = std::vector<std::complex<double>>;

/// A finite-dimensional *-algebra presented by a basis with monomial
/// structure constants: b_i b_j is a single scaled basis element (or zero),
/// and so is each adjoint b_i^*. The canonical functional tau evaluates
/// unit-indexed coefficients against positive weights; its GNS inner
/// product is what the norm layer uses.
///
/// Immutable after construction; all operations are const.
class StarAlgebra {
public:
    Model model;
    int dim = 0;
    std::vector<std::string> basis_ids;
    /// Model-specific basis labels: sigma -> (arrow, -1);
    /// fell -> (G arrow, fiber member arrow); twisted/cocycle -> (char, G arrow).
    std::vector<std::pair<int, int>> parts;

    // Non-owning context; valid while the owning Instance lives.
    const FiniteGroupoid* sigma = nullptr;
    const SubgroupBundle* A = nullptr;
    const HaarWeights* weights = nullptr;
    const Quotient* quotient = nullptr;
    const InducedHaar* alpha = nullptr;
    const DualBundle* dual = nullptr;
    const TwistModel* twist = nullptr;

    struct Mono {
        int target = -1;  // -1 encodes zero
        unsigned scalar = 0;
    };

    Mono mult_mono(int i, int j) const { return mult_[static_cast<std::size_t>(i) * dim + j]; }
    Mono star_mono(int i) const { return star_[i]; }
    const ExactScalar& scalar(unsigned id) const { return pool_[id]; }
    std::complex<double> scalar_value(unsigned id) const { return pool_val_[id]; }
    const std::vector<Rational>& tau_weights() const { return tau_; }

    CVec multiply(const CVec& f, const CVec& g) const {
        if (static_cast<int>(f.size()) != dim || static_cast<int>(g.size()) != dim)
            throw PreconditionError("element does not belong to this algebra");
        CVec out(dim, {0.0, 0.0});
        for (int i = 0; i < dim; ++i) {
            if (f[i] == std::complex<double>(0.0, 0.0)) continue;
            const std::size_t row = static_cast<std::size_t>(i) * dim;
            for (int j = 0; j < dim; ++j) {
                const Mono& m = mult_[row + j];
                if (m.target < 0) continue;
                out[m.target] += f[i] * g[j] * pool_val_[m.scalar];
            }
        }
        return out;
    }

    CVec adjoint(const CVec& f) const {
        if (static_cast<int>(f.size()) != dim) throw PreconditionError("element does not belong to this algebra");
        CVec out(dim, {0.0, 0.0});
        for (int i = 0; i < dim; ++i) {
            const Mono& m = star_[i];
            out[m.target] += std::conj(f[i]) * pool_val_[m.scalar];
        }
        return out;
    }

    std::complex<double> tau(const CVec& f) const {
        std::complex<double> acc{0.0, 0.0};
        for (int i = 0; i < dim; ++i)
            if (tau_[i] != 0) acc += f[i] * to_double(tau_[i]);
        return acc;
    }

    CVec basis_element(int i) const {
        CVec v(dim, {0.0, 0.0});
        v[i] = 1.0;
        return v;
    }

    /// Exact product of basis elements, for spot checks.
    std::pair<int, ExactScalar> mult_exact(int i, int j) const {
        const Mono& m = mult_mono(i, j);
        if (m.target < 0) return {-1, ExactScalar{Rational(0), Phase()}};
        return {m.target, pool_[m.scalar]};
    }

    friend class AlgebraBuilder;

private:
    std::vector<Mono> mult_;   // dim * dim
    std::vector<Mono> star_;   // dim
    std::vector<ExactScalar> pool_;
    std::vector<std::complex<double>> pool_val_;
    std::vector<Rational> tau_;
};

class AlgebraBuilder {
public:
    explicit AlgebraBuilder(Model m) { alg_.model = m; }

    int add_basis(std::string id, std::pair<int, int> part) {
        alg_.basis_ids.push_back(std::move(id));
        alg_.parts.push_back(part);
        return static_cast<int>(alg_.basis_ids.size()) - 1;
    }

    void finish_basis() {
        alg_.dim = static_cast<int>(alg_.basis_ids.size());
        alg_.mult_.assign(static_cast<std::size_t>(alg_.dim) * alg_.dim, {});
        alg_.star_.assign(alg_.dim, {});
        alg_.tau_.assign(alg_.dim, Rational(0));
    }

    unsigned intern(const ExactScalar& s) {
        for (unsigned k = 0; k < alg_.pool_.size(); ++k)
            if (alg_.pool_[k] == s) return k;
        alg_.pool_.push_back(s);
        alg_.pool_val_.push_back(s.to_complex());
        return static_cast<unsigned>(alg_.pool_.size()) - 1;
    }

    void set_mult(int i, int j, int target, const ExactScalar& s) {
        alg_.mult_[static_cast<std::size_t>(i) * alg_.dim + j] = {target, intern(s)};
    }
    void set_star(int i, int target, const ExactScalar& s) { alg_.star_[i] = {target, intern(s)}; }
    void set_tau(int i, const Rational& w) { alg_.tau_[i] = w; }

    StarAlgebra take() { return std::move(alg_); }

private:
    StarAlgebra alg_;
};

namespace detail {

inline void require_invariant_lambda(const FiniteGroupoid& g, const HaarWeights& w) {
    std::string witness;
    if (!w.lambda_invariant(g, &witness))
        throw PreconditionError("lambda weights are not constant on the component of arrow " + witness +
                                "; convolution would not be associative");
}

}  // namespace detail

/// Groupoid convolution algebra on C(Sigma):
/// f*g(s) = d_{r(s)} * sum_{r(t)=r(s)} f(t) g(t^-1 s),  f^*(s) = conj f(s^-1).
inline StarAlgebra build_sigma_algebra(const FiniteGroupoid& g, const HaarWeights& w) {
    w.check(g.n_units());
    detail::require_invariant_lambda(g, w);
    AlgebraBuilder b(Model::Sigma);
    for (int a = 0; a < g.n_arrows(); ++a) b.add_basis(g.arrow_id(a), {a, -1});
    b.finish_basis();
    for (int a = 0; a < g.n_arrows(); ++a) {
        for (int c = 0; c < g.n_arrows(); ++c) {
            int ac = g.try_compose(a, c);
            if (ac < 0) continue;
            b.set_mult(a, c, ac, {w.lambda[g.range(a)], Phase()});
        }
        b.set_star(a, g.inverse(a), {Rational(1), Phase()});
    }
    for (int u = 0; u < g.n_units(); ++u) b.set_tau(g.unit_arrow(u), w.mu[u] * w.lambda[u]);
    StarAlgebra out = b.take();
    out.sigma = &g;
    out.weights = &w;
    return out;
}

/// Crossed-product model: equivariant sections with values in the fiber
/// group algebras, indexed by (coset, fiber element) through the twist
/// section. Products are computed by direct evaluation of the convolution
/// formula at section representatives, staying in exact rationals.
inline StarAlgebra build_fell_algebra(const FiniteGroupoid& g, const SubgroupBundle& A, const HaarWeights& w,
                                      const Quotient& q, const InducedHaar& ih, const TwistModel& tm) {
    w.check(g.n_units());
    detail::require_invariant_lambda(g, w);
    const FiniteGroupoid& G = q.G;

    AlgebraBuilder b(Model::Fell);
    std::vector<std::vector<int>> index(G.n_arrows());  // coset x local fiber elem -> basis id
    std::vector<std::unordered_map<int, int>> local(g.n_units());
    for (int u = 0; u < g.n_units(); ++u)
        for (std::size_t k = 0; k < A.fibers[u].size(); ++k) local[u][A.fibers[u][k]] = static_cast<int>(k);
    for (int c = 0; c < G.n_arrows(); ++c) {
        int u = G.range(c);
        index[c].resize(A.fibers[u].size());
        for (std::size_t k = 0; k < A.fibers[u].size(); ++k)
            index[c][k] = b.add_basis(G.arrow_id(c) + ";" + g.arrow_id(A.fibers[u][k]), {c, A.fibers[u][k]});
    }
    b.finish_basis();

    std::vector<Rational> delta = modular_delta(g, w);

    for (int c1 = 0; c1 < G.n_arrows(); ++c1) {
        const int u1 = G.range(c1);
        const int t1 = tm.section[c1];
        for (int c2 = 0; c2 < G.n_arrows(); ++c2) {
            int c12 = G.try_compose(c1, c2);
            if (c12 < 0) continue;
            const int t2 = tm.section[c2], t12 = tm.section[c12];
            // sp = t1^-1 t12 lies in the coset c2; pulling it back to the
            // representative gives the equivariance shift.
            int sp = g.compose(g.inverse(t1), t12);
            int shift = g.compose(sp, g.inverse(t2));  // in A(r(c2))
            Rational mag = ih.alpha[c1] * delta[t1] * w.beta[u1];
            for (std::size_t k1 = 0; k1 < A.fibers[u1].size(); ++k1) {
                int b1 = A.fibers[u1][k1];
                for (std::size_t k2 = 0; k2 < A.fibers[G.range(c2)].size(); ++k2) {
                    int b2 = A.fibers[G.range(c2)][k2];
                    // g-side value is the delta at y = b2 * shift^-1;
                    // theta_{t1} moves it to t1 y t1^-1.
                    int y = g.compose(b2, g.inverse(shift));
                    int z = g.compose(g.compose(t1, y), g.inverse(t1));
                    int target = g.compose(b1, z);
                    b.set_mult(index[c1][k1], index[c2][k2], index[c12][local[u1].at(target)], {mag, Phase()});
                }
            }
        }
        // f^*(s) = theta_s(f(s^-1)^*), evaluated at the representative of
        // the inverse coset.
        int c1i = G.inverse(c1);
        int ti = tm.section[c1i];
        int sinv = g.inverse(ti);  // lies in the coset c1
        int shift = g.compose(sinv, g.inverse(t1));
        for (std::size_t k1 = 0; k1 < A.fibers[u1].size(); ++k1) {
            int b1 = A.fibers[u1][k1];
            int y = g.compose(b1, g.inverse(shift));
            int z = g.compose(g.compose(ti, g.inverse(y)), g.inverse(ti));
            b.set_star(index[c1][k1], index[c1i][local[G.range(c1i)].at(z)], {delta[ti], Phase()});
        }
    }

    for (int u = 0; u < g.n_units(); ++u) {
        int cu = G.unit_arrow(u);
        b.set_tau(index[cu][local[u].at(g.unit_arrow(u))], w.mu[u] * w.lambda[u]);
    }

    StarAlgebra out = b.take();
    if (out.dim != g.n_arrows()) throw InternalError("fell model dimension mismatch");
    out.sigma = &g;
    out.A = &A;
    out.weights = &w;
    out.quotient = &q;
    out.alpha = &ih;
    out.twist = &tm;
    out.dual = tm.dual;
    return out;
}

/// Restricted model on the twist: functions F with F(chi, a s) =
/// chi(a) F(chi, s), indexed by (character, coset) at section
/// representatives, with
/// F*G(chi, s) = sum alpha^{r(s)} F(chi, t) G(chi.t, t^-1 s) and
/// F^*(chi, s) = conj F(chi.s, s^-1).
inline StarAlgebra build_twisted_algebra(const FiniteGroupoid& g, const SubgroupBundle& A, const HaarWeights& w,
                                         const Quotient& q, const InducedHaar& ih, const DualBundle& dual,
                                         const TwistModel& tm, const std::vector<Rational>* w_chi = nullptr) {
    w.check(g.n_units());
    detail::require_invariant_lambda(g, w);
    const FiniteGroupoid& G = q.G;

    AlgebraBuilder b(Model::Twisted);
    for (std::size_t i = 0; i < tm.base_parts.size(); ++i)
        b.add_basis(tm.base.arrow_id(static_cast<int>(i)), tm.base_parts[i]);
    b.finish_basis();

    for (int i = 0; i < static_cast<int>(tm.base_parts.size()); ++i) {
        auto [chi, c1] = tm.base_parts[i];
        int chi1 = tm.act_G(chi, c1);
        int t1 = tm.section[c1];
        for (int j = 0; j < static_cast<int>(tm.base_parts.size()); ++j) {
            if (tm.base.try_compose(i, j) < 0) continue;
            auto [chi2, c2] = tm.base_parts[j];
            if (chi2 != chi1) throw InternalError("twisted basis composability mismatch");
            int c12 = G.compose(c1, c2);
            int sp = g.compose(g.inverse(t1), tm.section[c12]);
            int shift = g.compose(sp, g.inverse(tm.section[c2]));  // in A(r(c2))
            Phase ph = dual.pair(chi1, shift);
            b.set_mult(i, j, tm.base_index[chi][c12], {ih.alpha[c1], ph});
        }
        // adjoint: lands at (chi.c1, c1^-1) with phase -chi(shift).
        int c1i = G.inverse(c1);
        int shift = g.compose(g.inverse(tm.section[c1i]), g.inverse(t1));
        b.set_star(i, tm.base_index[chi1][c1i], {Rational(1), -dual.pair(chi, shift)});
    }

    for (int i = 0; i < static_cast<int>(tm.base_parts.size()); ++i) {
        auto [chi, c] = tm.base_parts[i];
        if (!G.is_unit_arrow(c)) continue;
        b.set_tau(i, w_chi ? (*w_chi)[chi] : Rational(1));
    }

    StarAlgebra out = b.take();
    if (out.dim != g.n_arrows()) throw InternalError("twisted model dimension mismatch");
    out.sigma = &g;
    out.A = &A;
    out.weights = &w;
    out.quotient = &q;
    out.alpha = &ih;
    out.dual = &dual;
    out.twist = &tm;
    return out;
}

/// Cocycle presentation: the same index set (character, coset) with
/// products read off the extracted 2-cocycle and the quotient Haar
/// weights, never touching Sigma-level representatives. Equivalent to the
/// twisted model under the identity basis identification; building it
/// independently is what makes that equivalence a real check.
inline StarAlgebra build_cocycle_algebra(const FiniteGroupoid& g, const SubgroupBundle& A, const HaarWeights& w,
                                         const Quotient& q, const InducedHaar& ih, const DualBundle& dual,
                                         const TwistModel& tm, const std::vector<Rational>* w_chi = nullptr) {
    w.check(g.n_units());
    detail::require_invariant_lambda(g, w);
    const FiniteGroupoid& B = tm.base;

    AlgebraBuilder b(Model::Cocycle);
    for (std::size_t i = 0; i < tm.base_parts.size(); ++i)
        b.add_basis(B.arrow_id(static_cast<int>(i)), tm.base_parts[i]);
    b.finish_basis();

    for (int i = 0; i < B.n_arrows(); ++i) {
        int c1 = tm.base_parts[i].second;
        for (int j = 0; j < B.n_arrows(); ++j) {
            int ij = B.try_compose(i, j);
            if (ij < 0) continue;
            // Restricted convolution carries the conjugate of the
            // T-groupoid cocycle.
            b.set_mult(i, j, ij, {ih.alpha[c1], -tm.cocycle(i, j)});
        }
        int istar = B.inverse(i);
        b.set_star(i, istar, {Rational(1), tm.cocycle(i, istar)});
    }

    for (int i = 0; i < B.n_arrows(); ++i) {
        auto [chi, c] = tm.base_parts[i];
        if (!q.G.is_unit_arrow(c)) continue;
        b.set_tau(i, w_chi ? (*w_chi)[chi] : Rational(1));
    }

    StarAlgebra out = b.take();
    if (out.dim != g.n_arrows()) throw InternalError("cocycle model dimension mismatch");
    out.sigma = &g;
    out.A = &A;
    out.weights = &w;
    out.quotient = &q;
    out.alpha = &ih;
    out.dual = &dual;
    out.twist = &tm;
    return out;
}

}  // namespace gctwist
