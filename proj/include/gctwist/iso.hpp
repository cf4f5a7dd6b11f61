#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gctwist/algebra.hpp"
#include "gctwist/norms.hpp"
#include "gctwist/rng.hpp"

namespace gctwist {

/// A linear map between two algebras, stored as the matrix taking source
/// coefficients to target coefficients.
struct LinearMap {
    std::string name;
    const StarAlgebra* src = nullptr;
    const StarAlgebra* dst = nullptr;
    Eigen::MatrixXcd M;

    CVec apply(const CVec& f) const { return from_eigen(M * to_eigen(f)); }
};

/// j(f)(s)(a) = delta(s)^{1/2} f(a s): the sigma model lands in the fell
/// model; per basis element the image is the single pair
/// (coset of s, s * rep^-1) scaled by delta(rep)^{1/2}.
inline LinearMap map_j(const StarAlgebra& sig, const StarAlgebra& fell) {
    const FiniteGroupoid& g = *sig.sigma;
    const Quotient& q = *fell.quotient;
    const TwistModel& tm = *fell.twist;
    std::vector<Rational> delta = modular_delta(g, *sig.weights);

    std::vector<std::vector<int>> index(q.G.n_arrows());
    for (int i = 0; i < fell.dim; ++i) {
        auto [c, elem] = fell.parts[i];
        (void)elem;
        index[c].push_back(i);
    }

    LinearMap L{"j", &sig, &fell, Eigen::MatrixXcd::Zero(fell.dim, sig.dim)};
    for (int s = 0; s < g.n_arrows(); ++s) {
        int c = q.proj[s];
        int rep = tm.section[c];
        int a = g.compose(s, g.inverse(rep));  // s = a * rep
        double scale = std::sqrt(to_double(delta[rep]));
        for (int i : index[c])
            if (fell.parts[i].second == a) L.M(i, s) = scale;
    }
    return L;
}

/// Fiberwise Gelfand transform from the fell model to the twisted model:
/// F(chi, rep) = c_{r} * sum_a g(rep)(a) conj(chi(a)).
inline LinearMap map_gelfand_F(const StarAlgebra& fell, const StarAlgebra& twisted) {
    const FiniteGroupoid& g = *fell.sigma;
    const DualBundle& dual = *twisted.dual;
    const HaarWeights& w = *fell.weights;
    const TwistModel& tm = *twisted.twist;

    LinearMap L{"F", &fell, &twisted, Eigen::MatrixXcd::Zero(twisted.dim, fell.dim)};
    for (int jcol = 0; jcol < fell.dim; ++jcol) {
        auto [c, elem] = fell.parts[jcol];
        int u = tm.quotient->G.range(c);
        double cu = to_double(w.beta[u]);
        const CharacterGroup& cg = dual.fibers[u];
        int local = cg.local_of.at(elem);
        for (int lc = 0; lc < cg.n_chars(); ++lc) {
            int chi = dual.global_char(u, lc);
            int row = tm.base_index[chi][c];
            L.M(row, jcol) = cu * std::conj(cg.pairing[lc][local].to_complex());
        }
    }
    return L;
}

/// Phi(f)(chi, s) = delta(s)^{1/2} c_{r(s)} sum_a f(a s) conj(chi(a)),
/// evaluated directly so the factorization Phi = F o j is a real check.
inline LinearMap map_phi(const StarAlgebra& sig, const StarAlgebra& twisted) {
    const FiniteGroupoid& g = *sig.sigma;
    const Quotient& q = *twisted.quotient;
    const DualBundle& dual = *twisted.dual;
    const HaarWeights& w = *sig.weights;
    const TwistModel& tm = *twisted.twist;
    std::vector<Rational> delta = modular_delta(g, w);

    LinearMap L{"Phi", &sig, &twisted, Eigen::MatrixXcd::Zero(twisted.dim, sig.dim)};
    for (int s = 0; s < g.n_arrows(); ++s) {
        int c = q.proj[s];
        int rep = tm.section[c];
        int u = g.range(s);
        int a = g.compose(s, g.inverse(rep));  // s = a * rep with a in A(r(s))
        double scale = std::sqrt(to_double(delta[rep])) * to_double(w.beta[u]);
        const CharacterGroup& cg = dual.fibers[u];
        int local = cg.local_of.at(a);
        for (int lc = 0; lc < cg.n_chars(); ++lc) {
            int chi = dual.global_char(u, lc);
            int row = tm.base_index[chi][c];
            L.M(row, s) = scale * std::conj(cg.pairing[lc][local].to_complex());
        }
    }
    return L;
}

/// Coefficient-wise factorization defect max |Phi - F j|.
inline double factorization_defect(const LinearMap& phi, const LinearMap& F, const LinearMap& j) {
    return (phi.M - F.M * j.M).cwiseAbs().maxCoeff();
}

struct IsoTolerances {
    double algebraic = 1e-10;  // multiplicativity and star defects
    double isometry = 1e-8;    // |norm ratio - 1|
    double pivot = 1e-10;      // rank floor
};

struct IsoReport {
    std::string map_name;
    int dim_src = 0, dim_dst = 0;
    int rank = 0;
    bool bijective = false;
    double max_mult_defect = 0.0;
    std::string mult_witness;
    double max_star_defect = 0.0;
    std::string star_witness;
    double max_norm_ratio_dev = 0.0;
    int pair_checks = 0;
    bool exhaustive = false;
    int norm_trials = 0;
    std::uint64_t seed = 0;
    IsoTolerances tol;
    bool mult_pass = false, star_pass = false, isometry_pass = false;
    std::string note = "finite scale: full and reduced C*-norms coincide, so one GNS norm decides isometry";

    bool pass() const { return bijective && mult_pass && star_pass && isometry_pass; }
};

/// Property-based *-isomorphism verdict: exact-rank bijectivity with a
/// pivot floor, multiplicativity and star preservation on basis pairs
/// (exhaustive up to dim 48, sampled above), and C*-norm isometry on
/// random nonzero elements.
inline IsoReport verify_star_iso(const LinearMap& L, int trials, std::uint64_t seed,
                                 IsoTolerances tol = IsoTolerances{}) {
    const StarAlgebra& A = *L.src;
    const StarAlgebra& B = *L.dst;
    IsoReport rep;
    rep.map_name = L.name;
    rep.dim_src = A.dim;
    rep.dim_dst = B.dim;
    rep.seed = seed;
    rep.tol = tol;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(L.M);
    qr.setThreshold(tol.pivot);
    rep.rank = static_cast<int>(qr.rank());
    rep.bijective = (A.dim == B.dim) && (rep.rank == A.dim);

    Rng rng(seed);
    rep.exhaustive = A.dim <= 48;
    auto check_pair = [&](int i, int j) {
        CVec prod(A.dim, {0.0, 0.0});
        auto m = A.mult_mono(i, j);
        if (m.target >= 0) prod[m.target] = A.scalar_value(m.scalar);
        CVec lhs = L.apply(prod);
        CVec rhs = B.multiply(L.apply(A.basis_element(i)), L.apply(A.basis_element(j)));
        double defect = 0.0;
        for (int k = 0; k < B.dim; ++k) defect = std::max(defect, std::abs(lhs[k] - rhs[k]));
        if (defect > rep.max_mult_defect) {
            rep.max_mult_defect = defect;
            rep.mult_witness = "(" + A.basis_ids[i] + ", " + A.basis_ids[j] + ")";
        }
        ++rep.pair_checks;
    };
    if (rep.exhaustive) {
        for (int i = 0; i < A.dim; ++i)
            for (int j = 0; j < A.dim; ++j) check_pair(i, j);
    } else {
        for (int t = 0; t < trials; ++t)
            check_pair(static_cast<int>(rng.index(A.dim)), static_cast<int>(rng.index(A.dim)));
    }

    for (int i = 0; i < A.dim; ++i) {
        CVec lhs = L.apply(A.adjoint(A.basis_element(i)));
        CVec rhs = B.adjoint(L.apply(A.basis_element(i)));
        double defect = 0.0;
        for (int k = 0; k < B.dim; ++k) defect = std::max(defect, std::abs(lhs[k] - rhs[k]));
        if (defect > rep.max_star_defect) {
            rep.max_star_defect = defect;
            rep.star_witness = A.basis_ids[i];
        }
    }

    GnsSpace gns_a = gns_space(A);
    GnsSpace gns_b = gns_space(B);
    rep.norm_trials = trials;
    for (int t = 0; t < trials; ++t) {
        CVec f(A.dim);
        for (int i = 0; i < A.dim; ++i) f[i] = rng.complex_normal();
        double na = c_norm(A, gns_a, f);
        if (na == 0.0) continue;
        double nb = c_norm(B, gns_b, L.apply(f));
        rep.max_norm_ratio_dev = std::max(rep.max_norm_ratio_dev, std::abs(nb / na - 1.0));
    }

    rep.mult_pass = rep.max_mult_defect <= tol.algebraic;
    rep.star_pass = rep.max_star_defect <= tol.algebraic;
    rep.isometry_pass = rep.max_norm_ratio_dev <= tol.isometry;
    return rep;
}

}  // namespace gctwist
