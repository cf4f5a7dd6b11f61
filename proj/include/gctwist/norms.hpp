#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gctwist/algebra.hpp"
#include "gctwist/errors.hpp"

namespace gctwist {

inline Eigen::VectorXcd to_eigen(const CVec& v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

inline CVec from_eigen(const Eigen::VectorXcd& v) {
    CVec out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v[i];
    return out;
}

/// Matrix of left multiplication by f on the coefficient space.
inline Eigen::MatrixXcd left_mult_matrix(const StarAlgebra& alg, const CVec& f) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(alg.dim, alg.dim);
    for (int i = 0; i < alg.dim; ++i) {
        if (f[i] == std::complex<double>(0.0, 0.0)) continue;
        for (int j = 0; j < alg.dim; ++j) {
            auto m = alg.mult_mono(i, j);
            if (m.target < 0) continue;
            M(m.target, j) += f[i] * alg.scalar_value(m.scalar);
        }
    }
    return M;
}

/// Matrix of right multiplication by basis element j: x -> x * b_j.
inline Eigen::MatrixXcd right_mult_basis_matrix(const StarAlgebra& alg, int j) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(alg.dim, alg.dim);
    for (int i = 0; i < alg.dim; ++i) {
        auto m = alg.mult_mono(i, j);
        if (m.target >= 0) M(m.target, i) += alg.scalar_value(m.scalar);
    }
    return M;
}

inline Eigen::MatrixXcd left_mult_basis_matrix(const StarAlgebra& alg, int j) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(alg.dim, alg.dim);
    for (int i = 0; i < alg.dim; ++i) {
        auto m = alg.mult_mono(j, i);
        if (m.target >= 0) M(m.target, i) += alg.scalar_value(m.scalar);
    }
    return M;
}

/// GNS data of the canonical functional: Gram(i, j) = tau(b_i^* b_j),
/// positive definite exactly when tau is faithful. The Cholesky factor
/// turns coefficient space into the GNS Hilbert space.
struct GnsSpace {
    Eigen::MatrixXcd gram;
    Eigen::MatrixXcd chol;  // gram = chol * chol^H, lower triangular
    double min_eigenvalue = 0.0;

    /// Conjugates a coefficient-space operator into orthonormal GNS
    /// coordinates: T = L^H M L^{-H}.
    Eigen::MatrixXcd to_gns(const Eigen::MatrixXcd& M) const {
        Eigen::MatrixXcd T = chol.adjoint() * M;
        return chol.adjoint().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(T);
    }
};

inline GnsSpace gns_space(const StarAlgebra& alg) {
    GnsSpace g;
    g.gram = Eigen::MatrixXcd::Zero(alg.dim, alg.dim);
    const auto& tw = alg.tau_weights();
    for (int i = 0; i < alg.dim; ++i) {
        auto si = alg.star_mono(i);
        for (int j = 0; j < alg.dim; ++j) {
            auto m = alg.mult_mono(si.target, j);
            if (m.target < 0 || tw[m.target] == 0) continue;
            // star_mono already stores the adjoint's coefficient, so no
            // extra conjugation here.
            g.gram(i, j) += alg.scalar_value(si.scalar) * alg.scalar_value(m.scalar) * to_double(tw[m.target]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.gram);
    g.min_eigenvalue = es.eigenvalues().minCoeff();
    if (g.min_eigenvalue <= 0)
        throw InternalError("canonical functional is not faithful: GNS Gram matrix is singular");
    Eigen::LLT<Eigen::MatrixXcd> llt(g.gram);
    if (llt.info() != Eigen::Success) throw InternalError("GNS Gram matrix Cholesky failed");
    g.chol = llt.matrixL();
    return g;
}

inline double operator_norm(const Eigen::MatrixXcd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

/// The C*-norm: operator norm of left multiplication on the GNS space of
/// the canonical faithful functional. In finite dimension every faithful
/// *-representation computes the same norm, and full = reduced.
inline double c_norm(const StarAlgebra& alg, const GnsSpace& gns, const CVec& f) {
    return operator_norm(gns.to_gns(left_mult_matrix(alg, f)));
}

namespace detail {

/// C*(A(u))-norm of a fiber group-algebra element: operator norm of
/// c_u-weighted convolution on l^2 of the fiber.
inline double fiber_norm(const FiniteGroupoid& g, const SubgroupBundle& A, const HaarWeights& w, int u,
                         const CVec& h) {
    const auto& fib = A.fibers[u];
    const int n = static_cast<int>(fib.size());
    std::unordered_map<int, int> local;
    for (int k = 0; k < n; ++k) local[fib[k]] = k;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    double cu = to_double(w.beta[u]);
    for (int x = 0; x < n; ++x)
        for (int z = 0; z < n; ++z) {
            // column z of convolution-by-h: (h * delta_z)(x) = c_u h(x z^-1)
            int xzinv = g.compose(fib[x], g.inverse(fib[z]));
            M(x, z) = cu * h[local.at(xzinv)];
        }
    return operator_norm(M);
}

}  // namespace detail

/// I-norm: max over units of the alpha-weighted l^1 mass of the fiber
/// norms, over ranges and over sources. For the sigma model the fiber norm
/// is |f(arrow)| against lambda; for the fell model it is the C*(A(u))
/// norm of the section value; for the twisted and cocycle models it is the
/// sup over the characters in the fiber, which the Gelfand isometry makes
/// the same number as the fell fiber norm.
inline double i_norm(const StarAlgebra& alg, const CVec& f) {
    if (alg.model == Model::Sigma) {
        const FiniteGroupoid& g = *alg.sigma;
        const HaarWeights& w = *alg.weights;
        double best = 0.0;
        for (int u = 0; u < g.n_units(); ++u) {
            double row = 0.0, col = 0.0;
            for (int a : g.arrows_into(u)) row += std::abs(f[a]);
            for (int a : g.arrows_from(u)) col += std::abs(f[a]);
            best = std::max({best, to_double(w.lambda[u]) * row, to_double(w.lambda[u]) * col});
        }
        return best;
    }

    const Quotient& q = *alg.quotient;
    const InducedHaar& ih = *alg.alpha;
    const FiniteGroupoid& G = q.G;
    std::vector<double> fiber(G.n_arrows(), 0.0);

    if (alg.model == Model::Fell) {
        const FiniteGroupoid& g = *alg.sigma;
        const SubgroupBundle& A = *alg.A;
        std::vector<CVec> values(G.n_arrows());
        for (int c = 0; c < G.n_arrows(); ++c) values[c].assign(A.fibers[G.range(c)].size(), {0.0, 0.0});
        std::vector<std::unordered_map<int, int>> local(g.n_units());
        for (int u = 0; u < g.n_units(); ++u)
            for (std::size_t k = 0; k < A.fibers[u].size(); ++k) local[u][A.fibers[u][k]] = static_cast<int>(k);
        for (int i = 0; i < alg.dim; ++i) {
            auto [c, elem] = alg.parts[i];
            values[c][local[G.range(c)].at(elem)] += f[i];
        }
        for (int c = 0; c < G.n_arrows(); ++c)
            fiber[c] = detail::fiber_norm(g, A, *alg.weights, G.range(c), values[c]);
    } else {
        for (int i = 0; i < alg.dim; ++i) {
            int c = alg.parts[i].second;
            fiber[c] = std::max(fiber[c], std::abs(f[i]));
        }
    }

    double best = 0.0;
    for (int u = 0; u < G.n_units(); ++u) {
        double row = 0.0, col = 0.0;
        for (int c : G.arrows_into(u)) row += to_double(ih.alpha[c]) * fiber[c];
        for (int c : G.arrows_from(u)) col += to_double(ih.alpha[G.inverse(c)]) * fiber[c];
        best = std::max({best, row, col});
    }
    return best;
}

/// Solves for the multiplicative unit from the structure constants and
/// verifies it; the normal-equations system is exactly determined when a
/// unit exists.
inline CVec solve_unit(const StarAlgebra& alg) {
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(alg.dim, alg.dim);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(alg.dim);
    for (int j = 0; j < alg.dim; ++j) {
        Eigen::MatrixXcd Rj = right_mult_basis_matrix(alg, j);
        K += Rj.adjoint() * Rj;
        rhs += Rj.adjoint() * Eigen::VectorXcd::Unit(alg.dim, j);
    }
    Eigen::VectorXcd e = K.ldlt().solve(rhs);
    CVec unit = from_eigen(e);
    for (int j = 0; j < alg.dim; ++j) {
        CVec lhs = alg.multiply(unit, alg.basis_element(j));
        CVec rhs2 = alg.multiply(alg.basis_element(j), unit);
        for (int k = 0; k < alg.dim; ++k) {
            double want = (k == j) ? 1.0 : 0.0;
            if (std::abs(lhs[k] - want) > 1e-9 || std::abs(rhs2[k] - want) > 1e-9)
                throw InternalError("algebra has no two-sided unit within tolerance");
        }
    }
    return unit;
}

}  // namespace gctwist
