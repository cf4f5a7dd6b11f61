#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "gctwist/algebra.hpp"
#include "gctwist/norms.hpp"
#include "gctwist/rng.hpp"

namespace gctwist {

/// Orthonormal basis of the center: kernel of the stacked commutator maps
/// x -> x b_j - b_j x, computed through the positive semidefinite
/// accumulation K = sum_j C_j^H C_j so memory stays O(dim^2).
inline Eigen::MatrixXcd center_basis(const StarAlgebra& alg) {
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(alg.dim, alg.dim);
    for (int j = 0; j < alg.dim; ++j) {
        Eigen::MatrixXcd C = right_mult_basis_matrix(alg, j) - left_mult_basis_matrix(alg, j);
        K += C.adjoint() * C;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
    double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
    std::vector<int> keep;
    for (int i = 0; i < alg.dim; ++i)
        if (es.eigenvalues()(i) <= 1e-10 * lmax) keep.push_back(i);
    Eigen::MatrixXcd Z(alg.dim, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) Z.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    return Z;
}

struct BlockReport {
    std::vector<int> blocks;  // sorted ascending, sum of squares = dim
    int attempts_used = 0;
    bool ok = false;
    std::string failure;
};

/// Numerical Wedderburn decomposition: pick a generic self-adjoint central
/// element, cluster its GNS eigenvalues (gap tolerance 1e-7), realize the
/// minimal central projections by Lagrange interpolation inside the
/// algebra, and read the block dimension off the rank of p A p. Ambiguous
/// clusterings retry with a fresh central element, up to 5 attempts.
inline BlockReport decompose_blocks(const StarAlgebra& alg, const GnsSpace& gns, Rng& rng,
                                    double gap_tol = 1e-7, int max_attempts = 5) {
    BlockReport rep;
    Eigen::MatrixXcd Z = center_basis(alg);
    const int zdim = static_cast<int>(Z.cols());
    CVec unit = solve_unit(alg);

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        rep.attempts_used = attempt;
        Eigen::VectorXcd coeff(zdim);
        for (int k = 0; k < zdim; ++k) coeff[k] = rng.complex_normal();
        CVec w = from_eigen(Z * coeff);
        CVec z = alg.adjoint(w);
        for (int i = 0; i < alg.dim; ++i) z[i] += w[i];

        Eigen::MatrixXcd T = gns.to_gns(left_mult_matrix(alg, z));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
        Eigen::VectorXd ev = es.eigenvalues();

        std::vector<std::pair<double, double>> clusters;  // (mean, count)
        double scale = std::max(1.0, std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))));
        {
            double start = ev(0), sum = ev(0);
            int count = 1;
            bool ambiguous = false;
            for (int i = 1; i < ev.size(); ++i) {
                double gap = ev(i) - ev(i - 1);
                if (gap > gap_tol * scale) {
                    clusters.emplace_back(sum / count, count);
                    sum = 0;
                    count = 0;
                } else if (gap > 1e-9 * scale) {
                    ambiguous = true;  // neither clearly equal nor clearly split
                }
                sum += ev(i);
                ++count;
                (void)start;
            }
            clusters.emplace_back(sum / count, count);
            if (ambiguous || static_cast<int>(clusters.size()) != zdim) continue;
        }

        // p_i = prod_{j != i} (z - m_j) / (m_i - m_j), evaluated in the algebra.
        std::vector<int> dims;
        bool good = true;
        for (std::size_t i = 0; i < clusters.size() && good; ++i) {
            CVec p = unit;
            for (std::size_t j = 0; j < clusters.size(); ++j) {
                if (j == i) continue;
                CVec shifted = z;
                for (int k = 0; k < alg.dim; ++k) shifted[k] -= clusters[j].first * unit[k];
                p = alg.multiply(p, shifted);
                double denom = clusters[i].first - clusters[j].first;
                for (int k = 0; k < alg.dim; ++k) p[k] /= denom;
            }
            // idempotent and self-adjoint, or the clustering was bad
            CVec pp = alg.multiply(p, p);
            CVec ps = alg.adjoint(p);
            for (int k = 0; k < alg.dim; ++k)
                if (std::abs(pp[k] - p[k]) > 1e-6 || std::abs(ps[k] - p[k]) > 1e-6) {
                    good = false;
                    break;
                }
            if (!good) break;

            Eigen::MatrixXcd corner(alg.dim, alg.dim);
            for (int j = 0; j < alg.dim; ++j) {
                CVec col = alg.multiply(alg.multiply(p, alg.basis_element(j)), p);
                corner.col(j) = to_eigen(col);
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(corner);
            qr.setThreshold(1e-7);
            int rank = static_cast<int>(qr.rank());
            int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rank))));
            if (d * d != rank) {
                good = false;
                break;
            }
            dims.push_back(d);
        }
        if (!good) continue;

        long total = 0;
        for (int d : dims) total += static_cast<long>(d) * d;
        if (total != alg.dim) continue;

        std::sort(dims.begin(), dims.end());
        rep.blocks = dims;
        rep.ok = true;
        return rep;
    }

    rep.failure = "eigenvalue clustering stayed ambiguous after " + std::to_string(max_attempts) + " attempts";
    return rep;
}

}  // namespace gctwist
