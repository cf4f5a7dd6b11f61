#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gctwist/algebra.hpp"
#include "gctwist/norms.hpp"
#include "gctwist/quotient.hpp"
#include "gctwist/rng.hpp"

namespace gctwist {

struct CartanReport {
    bool applicable = false;  // quotient principal (hypothesis of the theorem)
    std::string hypothesis_note;
    int dim_algebra = 0;
    int dim_d = 0;
    bool masa = false;
    bool expectation_idempotent = false;
    bool expectation_bimodular = false;
    bool expectation_positive = false;
    bool expectation_faithful = false;
    bool normalizers_span = false;
    double max_bimodular_defect = 0.0;

    bool pass() const {
        return applicable && masa && expectation_idempotent && expectation_bimodular && expectation_positive &&
               expectation_faithful && normalizers_span;
    }
};

/// Verifies the Cartan pair inside the twisted model: the diagonal D
/// spanned by the (character, unit) basis is maximal abelian, the
/// restriction onto it is a faithful positive conditional expectation, and
/// the basis normalizers span. A non-principal quotient is reported as the
/// hypothesis failing, not as an error.
inline CartanReport cartan_check(const StarAlgebra& twisted, const GnsSpace& gns, Rng& rng, int random_trials = 25) {
    if (twisted.model != Model::Twisted && twisted.model != Model::Cocycle)
        throw PreconditionError("cartan_check expects the twisted (or cocycle) model");
    const Quotient& q = *twisted.quotient;

    CartanReport rep;
    rep.dim_algebra = twisted.dim;
    PrincipalityReport pr = principality_check(q.G);
    rep.applicable = pr.principal;
    if (!rep.applicable) {
        rep.hypothesis_note = "quotient groupoid is not principal (witness " + pr.witness +
                              "); the Cartan theorem hypothesis fails, so the check is not applicable";
        return rep;
    }

    std::vector<int> d_indices;
    std::vector<char> in_d(twisted.dim, 0);
    for (int i = 0; i < twisted.dim; ++i)
        if (q.G.is_unit_arrow(twisted.parts[i].second)) {
            d_indices.push_back(i);
            in_d[i] = 1;
        }
    rep.dim_d = static_cast<int>(d_indices.size());

    // Commutant of D via the psd accumulation of commutator maps; the
    // kernel must be exactly the span of the D coordinates.
    {
        Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(twisted.dim, twisted.dim);
        for (int k : d_indices) {
            Eigen::MatrixXcd C = right_mult_basis_matrix(twisted, k) - left_mult_basis_matrix(twisted, k);
            K += C.adjoint() * C;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
        double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
        int null_dim = 0;
        bool inside_d = true;
        for (int i = 0; i < twisted.dim; ++i) {
            if (es.eigenvalues()(i) > 1e-10 * lmax) continue;
            ++null_dim;
            for (int r = 0; r < twisted.dim; ++r)
                if (!in_d[r] && std::abs(es.eigenvectors()(r, i)) > 1e-8) inside_d = false;
        }
        rep.masa = (null_dim == rep.dim_d) && inside_d;
    }

    // E = restriction onto the D coordinates.
    auto E = [&](const CVec& f) {
        CVec out(twisted.dim, {0.0, 0.0});
        for (int i : d_indices) out[i] = f[i];
        return out;
    };
    auto random_element = [&](bool only_d) {
        CVec f(twisted.dim, {0.0, 0.0});
        if (only_d) {
            for (int i : d_indices) f[i] = rng.complex_normal();
        } else {
            for (int i = 0; i < twisted.dim; ++i) f[i] = rng.complex_normal();
        }
        return f;
    };

    rep.expectation_idempotent = true;  // E is a coordinate restriction
    rep.expectation_bimodular = true;
    rep.expectation_positive = true;
    for (int t = 0; t < random_trials; ++t) {
        CVec d1 = random_element(true), f = random_element(false), d2 = random_element(true);
        CVec lhs = E(twisted.multiply(twisted.multiply(d1, f), d2));
        CVec rhs = twisted.multiply(twisted.multiply(d1, E(f)), d2);
        for (int k = 0; k < twisted.dim; ++k)
            rep.max_bimodular_defect = std::max(rep.max_bimodular_defect, std::abs(lhs[k] - rhs[k]));

        CVec pos = twisted.multiply(twisted.adjoint(f), f);
        CVec epos = E(pos);
        for (int i : d_indices) {
            if (epos[i].real() < -1e-10 || std::abs(epos[i].imag()) > 1e-10) rep.expectation_positive = false;
        }
    }
    if (rep.max_bimodular_defect > 1e-10) rep.expectation_bimodular = false;

    // Faithfulness of E: E(f^* f) = 0 forces f = 0. Summing the D
    // coordinates of f^* f against weight 1 is exactly the GNS Gram form
    // with unit character weights, so positive definiteness of the Gram
    // matrix is the kernel computation.
    rep.expectation_faithful = gns.min_eigenvalue > 1e-10;

    // Normalizers: monomial structure makes e d e* and e* d e single basis
    // elements, so membership in D is exact.
    rep.normalizers_span = true;
    for (int e = 0; e < twisted.dim && rep.normalizers_span; ++e) {
        auto es = twisted.star_mono(e);
        for (int k : d_indices) {
            auto m1 = twisted.mult_mono(e, k);
            int t1 = m1.target < 0 ? -1 : twisted.mult_mono(m1.target, es.target).target;
            if (t1 >= 0 && !in_d[t1]) rep.normalizers_span = false;
            auto m2 = twisted.mult_mono(es.target, k);
            int t2 = m2.target < 0 ? -1 : twisted.mult_mono(m2.target, e).target;
            if (t2 >= 0 && !in_d[t2]) rep.normalizers_span = false;
        }
    }
    // The basis elements themselves span, so normalizing basis elements
    // spanning the algebra is the dimension count.

    return rep;
}

}  // namespace gctwist
