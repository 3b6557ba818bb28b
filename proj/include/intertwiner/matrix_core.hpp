#pragma once

#include <functional>
#include <vector>

#include "intertwiner/types.hpp"

namespace intertwiner {

// A list of Hermitian matrices that are linearly independent over the reals
// (as vectors of length n^2), certified at `tolerance`.
struct OperatorBasis {
    std::vector<CMatrix> elements;
    double tolerance = default_tol;

    int size() const { return static_cast<int>(elements.size()); }
    bool empty() const { return elements.empty(); }
};

// e^M. Relative accuracy better than 1e-12 for ||M|| <= 100.
CMatrix expm(const CMatrix& m);

// Orthonormal basis of {v : ||Mv|| <= tol*||M||*||v||}, via SVD. Empty when M
// has full rank at tol. Vectors are phase-gauged (see gauge_phase).
std::vector<CVector> nullspace_basis(const CMatrix& m, double tol = default_tol);

// Splits each op M into (M+M^+)/2 and (M-M^+)/(2i), drops parts with norm
// below tol*||M||_F, and filters the rest down to an independent set. Kept
// elements are returned as produced by the split, not rescaled.
OperatorBasis hermitian_split(const std::vector<CMatrix>& ops, double tol = default_tol);

// Rank of the Gram matrix of pairwise Frobenius inner products, treating
// singular values below tol*(largest) as zero. Real-linear independence.
int independent_count(const std::vector<CMatrix>& ops, double tol = default_tol);

// Hermitian solutions X of the real-linear equation map(X) = 0, solved over
// the n^2-dimensional real coordinate basis of Hermitian matrices. Singular
// values below tol*max(sigma_max, ref_scale) count as zero; ref_scale guards
// equations that degenerate to zero (e.g. scalar H). Returns a Frobenius-
// orthonormal basis.
std::vector<CMatrix> hermitian_kernel(const std::function<CMatrix(const CMatrix&)>& map, int n,
                                      double tol, double ref_scale);

// --- shared small helpers ---

// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Multiplies v by a phase so its first entry of largest modulus is real and
// positive. No-op for the zero vector.
void gauge_phase(CVector& v);

// Re tr(a^+ b); the real Frobenius inner product.
double real_inner(const CMatrix& a, const CMatrix& b);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

// Orthonormalizes `ops` under the real Frobenius inner product (modified
// Gram-Schmidt); near-dependent entries are dropped at tol.
std::vector<CMatrix> frobenius_orthonormalize(const std::vector<CMatrix>& ops,
                                              double tol = default_tol);

// ||m - sum_q <q,m> q|| / ||m|| for an orthonormal basis q; 0 for m = 0.
double span_residual(const std::vector<CMatrix>& orthonormal, const CMatrix& m);

}  // namespace intertwiner
