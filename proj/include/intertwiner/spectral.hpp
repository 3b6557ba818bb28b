#pragma once

#include <optional>
#include <vector>

#include "intertwiner/matrix_core.hpp"
#include "intertwiner/types.hpp"

namespace intertwiner {

// Biorthogonal eigendata. Columns of `right`/`left` pair with `eigenvalues`;
// both are Dirac-normalized (unit Euclidean norm). For a defective cluster
// only the geometric eigenspace carries vectors and the remaining columns of
// that cluster are zero with vector_ok=false.
struct SpectralData {
    CVector eigenvalues;
    CMatrix right;
    CMatrix left;
    CVector overlaps;  // <L_k|R_k>
    std::vector<bool> vector_ok;
    std::vector<std::vector<int>> clusters;  // index groups, contiguous
    std::vector<bool> cluster_defective;
    CMatrix right_raw;  // unprocessed solver eigenvectors, one per eigenvalue
    bool diagonalizable = true;

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

enum class DegeneracyKind { nondegenerate, diabolic, exceptional };

struct DegeneracyCluster {
    Complex value;  // cluster mean
    int algebraic = 1;
    int geometric = 1;
    DegeneracyKind kind = DegeneracyKind::nondegenerate;
    int ep_order = 1;  // largest Jordan block; 1 unless exceptional
    std::vector<int> indices;
};

struct DegeneracyReport {
    std::vector<DegeneracyCluster> clusters;
};

// Generalized eigenvectors at lambda, ordered by rank:
//   (H - lambda) right[m+1] = right[m],   (H^+ - lambda^*) left[m+1] = left[m].
struct JordanChain {
    Complex eigenvalue;
    std::vector<CVector> right;
    std::vector<CVector> left;

    int order() const { return static_cast<int>(right.size()); }
};

enum class SymmetryClass { pt, anti_pt, anyonic, chiral, none };

// Registered unitary equivalence h = u * h_sym * u^+ whose symmetric frame
// has the known seed `seed_base`.
struct UnitaryEquivalence {
    CMatrix u;
    CMatrix seed_base;
};

// A = L * K with K complex conjugation. `phi` parametrizes the spectral
// closure eps -> e^{-i phi} eps^* (0 for PT, pi for anti-PT).
struct SymmetryDescriptor {
    SymmetryClass cls = SymmetryClass::none;
    double phi = 0.0;
    std::optional<CMatrix> linear_part;
    std::optional<UnitaryEquivalence> equivalence;
};

// Eigenvalues plus Dirac-normalized right/left eigenvectors. Within a
// diabolic cluster the right vectors are orthonormal and the left ones
// biorthogonal to them. Defective clusters are flagged and expose only the
// geometric eigenspace.
SpectralData eig_biorthogonal(const CMatrix& h, double tol = default_tol);

// Merges eigenvalues into clusters and labels each nondegenerate, diabolic,
// or exceptional. cluster_tol < 0 selects the automatic tolerance (1e-8
// floor plus the defectiveness-aware window; see default_cluster_tol).
DegeneracyReport classify_degeneracies(const CMatrix& h, const SpectralData& spec,
                                       double cluster_tol = -1.0);

// Plain proximity tolerance used for eigenvalue clustering: 1e-8*max(1,||H||).
double default_cluster_tol(const CMatrix& h);

JordanChain jordan_chain(const CMatrix& h, Complex lambda, double tol = default_tol);

// Every symmetry class whose spectral closure test passes at tol. Multiple
// descriptors may be returned; empty means no symmetry detected.
std::vector<SymmetryDescriptor> spectrum_symmetry(const std::vector<Complex>& eigs,
                                                  double tol = default_tol);

const char* to_string(SymmetryClass c);
const char* to_string(DegeneracyKind k);

}  // namespace intertwiner
