#pragma once

#include <optional>
#include <vector>

#include "intertwiner/matrix_core.hpp"
#include "intertwiner/spectral.hpp"
#include "intertwiner/types.hpp"

namespace intertwiner {

// The operator equation a conserved eta satisfies.
//   intertwine(phi):  eta H = e^{i phi} H^+ eta   (phi = 0 is PT, phi = pi anti-PT)
//   anticommute:      eta H = -H eta
//   stroboscopic:     G^+ eta G = eta             (for one-period propagators)
struct Relation {
    enum class Kind { intertwine, anticommute, stroboscopic };
    Kind kind = Kind::intertwine;
    double phi = 0.0;

    static Relation intertwine(double phi = 0.0);
    static Relation anticommute() { return {Kind::anticommute, 0.0}; }
    static Relation stroboscopic() { return {Kind::stroboscopic, 0.0}; }
};

enum class Construction { spectral, recursive, nullspace };

struct IntertwinerSet {
    Relation relation;
    OperatorBasis etas;
    std::vector<double> residuals;
    Construction construction = Construction::nullspace;
    std::optional<std::vector<double>> coefficients;  // weights of a combined eta

    int size() const { return etas.size(); }
    int independent() const { return independent_count(etas.elements, etas.tolerance); }
};

// ||eta H - e^{i phi} H^+ eta||_F / (||eta||_F ||H||_F), or the anticommutator
// analog. Pure measurement; 0 when either factor vanishes.
double verify_relation(const CMatrix& eta, const CMatrix& h, const Relation& rel);

// Conserved operators assembled from biorthogonal eigendata: projectors onto
// left eigenvectors for self-paired eigenvalues, Hermitian pair combinations
// for conjugate pairs, the full dyad block for diabolic clusters, and
// antidiagonal chain sums for exceptional ones.
IntertwinerSet eta_from_spectrum(const CMatrix& h, const SpectralData& spec,
                                 const DegeneracyReport& report,
                                 const std::vector<JordanChain>& chains = {},
                                 double tol = default_tol);

// Brute-force route: nullspace of the n^2 x n^2 operator of the relation,
// Hermitian-split and orthonormalized. This is the oracle the other two
// construction routes are validated against.
IntertwinerSet solve_relation(const CMatrix& h, const Relation& rel, double tol = default_tol);

// First intertwiner: the linear part L of the antilinear symmetry when H is
// transpose-symmetric, its registered unitary transport otherwise, or the
// leading solve_relation element as a last resort.
CMatrix seed_eta(const CMatrix& h, const SymmetryDescriptor& sym, double tol = default_tol);

// Iterates eta_{k+1} = e^{i phi/2} eta_k H (eta_k H for the anticommutant),
// Hermitian-splitting any non-Hermitian product, until the independent count
// stops growing.
IntertwinerSet recursive_tower(const CMatrix& eta1, const CMatrix& h, const Relation& rel,
                               double tol = default_tol);

// Relation whose solutions exist for a spectrum with the symmetry `sym`.
// The classifier phase describes the closure eps -> e^{-i phi} eps^*, which
// matches the relation eta H = e^{-i phi} H^+ eta; hence the phase flip.
Relation relation_for(const SymmetryDescriptor& sym);

// sum_k weights[k] * eta_k, recorded with its coefficients and verified
// against h.
IntertwinerSet combine(const IntertwinerSet& set, const std::vector<double>& weights,
                       const CMatrix& h);

}  // namespace intertwiner
