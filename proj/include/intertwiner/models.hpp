#pragma once

#include <vector>

#include "intertwiner/spectral.hpp"
#include "intertwiner/types.hpp"

namespace intertwiner {

// Gain-loss spin model parameters: H = J S_x + i gamma S_z in D dimensions.
struct SpinModelParams {
    int d = 3;
    double j = 1.0;
    double gamma = 0.0;
};

struct SpinOperators {
    CMatrix sx, sy, sz;
};

// Angular-momentum matrices for spin (d-1)/2, ladder-built.
SpinOperators spin_matrices(int d);

// exp(-i theta S_x).
CMatrix rotation_x(const SpinOperators& s, double theta);

// antidiag(1, ..., 1).
CMatrix parity(int d);

struct PtSpinModel {
    CMatrix h;
    SymmetryDescriptor symmetry;  // PT with linear part parity(d)
};
PtSpinModel build_pt_spin(const SpinModelParams& p);

// Closed-form eigendata of the D=3 model, for cross-validation of the
// numerical decomposition. Unbroken phase: gamma = J sin(theta); broken:
// gamma = J cosh(beta). Left vectors are conjugates of the right ones.
SpectralData h3_reference_unbroken(double j, double theta);
SpectralData h3_reference_broken(double j, double beta);

struct HatanoNelsonModel {
    CMatrix h;         // J S_x + i gamma S_y
    CMatrix rotation;  // R_x(-pi/2) with h = rotation * h_pt * rotation^+
    CMatrix seed;      // rotation * parity * rotation^+
    SymmetryDescriptor symmetry;
};
HatanoNelsonModel build_hatano_nelson(const SpinModelParams& p);

// Mutually-coupled LC dimer. gamma0/gamma_pt are the two EP locations in
// units of omega_0/2; the matrix itself is returned in those units.
struct CircuitParams {
    double gamma = 0.0;
    double mu = 0.5;
    double omega0 = 1.0;

    double gamma0() const;
    double gamma_pt() const;
};

struct CircuitModel {
    CMatrix h;
    CMatrix seed;  // 1 (x) sigma_x
    SymmetryDescriptor symmetry;
};
CircuitModel build_circuit(const CircuitParams& p);

// H2 = (J sigma_x + i gamma sigma_z) / 2 with its PT, anti-PT, and chiral
// descriptors.
struct DimerModel {
    CMatrix h;
    std::vector<SymmetryDescriptor> symmetries;
};
DimerModel build_dimer(double j, double gamma);

}  // namespace intertwiner
