#include "intertwiner/models.hpp"

#include <cmath>

#include "intertwiner/matrix_core.hpp"

namespace intertwiner {

namespace {

void check_spin_params(const SpinModelParams& p) {
    if (p.d < 2) throw InputError("spin model: dimension must be >= 2");
    if (!(p.j > 0.0)) throw InputError("spin model: J must be positive");
    if (!(p.gamma >= 0.0)) throw InputError("spin model: gamma must be >= 0");
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace

SpinOperators spin_matrices(int d) {
    if (d < 2) throw InputError("spin_matrices: dimension must be >= 2");
    const double j = (d - 1) / 2.0;
    CMatrix sz = CMatrix::Zero(d, d);
    CMatrix sp = CMatrix::Zero(d, d);  // raising operator
    for (int i = 0; i < d; ++i) {
        const double m = j - i;
        sz(i, i) = m;
        if (i > 0) sp(i - 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const CMatrix sm = sp.adjoint();
    SpinOperators s;
    s.sx = (sp + sm) / 2.0;
    s.sy = (sp - sm) / Complex(0, 2);
    s.sz = sz;
    return s;
}

CMatrix rotation_x(const SpinOperators& s, double theta) {
    return expm(Complex(0, -theta) * s.sx);
}

CMatrix parity(int d) {
    CMatrix p = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) p(i, d - 1 - i) = 1.0;
    return p;
}

PtSpinModel build_pt_spin(const SpinModelParams& p) {
    check_spin_params(p);
    const SpinOperators s = spin_matrices(p.d);
    PtSpinModel model;
    model.h = p.j * s.sx + Complex(0, p.gamma) * s.sz;
    model.symmetry.cls = SymmetryClass::pt;
    model.symmetry.phi = 0.0;
    model.symmetry.linear_part = parity(p.d);
    return model;
}

SpectralData h3_reference_unbroken(double j, double theta) {
    if (!(j > 0.0)) throw InputError("h3_reference: J must be positive");
    if (!(theta >= 0.0 && theta < M_PI / 2.0))
        throw InputError("h3_reference_unbroken: theta must lie in [0, pi/2)");
    const double st = std::sin(theta);
    const Complex i(0, 1);

    SpectralData out;
    out.eigenvalues.resize(3);
    out.right = CMatrix(3, 3);
    // columns sorted by descending real part: +J cos, 0, -J cos
    out.eigenvalues << j * std::cos(theta), 0.0, -j * std::cos(theta);
    out.right.col(0) << std::exp(i * theta) / 2.0, std::sqrt(2.0) / 2.0, std::exp(-i * theta) / 2.0;
    const double n0 = std::sqrt(2.0 * (1.0 + st * st));
    out.right.col(1) << -1.0 / n0, std::sqrt(2.0) * i * st / n0, 1.0 / n0;
    out.right.col(2) << std::exp(-i * theta) / 2.0, -std::sqrt(2.0) / 2.0, std::exp(i * theta) / 2.0;

    out.left = out.right.conjugate();
    out.right_raw = out.right;
    out.overlaps.resize(3);
    for (int k = 0; k < 3; ++k) out.overlaps(k) = out.left.col(k).dot(out.right.col(k));
    out.vector_ok.assign(3, true);
    out.clusters = {{0}, {1}, {2}};
    out.cluster_defective.assign(3, false);
    return out;
}

SpectralData h3_reference_broken(double j, double beta) {
    if (!(j > 0.0)) throw InputError("h3_reference: J must be positive");
    if (!(beta > 0.0)) throw InputError("h3_reference_broken: beta must be positive");
    const double cb = std::cosh(beta);
    const Complex i(0, 1);

    SpectralData out;
    out.eigenvalues.resize(3);
    out.right = CMatrix(3, 3);
    // all real parts vanish; sorted by descending imaginary part
    out.eigenvalues << Complex(0, j * std::sinh(beta)), 0.0, Complex(0, -j * std::sinh(beta));
    const double np = std::sqrt(2.0 * (1.0 + std::cosh(2.0 * beta)));
    out.right.col(0) << -std::exp(beta) / np, std::sqrt(2.0) * i / np, std::exp(-beta) / np;
    const double n0 = std::sqrt(2.0 * (1.0 + cb * cb));
    out.right.col(1) << -1.0 / n0, std::sqrt(2.0) * i * cb / n0, 1.0 / n0;
    out.right.col(2) << -std::exp(-beta) / np, std::sqrt(2.0) * i / np, std::exp(beta) / np;

    out.left = out.right.conjugate();
    out.right_raw = out.right;
    out.overlaps.resize(3);
    for (int k = 0; k < 3; ++k) out.overlaps(k) = out.left.col(k).dot(out.right.col(k));
    out.vector_ok.assign(3, true);
    out.clusters = {{0}, {1}, {2}};
    out.cluster_defective.assign(3, false);
    return out;
}

HatanoNelsonModel build_hatano_nelson(const SpinModelParams& p) {
    check_spin_params(p);
    const SpinOperators s = spin_matrices(p.d);
    HatanoNelsonModel model;
    model.h = p.j * s.sx + Complex(0, p.gamma) * s.sy;
    model.rotation = rotation_x(s, -M_PI / 2.0);

    const CMatrix h_pt = p.j * s.sx + Complex(0, p.gamma) * s.sz;
    const CMatrix transported = model.rotation * h_pt * model.rotation.adjoint();
    if ((model.h - transported).norm() > 1e-12 * std::max(1.0, model.h.norm()))
        throw NumericalError("build_hatano_nelson: unitary equivalence identity failed");

    const CMatrix pd = parity(p.d);
    model.seed = model.rotation * pd * model.rotation.adjoint();
    model.symmetry.cls = SymmetryClass::pt;
    model.symmetry.phi = 0.0;
    model.symmetry.linear_part = model.rotation * pd * model.rotation.transpose();
    model.symmetry.equivalence = UnitaryEquivalence{model.rotation, pd};
    return model;
}

double CircuitParams::gamma0() const {
    return 1.0 / std::sqrt(1.0 - mu) + 1.0 / std::sqrt(1.0 + mu);
}

double CircuitParams::gamma_pt() const {
    return 1.0 / std::sqrt(1.0 - mu) - 1.0 / std::sqrt(1.0 + mu);
}

CircuitModel build_circuit(const CircuitParams& p) {
    if (!(p.mu >= 0.0 && p.mu < 1.0))
        throw InputError("build_circuit: mu must lie in [0, 1)");
    if (!std::isfinite(p.gamma)) throw InputError("build_circuit: gamma must be finite");

    const double g0 = p.gamma0();
    const double gpt = p.gamma_pt();
    const Complex i(0, 1);

    CMatrix h(4, 4);
    h << -2.0 * p.gamma, 0, g0, -gpt,
         0, 2.0 * p.gamma, -gpt, g0,
         -g0, gpt, 0, 0,
         gpt, -g0, 0, 0;
    h *= i;

    const CMatrix id2 = CMatrix::Identity(2, 2);
    const CMatrix tensor = -kron(pauli_y(), g0 * id2 - gpt * pauli_x()) -
                           i * p.gamma * kron(id2 + pauli_z(), pauli_z());
    if ((h - tensor).norm() > 1e-14 * std::max(1.0, h.norm()))
        throw NumericalError("build_circuit: explicit matrix disagrees with tensor form");

    CircuitModel model;
    model.h = h;
    model.seed = kron(id2, pauli_x());
    model.symmetry.cls = SymmetryClass::pt;
    model.symmetry.phi = 0.0;
    model.symmetry.linear_part = kron(pauli_z(), pauli_x());
    // U H U^+ is transpose-symmetric with seed 1 (x) sigma_x there
    CMatrix u_sym(2, 2);
    u_sym << std::polar(1.0, -M_PI / 4.0), 0, 0, std::polar(1.0, M_PI / 4.0);
    model.symmetry.equivalence = UnitaryEquivalence{kron(u_sym, id2), kron(id2, pauli_x())};
    return model;
}

DimerModel build_dimer(double j, double gamma) {
    if (!(j > 0.0)) throw InputError("build_dimer: J must be positive");
    if (!(gamma >= 0.0)) throw InputError("build_dimer: gamma must be >= 0");

    DimerModel model;
    model.h = (j * pauli_x() + Complex(0, gamma) * pauli_z()) / 2.0;

    SymmetryDescriptor pt;
    pt.cls = SymmetryClass::pt;
    pt.phi = 0.0;
    pt.linear_part = pauli_x();
    SymmetryDescriptor anti;
    anti.cls = SymmetryClass::anti_pt;
    anti.phi = M_PI;
    anti.linear_part = pauli_z();
    SymmetryDescriptor chiral;
    chiral.cls = SymmetryClass::chiral;
    chiral.linear_part = pauli_y();
    model.symmetries = {pt, anti, chiral};
    return model;
}

}  // namespace intertwiner
