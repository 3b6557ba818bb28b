#pragma once

#include <string>
#include <vector>

#include "intertwiner/intertwine.hpp"
#include "intertwiner/types.hpp"

namespace intertwiner {

struct StateVector {
    CVector psi;

    explicit StateVector(CVector v);
    // <psi|psi>
    double norm() const { return psi.squaredNorm(); }
    int dim() const { return static_cast<int>(psi.size()); }
};

struct FloquetSegment {
    CMatrix h;
    double tau = 0.0;
};

// Ordered piecewise-constant drive; the first segment acts first.
struct FloquetDrive {
    std::vector<FloquetSegment> segments;

    explicit FloquetDrive(std::vector<FloquetSegment> segs);
    double period() const;
    int dim() const { return static_cast<int>(segments.front().h.rows()); }
};

struct DriftReport {
    std::vector<double> times;
    std::vector<double> norm_series;                // <psi(t)|psi(t)>, raw
    std::vector<std::vector<double>> eta_series;    // [eta][time], e^{2 Gamma t} compensated
    std::vector<double> max_relative_drift;         // per eta
    double gamma_shift = 0.0;
    bool imag_residue_flagged = false;  // an expectation had a non-negligible imaginary part
    double worst_imag_residue = 0.0;
};

// exp(-i H t) psi0; no normalization is applied (norm growth is signal).
CVector evolve(const CMatrix& h, const StateVector& psi0, double t);

// Evolves under H - i Gamma 1 on a uniform grid over [0, t_max] and records
// the raw state norm plus e^{2 Gamma t} <psi|eta|psi> for every eta.
DriftReport drift_report(const CMatrix& h, const IntertwinerSet& etas, const StateVector& psi0,
                         double t_max, int steps, double gamma_shift = 0.0);

// Intensity decay rates -2 Im(eps_k), ascending. Requires Im(eps) <= tol.
std::vector<double> slow_mode_rates(const CMatrix& h_passive, double tol = default_tol);

// One-period propagator; the last segment is composed on the left.
CMatrix floquet_propagator(const FloquetDrive& drive);

// K(t): full segments before t, then the partial segment containing t.
CMatrix micromotion(const FloquetDrive& drive, double t);

// Hermitian fixed points of eta -> G^+ eta G, via the nullspace of the
// vectorized map minus identity. Empty set is a valid result.
IntertwinerSet stroboscopic_etas(const CMatrix& g, double tol = default_tol);

// eta_{k+1} = eta_k G tower with Hermitian splitting per step; members are
// kept only if they satisfy the fixed-point equation.
IntertwinerSet stroboscopic_tower(const CMatrix& eta1, const CMatrix& g, double tol = default_tol);

// ||G^+ eta G - eta|| / (||eta|| max(1, ||G||_2^2)).
double stroboscopic_residual(const CMatrix& eta, const CMatrix& g);

// CSV with header t,norm,eta_1,...,eta_m and 17 significant digits.
std::string drift_csv(const DriftReport& report);

}  // namespace intertwiner
