#include "intertwiner/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "intertwiner/matrix_core.hpp"

namespace intertwiner {

namespace {

void require_square_finite(const CMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InputError(std::string(who) + ": matrix must be square and non-empty");
    if (!m.allFinite())
        throw InputError(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace

StateVector::StateVector(CVector v) : psi(std::move(v)) {
    if (psi.size() == 0) throw InputError("StateVector: empty vector");
    if (!psi.allFinite()) throw InputError("StateVector: non-finite entries");
    if (!(psi.squaredNorm() > 0.0)) throw InputError("StateVector: zero norm");
}

FloquetDrive::FloquetDrive(std::vector<FloquetSegment> segs) : segments(std::move(segs)) {
    if (segments.empty()) throw InputError("FloquetDrive: no segments");
    const Eigen::Index n = segments.front().h.rows();
    for (const auto& s : segments) {
        require_square_finite(s.h, "FloquetDrive");
        if (s.h.rows() != n) throw InputError("FloquetDrive: segment dimensions differ");
        if (!(s.tau > 0.0) || !std::isfinite(s.tau))
            throw InputError("FloquetDrive: segment durations must be positive");
    }
}

double FloquetDrive::period() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.tau;
    return t;
}

CVector evolve(const CMatrix& h, const StateVector& psi0, double t) {
    require_square_finite(h, "evolve");
    if (h.rows() != psi0.psi.size()) throw InputError("evolve: dimension mismatch");
    if (!std::isfinite(t)) throw InputError("evolve: time must be finite");
    const CVector out = expm(Complex(0, -t) * h) * psi0.psi;
    if (!out.allFinite()) throw NumericalError("evolve: state overflowed");
    return out;
}

DriftReport drift_report(const CMatrix& h, const IntertwinerSet& etas, const StateVector& psi0,
                         double t_max, int steps, double gamma_shift) {
    require_square_finite(h, "drift_report");
    if (steps < 2) throw InputError("drift_report: need at least 2 steps");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("drift_report: bad t_max");
    if (h.rows() != psi0.psi.size()) throw InputError("drift_report: dimension mismatch");
    for (const auto& e : etas.etas.elements)
        if (e.rows() != h.rows()) throw InputError("drift_report: eta dimension mismatch");

    const int m = etas.size();
    const CMatrix h_eff = h - Complex(0, gamma_shift) * CMatrix::Identity(h.rows(), h.cols());

    DriftReport rep;
    rep.gamma_shift = gamma_shift;
    rep.times.resize(steps);
    rep.norm_series.resize(steps);
    rep.eta_series.assign(m, std::vector<double>(steps));

    for (int k = 0; k < steps; ++k) {
        const double t = t_max * double(k) / double(steps - 1);
        rep.times[k] = t;
        // a fresh exponential per grid point; iterating a step propagator
        // compounds roundoff in the growing modes
        const CVector psi = expm(Complex(0, -t) * h_eff) * psi0.psi;
        if (!psi.allFinite()) throw NumericalError("drift_report: state overflowed");
        rep.norm_series[k] = psi.squaredNorm();
        const double comp = std::exp(2.0 * gamma_shift * t);
        if (!std::isfinite(comp)) throw NumericalError("drift_report: shift compensation overflowed");
        for (int e = 0; e < m; ++e) {
            const Complex val = psi.dot(etas.etas.elements[e] * psi);  // <psi|eta|psi>
            const double scale =
                std::max(std::abs(val.real()), etas.etas.elements[e].norm() * psi.squaredNorm());
            if (std::abs(val.imag()) > 1e-12 * std::max(scale, 1e-300)) {
                rep.imag_residue_flagged = true;
                rep.worst_imag_residue = std::max(rep.worst_imag_residue, std::abs(val.imag()));
            }
            rep.eta_series[e][k] = comp * val.real();
        }
    }

    rep.max_relative_drift.resize(m);
    for (int e = 0; e < m; ++e) {
        const double s0 = rep.eta_series[e].front();
        // series that start near zero are measured against the natural scale
        // of the observable instead
        const double guard = etas.etas.elements[e].norm() * psi0.norm();
        const double den = std::max(std::abs(s0), std::max(guard, 1e-300));
        double worst = 0.0;
        for (double s : rep.eta_series[e]) worst = std::max(worst, std::abs(s - s0));
        rep.max_relative_drift[e] = worst / den;
    }
    return rep;
}

std::vector<double> slow_mode_rates(const CMatrix& h_passive, double tol) {
    require_square_finite(h_passive, "slow_mode_rates");
    Eigen::ComplexEigenSolver<CMatrix> es(h_passive, false);
    if (es.info() != Eigen::Success) throw NumericalError("slow_mode_rates: eigensolver failed");
    const double scale = std::max(1.0, h_passive.norm());
    std::vector<double> rates;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double im = es.eigenvalues()(i).imag();
        if (im > tol * scale)
            throw InputError("slow_mode_rates: matrix has an amplifying mode (Im eps > tol)");
        rates.push_back(-2.0 * im);
    }
    std::sort(rates.begin(), rates.end());
    return rates;
}

CMatrix floquet_propagator(const FloquetDrive& drive) {
    CMatrix g = CMatrix::Identity(drive.dim(), drive.dim());
    for (const auto& s : drive.segments) g = expm(Complex(0, -s.tau) * s.h) * g;
    if (!g.allFinite()) throw NumericalError("floquet_propagator: overflow");
    return g;
}

CMatrix micromotion(const FloquetDrive& drive, double t) {
    const double period = drive.period();
    if (!(t >= -1e-12 && t <= period * (1.0 + 1e-12)))
        throw InputError("micromotion: t must lie in [0, T]");
    t = std::clamp(t, 0.0, period);

    CMatrix k = CMatrix::Identity(drive.dim(), drive.dim());
    double consumed = 0.0;
    for (const auto& s : drive.segments) {
        if (t >= consumed + s.tau) {
            k = expm(Complex(0, -s.tau) * s.h) * k;
            consumed += s.tau;
        } else {
            const double partial = t - consumed;
            if (partial > 0.0) k = expm(Complex(0, -partial) * s.h) * k;
            break;
        }
    }
    return k;
}

double stroboscopic_residual(const CMatrix& eta, const CMatrix& g) {
    require_square_finite(eta, "stroboscopic_residual");
    require_square_finite(g, "stroboscopic_residual");
    if (eta.rows() != g.rows()) throw InputError("stroboscopic_residual: shape mismatch");
    const double en = eta.norm();
    if (en == 0.0) return 0.0;
    const double g2 = g.operatorNorm();
    return (g.adjoint() * eta * g - eta).norm() / (en * std::max(1.0, g2 * g2));
}

IntertwinerSet stroboscopic_etas(const CMatrix& g, double tol) {
    require_square_finite(g, "stroboscopic_etas");
    const int n = static_cast<int>(g.rows());

    Eigen::JacobiSVD<CMatrix> svd(g);
    if (svd.singularValues()(n - 1) <= tol * svd.singularValues()(0))
        throw InputError("stroboscopic_etas: propagator is singular at tol");

    const double g2 = g.operatorNorm();
    IntertwinerSet out;
    out.relation = Relation::stroboscopic();
    out.construction = Construction::nullspace;
    out.etas.tolerance = tol;
    out.etas.elements = hermitian_kernel(
        [&g](const CMatrix& x) { return CMatrix(g.adjoint() * x * g - x); }, n, tol,
        1.0 + g2 * g2);
    for (const auto& e : out.etas.elements) out.residuals.push_back(stroboscopic_residual(e, g));
    return out;
}

IntertwinerSet stroboscopic_tower(const CMatrix& eta1, const CMatrix& g, double tol) {
    require_square_finite(eta1, "stroboscopic_tower");
    require_square_finite(g, "stroboscopic_tower");
    if (eta1.rows() != g.rows()) throw InputError("stroboscopic_tower: shape mismatch");
    if (stroboscopic_residual(eta1, g) > std::max(tol, 1e-12))
        throw NoSymmetryError("stroboscopic_tower: seed violates the fixed-point relation");

    const int n = static_cast<int>(g.rows());
    IntertwinerSet out;
    out.relation = Relation::stroboscopic();
    out.construction = Construction::recursive;
    out.etas.tolerance = tol;
    out.etas.elements.push_back(eta1);

    CMatrix raw = eta1;
    for (int step = 0; step < 2 * n + 2; ++step) {
        raw = raw * g;
        std::vector<CMatrix> candidates;
        if ((raw - raw.adjoint()).norm() <= std::max(tol, 1e-12) * raw.norm())
            candidates.push_back((raw + raw.adjoint()) / 2.0);
        else
            candidates = hermitian_split({raw}, tol).elements;

        bool grew = false;
        for (const CMatrix& c : candidates) {
            if (stroboscopic_residual(c, g) > 1e-6) continue;
            std::vector<CMatrix> tentative = out.etas.elements;
            tentative.push_back(c);
            if (independent_count(tentative, tol) > static_cast<int>(out.etas.elements.size())) {
                out.etas.elements.push_back(c);
                grew = true;
            }
        }
        if (!grew) break;
    }

    for (const auto& e : out.etas.elements) out.residuals.push_back(stroboscopic_residual(e, g));
    return out;
}

std::string drift_csv(const DriftReport& report) {
    std::string out = "t,norm";
    for (size_t e = 0; e < report.eta_series.size(); ++e)
        out += ",eta_" + std::to_string(e + 1);
    out += "\n";
    char buf[64];
    for (size_t k = 0; k < report.times.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", report.times[k]);
        out += buf;
        std::snprintf(buf, sizeof(buf), ",%.17g", report.norm_series[k]);
        out += buf;
        for (const auto& series : report.eta_series) {
            std::snprintf(buf, sizeof(buf), ",%.17g", series[k]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace intertwiner
