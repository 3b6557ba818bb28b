#include "intertwiner/intertwine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace intertwiner {

namespace {

void require_square_finite(const CMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InputError(std::string(who) + ": matrix must be square and non-empty");
    if (!m.allFinite())
        throw InputError(std::string(who) + ": matrix has non-finite entries");
}

double spectrum_scale(const DegeneracyReport& report) {
    double s = 1.0;
    for (const auto& c : report.clusters) s = std::max(s, std::abs(c.value));
    return s;
}

const JordanChain* find_chain(const std::vector<JordanChain>& chains, Complex value,
                              double match_tol) {
    const JordanChain* best = nullptr;
    double bd = match_tol;
    for (const auto& ch : chains) {
        const double d = std::abs(ch.eigenvalue - value);
        if (d <= bd) {
            bd = d;
            best = &ch;
        }
    }
    return best;
}

CMatrix hermitize(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

}  // namespace

Relation Relation::intertwine(double phi) {
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi < 0.0) phi += 2.0 * M_PI;
    return {Kind::intertwine, phi};
}

double verify_relation(const CMatrix& eta, const CMatrix& h, const Relation& rel) {
    require_square_finite(eta, "verify_relation");
    require_square_finite(h, "verify_relation");
    if (eta.rows() != h.rows()) throw InputError("verify_relation: shape mismatch");
    if (rel.kind == Relation::Kind::stroboscopic)
        throw InputError("verify_relation: use stroboscopic_residual for propagator relations");

    const double den = eta.norm() * h.norm();
    if (den == 0.0) return 0.0;
    CMatrix r;
    if (rel.kind == Relation::Kind::intertwine)
        r = eta * h - std::polar(1.0, rel.phi) * (h.adjoint() * eta);
    else
        r = eta * h + h * eta;
    return r.norm() / den;
}

IntertwinerSet eta_from_spectrum(const CMatrix& h, const SpectralData& spec,
                                 const DegeneracyReport& report,
                                 const std::vector<JordanChain>& chains, double tol) {
    require_square_finite(h, "eta_from_spectrum");
    if (spec.dim() != h.rows()) throw InputError("eta_from_spectrum: dimension mismatch");

    const int nc = static_cast<int>(report.clusters.size());
    const double pair_tol = std::max(100.0 * tol, 1e-8) * spectrum_scale(report);

    // conjugation pairing between clusters
    std::vector<int> partner(nc, -1);
    for (int i = 0; i < nc; ++i) {
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < nc; ++j) {
            const double d = std::abs(report.clusters[j].value - std::conj(report.clusters[i].value));
            if (d < bd) {
                bd = d;
                partner[i] = j;
            }
        }
        if (bd > pair_tol)
            throw NoSymmetryError(
                "eta_from_spectrum: spectrum is not closed under complex conjugation");
    }
    for (int i = 0; i < nc; ++i) {
        if (partner[partner[i]] != i ||
            report.clusters[i].algebraic != report.clusters[partner[i]].algebraic)
            throw NoSymmetryError("eta_from_spectrum: conjugate multiplicities do not match");
    }

    auto cluster_lefts = [&](const DegeneracyCluster& c) {
        std::vector<CVector> lefts;
        for (int idx : c.indices) {
            if (!spec.vector_ok[idx])
                throw InputError("eta_from_spectrum: cluster is missing eigenvector data");
            lefts.push_back(spec.left.col(idx));
        }
        return lefts;
    };

    IntertwinerSet out;
    out.relation = Relation::intertwine(0.0);
    out.construction = Construction::spectral;
    out.etas.tolerance = tol;
    auto& elems = out.etas.elements;

    std::vector<bool> done(nc, false);
    for (int ci = 0; ci < nc; ++ci) {
        if (done[ci]) continue;
        const int cj = partner[ci];
        done[ci] = done[cj] = true;
        const bool self = ci == cj;
        const auto& a = report.clusters[ci];
        const auto& b = report.clusters[cj];

        if (a.kind == DegeneracyKind::exceptional || b.kind == DegeneracyKind::exceptional) {
            const JordanChain* ca = find_chain(chains, a.value, pair_tol);
            const JordanChain* cb = self ? ca : find_chain(chains, b.value, pair_tol);
            if (ca == nullptr || cb == nullptr)
                throw InputError("eta_from_spectrum: missing Jordan chain for exceptional cluster");
            if (ca->order() != cb->order())
                throw NumericalError("eta_from_spectrum: conjugate chain orders differ");
            const int order = ca->order();
            for (int s = 2; s <= order + 1; ++s) {
                CMatrix d = CMatrix::Zero(h.rows(), h.cols());
                for (int p = 1; p <= order; ++p) {
                    const int q = s - p;
                    if (q < 1 || q > order) continue;
                    d += ca->left[p - 1] * cb->left[q - 1].adjoint();
                }
                if (self) {
                    elems.push_back(hermitize(d));
                } else {
                    elems.push_back(hermitize(d));
                    elems.push_back(Complex(0, 1) * (d - d.adjoint()) / 2.0);
                }
            }
        } else {
            const auto la = cluster_lefts(a);
            if (self) {
                const int m = static_cast<int>(la.size());
                for (int p = 0; p < m; ++p) elems.push_back(hermitize(la[p] * la[p].adjoint()));
                for (int p = 0; p < m; ++p) {
                    for (int q = p + 1; q < m; ++q) {
                        const CMatrix x = la[p] * la[q].adjoint();
                        elems.push_back((x + x.adjoint()) / 2.0);
                        elems.push_back(Complex(0, 1) * (x - x.adjoint()) / 2.0);
                    }
                }
            } else {
                const auto lb = cluster_lefts(b);
                for (const auto& lp : la) {
                    for (const auto& lq : lb) {
                        const CMatrix x = lp * lq.adjoint();
                        elems.push_back((x + x.adjoint()) / 2.0);
                        elems.push_back(Complex(0, 1) * (x - x.adjoint()) / 2.0);
                    }
                }
            }
        }
    }

    out.residuals.reserve(elems.size());
    for (const auto& e : elems) out.residuals.push_back(verify_relation(e, h, out.relation));
    return out;
}

IntertwinerSet solve_relation(const CMatrix& h, const Relation& rel, double tol) {
    require_square_finite(h, "solve_relation");
    if (rel.kind == Relation::Kind::stroboscopic)
        throw InputError("solve_relation: use stroboscopic_etas for propagator relations");
    const int n = static_cast<int>(h.rows());

    // the n^2-unknown linear system, restricted to Hermitian eta so that the
    // anticommutant case (whose solution space is not adjoint-closed) is
    // handled exactly as well
    std::function<CMatrix(const CMatrix&)> map;
    if (rel.kind == Relation::Kind::intertwine) {
        const Complex phase = std::polar(1.0, rel.phi);
        map = [&h, phase](const CMatrix& x) { return CMatrix(x * h - phase * (h.adjoint() * x)); };
    } else {
        map = [&h](const CMatrix& x) { return CMatrix(x * h + h * x); };
    }

    IntertwinerSet out;
    out.relation = rel;
    out.construction = Construction::nullspace;
    out.etas.tolerance = tol;
    out.etas.elements = hermitian_kernel(map, n, tol, 2.0 * h.norm());
    for (const auto& e : out.etas.elements) out.residuals.push_back(verify_relation(e, h, rel));
    return out;
}

Relation relation_for(const SymmetryDescriptor& sym) {
    switch (sym.cls) {
        case SymmetryClass::pt: return Relation::intertwine(0.0);
        case SymmetryClass::anti_pt: return Relation::intertwine(M_PI);
        case SymmetryClass::anyonic: return Relation::intertwine(2.0 * M_PI - sym.phi);
        case SymmetryClass::chiral: return Relation::anticommute();
        default: throw InputError("relation_for: descriptor carries no symmetry class");
    }
}

CMatrix seed_eta(const CMatrix& h, const SymmetryDescriptor& sym, double tol) {
    require_square_finite(h, "seed_eta");
    const Relation rel = relation_for(sym);
    const double accept = std::max(tol, 1e-12);
    const double scale = std::max(1.0, h.norm());

    if (sym.linear_part && (h - h.transpose()).norm() <= tol * scale) {
        if (verify_relation(*sym.linear_part, h, rel) <= accept) return *sym.linear_part;
    }
    if (sym.equivalence) {
        const CMatrix cand =
            sym.equivalence->u * sym.equivalence->seed_base * sym.equivalence->u.adjoint();
        if (verify_relation(cand, h, rel) <= accept) return cand;
    }
    const IntertwinerSet fallback = solve_relation(h, rel, tol);
    if (!fallback.etas.empty()) return fallback.etas.elements.front();
    throw NoSymmetryError("seed_eta: no seed satisfies the relation");
}

IntertwinerSet recursive_tower(const CMatrix& eta1, const CMatrix& h, const Relation& rel,
                               double tol) {
    require_square_finite(eta1, "recursive_tower");
    require_square_finite(h, "recursive_tower");
    if (eta1.rows() != h.rows()) throw InputError("recursive_tower: shape mismatch");
    if (rel.kind == Relation::Kind::stroboscopic)
        throw InputError("recursive_tower: use stroboscopic_tower for propagator relations");
    if (verify_relation(eta1, h, rel) > std::max(tol, 1e-12))
        throw NoSymmetryError("recursive_tower: seed violates the relation");

    const int n = static_cast<int>(h.rows());
    const Complex step_phase =
        rel.kind == Relation::Kind::intertwine ? std::polar(1.0, rel.phi / 2.0) : Complex(1.0);

    IntertwinerSet out;
    out.relation = rel;
    out.construction = Construction::recursive;
    out.etas.tolerance = tol;
    out.etas.elements.push_back(eta1);

    CMatrix raw = eta1;
    for (int step = 0; step < 2 * n + 2; ++step) {
        raw = step_phase * (raw * h);
        std::vector<CMatrix> candidates;
        if ((raw - raw.adjoint()).norm() <= std::max(tol, 1e-12) * raw.norm())
            candidates.push_back(hermitize(raw));
        else
            candidates = hermitian_split({raw}, tol).elements;

        bool grew = false;
        const int before = static_cast<int>(out.etas.elements.size());
        for (const CMatrix& c : candidates) {
            if (verify_relation(c, h, rel) > 1e-6) continue;  // anticommutant splits may fail
            std::vector<CMatrix> tentative = out.etas.elements;
            tentative.push_back(c);
            if (independent_count(tentative, tol) > static_cast<int>(out.etas.elements.size())) {
                out.etas.elements.push_back(c);
                grew = true;
            }
        }
        (void)before;
        if (!grew) break;
    }

    for (const auto& e : out.etas.elements) out.residuals.push_back(verify_relation(e, h, rel));
    return out;
}

IntertwinerSet combine(const IntertwinerSet& set, const std::vector<double>& weights,
                       const CMatrix& h) {
    if (weights.size() != set.etas.elements.size())
        throw InputError("combine: weight count does not match basis size");
    if (set.etas.empty()) throw InputError("combine: empty basis");
    CMatrix sum = CMatrix::Zero(set.etas.elements.front().rows(), set.etas.elements.front().cols());
    for (size_t i = 0; i < weights.size(); ++i) sum += weights[i] * set.etas.elements[i];

    IntertwinerSet out;
    out.relation = set.relation;
    out.construction = set.construction;
    out.etas.tolerance = set.etas.tolerance;
    out.etas.elements.push_back(sum);
    out.coefficients = weights;
    out.residuals.push_back(verify_relation(sum, h, set.relation));
    return out;
}

}  // namespace intertwiner
