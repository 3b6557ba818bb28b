#include "intertwiner/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace intertwiner {

namespace {

constexpr double ep_overlap_gate = 0.98;

double matrix_scale(const CMatrix& h) { return std::max(1.0, h.norm()); }

// Coalescence of a defect of order m is resolvable in double precision only
// down to eigenvalue splittings of order eps^(1/m); this window bounds the
// splittings that may still belong to one exceptional cluster.
double ep_window(const CMatrix& h) {
    const int n = static_cast<int>(h.rows());
    const int m = std::min(n, 12);
    const double eps = std::numeric_limits<double>::epsilon();
    return std::pow(100.0 * n * eps, 1.0 / m) * matrix_scale(h);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Groups eigenvalue indices. Two values merge when they are within the plain
// proximity tolerance, or when they sit inside the EP window with nearly
// collinear eigenvectors (the fingerprint of coalescing modes).
std::vector<std::vector<int>> cluster_values(const CVector& values, const CMatrix& unit_vectors,
                                             double proximity_abs, double window_abs) {
    const int n = static_cast<int>(values.size());
    const bool have_vectors = unit_vectors.cols() == n && unit_vectors.rows() > 0;
    UnionFind uf(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(values(i) - values(j));
            bool merge = d <= proximity_abs;
            if (!merge && have_vectors && d <= window_abs) {
                const double ov = std::abs(unit_vectors.col(i).dot(unit_vectors.col(j)));
                merge = ov >= ep_overlap_gate;
            }
            if (merge) uf.unite(i, j);
        }
    }

    std::vector<std::vector<int>> groups;
    std::vector<int> root_to_group(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (root_to_group[r] < 0) {
            root_to_group[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[root_to_group[r]].push_back(i);
    }

    auto later = [&](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    };
    for (auto& g : groups)
        std::sort(g.begin(), g.end(), [&](int a, int b) { return later(values(a), values(b)); });
    std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
        Complex ma = 0, mb = 0;
        for (int i : a) ma += values(i);
        for (int i : b) mb += values(i);
        return later(ma / double(a.size()), mb / double(b.size()));
    });
    return groups;
}

Complex group_mean(const CVector& values, const std::vector<int>& g) {
    Complex m = 0;
    for (int i : g) m += values(i);
    return m / double(g.size());
}

void require_square_finite(const CMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InputError(std::string(who) + ": matrix must be square and non-empty");
    if (!m.allFinite())
        throw InputError(std::string(who) + ": matrix has non-finite entries");
}

// #{singular values of B^m below tol*||B||^m}; thresholds against the input
// scale so that exactly nilpotent powers do not dissolve into roundoff.
int power_nullity(const CMatrix& b, int m, double tol) {
    CMatrix p = CMatrix::Identity(b.rows(), b.cols());
    for (int i = 0; i < m; ++i) p = p * b;
    const double ref = std::max(p.norm(), std::pow(std::max(b.norm(), 1e-300), double(m)));
    Eigen::JacobiSVD<CMatrix> svd(p);
    int count = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) <= tol * ref) ++count;
    return count;
}

// Minimum-norm least-squares solve with singular values below tol*sigma_max
// treated as zero.
CVector pinv_solve(const Eigen::JacobiSVD<CMatrix>& svd, double tol, const CVector& rhs) {
    const auto& sv = svd.singularValues();
    const double cut = tol * (sv.size() > 0 ? sv(0) : 0.0);
    CVector y = svd.matrixU().adjoint() * rhs;
    for (Eigen::Index i = 0; i < sv.size(); ++i) y(i) = sv(i) > cut ? y(i) / sv(i) : Complex(0);
    return svd.matrixV() * y;
}

// One-sided chain b*v_{m+1} = v_m of the requested length, starting from a
// kernel vector that lies in range(b^{length-1}).
std::vector<CVector> build_chain(const CMatrix& b, int length, double tol, const char* who) {
    const int n = static_cast<int>(b.rows());
    std::vector<CVector> kernel = nullspace_basis(b, tol);
    if (kernel.empty()) throw NumericalError(std::string(who) + ": not an eigenvalue at tol");

    CVector v1;
    if (kernel.size() == 1 || length == 1) {
        v1 = kernel.front();
    } else {
        // generalized eigenspace = near-kernel of b^length
        CMatrix p = CMatrix::Identity(n, n);
        for (int i = 0; i < length; ++i) p = p * b;
        const double ref = std::max(p.norm(), std::pow(std::max(b.norm(), 1e-300), double(length)));
        Eigen::JacobiSVD<CMatrix> svd_p(p, Eigen::ComputeFullV);
        std::vector<int> cols;
        for (Eigen::Index i = 0; i < svd_p.singularValues().size(); ++i)
            if (svd_p.singularValues()(i) <= tol * ref) cols.push_back(static_cast<int>(i));
        CMatrix gen(n, cols.size());
        for (size_t i = 0; i < cols.size(); ++i) gen.col(i) = svd_p.matrixV().col(cols[i]);

        CMatrix c = gen;
        for (int i = 0; i < length - 1; ++i) c = b * c;
        Eigen::JacobiSVD<CMatrix> svd_c(c, Eigen::ComputeFullU);
        if (svd_c.singularValues().size() == 0 || svd_c.singularValues()(0) <= tol * matrix_scale(b))
            throw NumericalError(std::string(who) + ": no chain of the claimed order");
        v1 = svd_c.matrixU().col(0);
    }
    gauge_phase(v1);

    std::vector<CVector> chain{v1};
    Eigen::JacobiSVD<CMatrix> svd_b(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (int m = 2; m <= length; ++m) {
        CVector next = pinv_solve(svd_b, tol, chain.back());
        const double resid = (b * next - chain.back()).norm();
        if (resid > 100.0 * tol * matrix_scale(b) * std::max(1.0, next.norm()))
            throw NumericalError(std::string(who) + ": least-squares residual exceeds tol");
        chain.push_back(std::move(next));
    }
    return chain;
}

}  // namespace

double default_cluster_tol(const CMatrix& h) { return 1e-8 * matrix_scale(h); }

SpectralData eig_biorthogonal(const CMatrix& h, double tol) {
    require_square_finite(h, "eig_biorthogonal");
    const int n = static_cast<int>(h.rows());

    Eigen::ComplexEigenSolver<CMatrix> right_solver(h, true);
    if (right_solver.info() != Eigen::Success)
        throw NumericalError("eig_biorthogonal: eigensolver failed to converge");
    Eigen::ComplexEigenSolver<CMatrix> left_solver(h.adjoint(), true);
    if (left_solver.info() != Eigen::Success)
        throw NumericalError("eig_biorthogonal: adjoint eigensolver failed to converge");

    const CVector w = right_solver.eigenvalues();
    CMatrix v = right_solver.eigenvectors();
    const CVector u = left_solver.eigenvalues();
    const CMatrix wl = left_solver.eigenvectors();
    for (int i = 0; i < n; ++i) v.col(i).normalize();

    const auto groups = cluster_values(w, v, default_cluster_tol(h), ep_window(h));

    SpectralData out;
    out.eigenvalues.resize(n);
    out.right = CMatrix::Zero(n, n);
    out.left = CMatrix::Zero(n, n);
    out.right_raw = CMatrix::Zero(n, n);
    out.overlaps = CVector::Zero(n);
    out.vector_ok.assign(n, false);

    std::vector<bool> left_used(n, false);
    auto take_nearest_left = [&](Complex target) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (left_used[j]) continue;
            const double d = std::abs(u(j) - target);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (best < 0) throw NumericalError("eig_biorthogonal: left eigenvalue matching failed");
        left_used[best] = true;
        return best;
    };

    const double resid_limit = std::max(tol, 1e-12) * matrix_scale(h);
    int slot = 0;
    for (const auto& g : groups) {
        const int m = static_cast<int>(g.size());
        const Complex mean = group_mean(w, g);
        std::vector<int> cluster_slots;

        if (m == 1) {
            const int i = g.front();
            CVector r = v.col(i);
            gauge_phase(r);
            const int j = take_nearest_left(std::conj(w(i)));
            CVector l = wl.col(j);
            l.normalize();
            gauge_phase(l);
            if ((h * r - w(i) * r).norm() > resid_limit)
                throw NumericalError("eig_biorthogonal: eigenpair residual exceeds tol");
            out.eigenvalues(slot) = w(i);
            out.right.col(slot) = r;
            out.left.col(slot) = l;
            out.right_raw.col(slot) = v.col(i);
            out.overlaps(slot) = l.dot(r);
            out.vector_ok[slot] = true;
            cluster_slots.push_back(slot++);
            out.cluster_defective.push_back(false);
        } else {
            for (int k = 0; k < m; ++k) take_nearest_left(std::conj(mean));
            auto kernel = nullspace_basis(h - mean * CMatrix::Identity(n, n), tol);
            const int geo = static_cast<int>(kernel.size());
            if (geo > m)
                throw NumericalError("eig_biorthogonal: cluster rank inconsistent with multiplicity");

            const bool defective = geo < m;
            CMatrix rb(n, geo);
            for (int k = 0; k < geo; ++k) rb.col(k) = kernel[k];
            auto lker = nullspace_basis(h.adjoint() - std::conj(mean) * CMatrix::Identity(n, n), tol);
            if (static_cast<int>(lker.size()) != geo)
                throw NumericalError("eig_biorthogonal: left/right eigenspace dimensions differ");
            CMatrix lb(n, geo);
            for (int k = 0; k < geo; ++k) lb.col(k) = lker[k];

            if (!defective) {
                // enforce <L_a|R_b> = 0 for a != b inside the cluster
                const CMatrix s = lb.adjoint() * rb;
                Eigen::JacobiSVD<CMatrix> ssvd(s);
                if (ssvd.singularValues()(geo - 1) <= 1e-12 * ssvd.singularValues()(0))
                    throw NumericalError("eig_biorthogonal: singular left-right overlap in cluster");
                lb = lb * s.inverse().adjoint();
                for (int k = 0; k < geo; ++k) lb.col(k).normalize();
            } else {
                out.diagonalizable = false;
            }
            for (int k = 0; k < geo; ++k) {
                CVector rc = rb.col(k), lc = lb.col(k);
                gauge_phase(rc);
                gauge_phase(lc);
                rb.col(k) = rc;
                lb.col(k) = lc;
            }

            for (int k = 0; k < m; ++k) {
                const int i = g[k];
                out.eigenvalues(slot) = w(i);
                out.right_raw.col(slot) = v.col(i);
                if (k < geo) {
                    out.right.col(slot) = rb.col(k);
                    out.left.col(slot) = lb.col(k);
                    out.overlaps(slot) = lb.col(k).dot(rb.col(k));
                    out.vector_ok[slot] = true;
                }
                cluster_slots.push_back(slot++);
            }
            out.cluster_defective.push_back(defective);
        }
        out.clusters.push_back(std::move(cluster_slots));
    }
    return out;
}

DegeneracyReport classify_degeneracies(const CMatrix& h, const SpectralData& spec,
                                       double cluster_tol) {
    require_square_finite(h, "classify_degeneracies");
    if (spec.dim() != h.rows()) throw InputError("classify_degeneracies: dimension mismatch");
    const int n = spec.dim();

    const double prox =
        cluster_tol >= 0.0 ? cluster_tol * matrix_scale(h) : default_cluster_tol(h);
    const auto groups = cluster_values(spec.eigenvalues, spec.right_raw, prox, ep_window(h));

    DegeneracyReport report;
    for (const auto& g : groups) {
        DegeneracyCluster c;
        c.indices = g;
        c.algebraic = static_cast<int>(g.size());
        c.value = group_mean(spec.eigenvalues, g);
        const CMatrix b = h - c.value * CMatrix::Identity(n, n);
        c.geometric =
            std::min<int>(c.algebraic, static_cast<int>(nullspace_basis(b, default_tol).size()));
        c.geometric = std::max(c.geometric, 1);
        if (c.algebraic == 1) {
            c.kind = DegeneracyKind::nondegenerate;
        } else if (c.geometric == c.algebraic) {
            c.kind = DegeneracyKind::diabolic;
        } else {
            c.kind = DegeneracyKind::exceptional;
            int prev = c.geometric;
            c.ep_order = 1;
            for (int m = 2; m <= c.algebraic; ++m) {
                const int nm = std::min(power_nullity(b, m, default_tol), c.algebraic);
                c.ep_order = m;
                if (nm >= c.algebraic || nm <= prev) break;
                prev = nm;
            }
        }
        report.clusters.push_back(std::move(c));
    }
    return report;
}

JordanChain jordan_chain(const CMatrix& h, Complex lambda, double tol) {
    require_square_finite(h, "jordan_chain");
    const int n = static_cast<int>(h.rows());
    const CMatrix b = h - lambda * CMatrix::Identity(n, n);

    // chain length = first m at which the nullity of b^m stops growing
    int length = 1;
    int prev = power_nullity(b, 1, tol);
    if (prev == 0) throw NumericalError("jordan_chain: lambda is not an eigenvalue at tol");
    for (int m = 2; m <= n; ++m) {
        const int nm = power_nullity(b, m, tol);
        if (nm <= prev) break;
        prev = nm;
        length = m;
    }

    JordanChain chain;
    chain.eigenvalue = lambda;
    chain.right = build_chain(b, length, tol, "jordan_chain");
    chain.left = build_chain(CMatrix(h.adjoint() - std::conj(lambda) * CMatrix::Identity(n, n)),
                             length, tol, "jordan_chain(left)");
    return chain;
}

std::vector<SymmetryDescriptor> spectrum_symmetry(const std::vector<Complex>& eigs, double tol) {
    if (eigs.empty()) throw InputError("spectrum_symmetry: empty spectrum");
    double scale = 1.0;
    for (Complex e : eigs) scale = std::max(scale, std::abs(e));
    const double thresh = std::max(tol, 1e-14) * scale;

    auto closed_under = [&](auto&& f) {
        std::vector<bool> used(eigs.size(), false);
        for (Complex e : eigs) {
            const Complex img = f(e);
            int best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < eigs.size(); ++j) {
                if (used[j]) continue;
                const double d = std::abs(eigs[j] - img);
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(j);
                }
            }
            if (best < 0 || bd > thresh) return false;
            used[best] = true;
        }
        return true;
    };

    std::vector<SymmetryDescriptor> out;
    if (closed_under([](Complex e) { return std::conj(e); }))
        out.push_back({SymmetryClass::pt, 0.0, std::nullopt, std::nullopt});
    if (closed_under([](Complex e) { return -std::conj(e); }))
        out.push_back({SymmetryClass::anti_pt, M_PI, std::nullopt, std::nullopt});

    // anyonic phases: the largest-modulus eigenvalue must map onto some
    // equal-modulus member; collect those candidate phases and verify each
    size_t ref = 0;
    for (size_t i = 1; i < eigs.size(); ++i)
        if (std::abs(eigs[i]) > std::abs(eigs[ref])) ref = i;
    if (std::abs(eigs[ref]) > thresh) {
        std::vector<double> phis;
        for (const Complex& e : eigs) {
            if (std::abs(std::abs(e) - std::abs(eigs[ref])) > thresh) continue;
            // e = exp(-i phi) conj(ref)
            double phi = -std::arg(e / std::conj(eigs[ref]));
            phi = std::fmod(phi + 4.0 * M_PI, 2.0 * M_PI);
            if (phi < 1e-9 || std::abs(phi - M_PI) < 1e-9 || 2.0 * M_PI - phi < 1e-9)
                continue;  // PT / anti-PT handled above
            bool dup = false;
            for (double p : phis) dup = dup || std::abs(p - phi) < 1e-9;
            if (dup) continue;
            if (closed_under([phi](Complex x) { return std::polar(1.0, -phi) * std::conj(x); }))
                phis.push_back(phi);
        }
        std::sort(phis.begin(), phis.end());
        for (double phi : phis)
            out.push_back({SymmetryClass::anyonic, phi, std::nullopt, std::nullopt});
    }

    if (closed_under([](Complex e) { return -e; }))
        out.push_back({SymmetryClass::chiral, 0.0, std::nullopt, std::nullopt});
    return out;
}

const char* to_string(SymmetryClass c) {
    switch (c) {
        case SymmetryClass::pt: return "PT";
        case SymmetryClass::anti_pt: return "anti-PT";
        case SymmetryClass::anyonic: return "anyonic";
        case SymmetryClass::chiral: return "chiral";
        default: return "none";
    }
}

const char* to_string(DegeneracyKind k) {
    switch (k) {
        case DegeneracyKind::nondegenerate: return "nondegenerate";
        case DegeneracyKind::diabolic: return "diabolic";
        default: return "exceptional";
    }
}

}  // namespace intertwiner
