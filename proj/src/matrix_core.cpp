#include "intertwiner/matrix_core.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace intertwiner {

namespace {

void require_square_finite(const CMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InputError(std::string(who) + ": matrix must be square and non-empty");
    if (!m.allFinite())
        throw InputError(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace

CMatrix expm(const CMatrix& m) {
    require_square_finite(m, "expm");
    CMatrix e = m.exp();
    if (!e.allFinite())
        throw NumericalError("expm: result overflowed the representable range");
    return e;
}

std::vector<CVector> nullspace_basis(const CMatrix& m, double tol) {
    require_square_finite(m, "nullspace_basis");
    if (tol < 0.0) throw InputError("nullspace_basis: tol must be >= 0");

    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const double scale = m.norm();  // Frobenius
    const auto& sv = svd.singularValues();

    std::vector<CVector> basis;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) <= tol * scale) {
            CVector v = svd.matrixV().col(i);
            gauge_phase(v);
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

OperatorBasis hermitian_split(const std::vector<CMatrix>& ops, double tol) {
    OperatorBasis out;
    out.tolerance = tol;
    std::vector<CMatrix> unit;  // orthonormal shadow used for the independence filter

    auto consider = [&](const CMatrix& part, double parent_norm) {
        const double pn = part.norm();
        if (pn <= tol * parent_norm) return;  // near-zero part
        CMatrix r = part;
        for (const CMatrix& q : unit) r -= real_inner(q, r) * q;
        if (r.norm() <= std::max(tol, 1e-14) * pn) return;  // dependent on kept set
        unit.push_back(r / r.norm());
        out.elements.push_back(part);
    };

    for (const CMatrix& m : ops) {
        require_square_finite(m, "hermitian_split");
        const double mn = m.norm();
        if (mn == 0.0) continue;
        const CMatrix h = (m + m.adjoint()) / 2.0;
        const CMatrix a = (m - m.adjoint()) / Complex(0.0, 2.0);
        consider(h, mn);
        consider(a, mn);
    }
    return out;
}

int independent_count(const std::vector<CMatrix>& ops, double tol) {
    if (ops.empty()) return 0;
    const Eigen::Index n = ops.front().rows();
    std::vector<CMatrix> scaled;
    for (const CMatrix& m : ops) {
        require_square_finite(m, "independent_count");
        if (m.rows() != n) throw InputError("independent_count: dimension mismatch");
        const double mn = m.norm();
        if (mn > 0.0) scaled.push_back(m / mn);
    }
    if (scaled.empty()) return 0;

    const int k = static_cast<int>(scaled.size());
    Eigen::MatrixXd gram(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) gram(i, j) = gram(j, i) = real_inner(scaled[i], scaled[j]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const auto& ev = es.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    if (largest <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > tol * largest) ++rank;
    return rank;
}

std::vector<CMatrix> hermitian_kernel(const std::function<CMatrix(const CMatrix&)>& map, int n,
                                      double tol, double ref_scale) {
    if (n <= 0) throw InputError("hermitian_kernel: dimension must be positive");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<CMatrix> basis;  // orthonormal Hermitian coordinates
    basis.reserve(size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            CMatrix s = CMatrix::Zero(n, n);
            s(i, j) = s(j, i) = inv_sqrt2;
            basis.push_back(s);
            CMatrix a = CMatrix::Zero(n, n);
            a(i, j) = Complex(0, inv_sqrt2);
            a(j, i) = Complex(0, -inv_sqrt2);
            basis.push_back(a);
        }
    }

    const int dim = n * n;
    Eigen::MatrixXd sys(2 * dim, dim);
    for (int k = 0; k < dim; ++k) {
        const CMatrix image = map(basis[k]);
        if (!image.allFinite()) throw NumericalError("hermitian_kernel: map produced non-finite values");
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                sys(i + n * j, k) = image(i, j).real();
                sys(dim + i + n * j, k) = image(i, j).imag();
            }
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    const double cut = tol * std::max(svd.singularValues()(0), ref_scale);
    std::vector<CMatrix> kernel;
    for (int k = 0; k < dim; ++k) {
        if (svd.singularValues()(k) > cut) continue;
        CMatrix x = CMatrix::Zero(n, n);
        for (int b = 0; b < dim; ++b) x += svd.matrixV()(b, k) * basis[b];
        kernel.push_back(std::move(x));
    }
    return kernel;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

void gauge_phase(CVector& v) {
    Eigen::Index imax = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best == 0.0) return;
    v *= std::conj(v(imax)) / best;
}

double real_inner(const CMatrix& a, const CMatrix& b) {
    return (a.adjoint() * b).trace().real();
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

std::vector<CMatrix> frobenius_orthonormalize(const std::vector<CMatrix>& ops, double tol) {
    std::vector<CMatrix> basis;
    for (const CMatrix& m : ops) {
        const double mn = m.norm();
        if (mn == 0.0) continue;
        CMatrix r = m;
        for (const CMatrix& q : basis) r -= real_inner(q, r) * q;
        if (r.norm() <= std::max(tol, 1e-14) * mn) continue;
        basis.push_back(r / r.norm());
    }
    return basis;
}

double span_residual(const std::vector<CMatrix>& orthonormal, const CMatrix& m) {
    const double mn = m.norm();
    if (mn == 0.0) return 0.0;
    CMatrix r = m;
    for (const CMatrix& q : orthonormal) r -= real_inner(q, r) * q;
    return r.norm() / mn;
}

}  // namespace intertwiner
