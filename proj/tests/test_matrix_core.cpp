#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "intertwiner/intertwine.hpp"
#include "intertwiner/matrix_core.hpp"
#include "intertwiner/models.hpp"
#include "intertwiner/spectral.hpp"
#include "test_util.hpp"

using namespace intertwiner;
using testutil::mat_close;

namespace {

CMatrix sigma(int axis) {
    CMatrix m(2, 2);
    if (axis == 0)
        m << 0, 1, 1, 0;
    else if (axis == 1)
        m << 0, Complex(0, -1), Complex(0, 1), 0;
    else
        m << 1, 0, 0, -1;
    return m;
}

}  // namespace

TEST_CASE("expm: analytic anchors") {
    CHECK(mat_close(expm(CMatrix::Zero(2, 2)), CMatrix::Identity(2, 2), 1e-14));

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = Complex(0, M_PI);
    d(1, 1) = Complex(0, -M_PI);
    CHECK(mat_close(expm(d), -CMatrix::Identity(2, 2), 1e-13));

    // exp(-i t (J/2) sigma_x) = cos(Jt/2) 1 - i sin(Jt/2) sigma_x at t = J = 1
    const CMatrix got = expm(Complex(0, -0.5) * sigma(0));
    const CMatrix want =
        std::cos(0.5) * CMatrix::Identity(2, 2) - Complex(0, std::sin(0.5)) * sigma(0);
    CHECK(mat_close(got, want, 1e-14));
}

TEST_CASE("expm: inverse property on random matrices") {
    std::mt19937 rng(91);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 2 + int(rng() % 5);
        CMatrix a = testutil::random_matrix(n, rng, 1.0);
        a *= 5.0 / std::max(1.0, a.norm());
        CHECK((expm(a) * expm(-a) - CMatrix::Identity(n, n)).norm() <= 1e-10);
    }
}

TEST_CASE("expm: meets the accuracy contract at norm 100") {
    // independent route: unitary exponential of a Hermitian matrix through
    // its eigendecomposition
    std::mt19937 rng(55);
    for (int rep = 0; rep < 5; ++rep) {
        CMatrix h = testutil::random_hermitian(5, rng);
        h *= 100.0 / h.norm();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        CMatrix phases = CMatrix::Zero(5, 5);
        for (int i = 0; i < 5; ++i) phases(i, i) = std::polar(1.0, es.eigenvalues()(i));
        const CMatrix oracle = es.eigenvectors() * phases * es.eigenvectors().adjoint();
        const CMatrix got = expm(Complex(0, 1) * h);
        CHECK((got - oracle).norm() <= 1e-12 * oracle.norm());
    }
}

TEST_CASE("expm: errors") {
    CMatrix bad(2, 2);
    bad << 1, 2, 3, std::nan("");
    CHECK_THROWS_AS(expm(bad), InputError);

    CMatrix huge = CMatrix::Identity(2, 2) * 1e6;
    CHECK_THROWS_AS(expm(huge), NumericalError);
}

TEST_CASE("nullspace_basis: anchors") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(1, 1) = -2.0;
    auto ns = nullspace_basis(d, 1e-10);
    REQUIRE(ns.size() == 1);
    CVector e1 = CVector::Zero(2);
    e1(0) = 1.0;
    CHECK(testutil::collinear(ns[0], e1));

    CHECK(nullspace_basis(CMatrix::Identity(2, 2), 1e-10).empty());

    // sole right-eigenvector of the D=3 spin model at its third-order EP
    const CMatrix h3 = build_pt_spin({3, 1.0, 1.0}).h;
    ns = nullspace_basis(h3, 1e-10);
    REQUIRE(ns.size() == 1);
    CVector v(3);
    v << -0.5, Complex(0, std::sqrt(2.0) / 2.0), 0.5;
    CHECK(testutil::collinear(ns[0], v, 1e-10));
}

TEST_CASE("nullspace_basis: every returned vector is annihilated at tol") {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 3 + int(rng() % 4);
        const int rank = 1 + int(rng() % (n - 1));
        CMatrix a = testutil::random_matrix(n, rng);
        CMatrix b = testutil::random_matrix(n, rng);
        const CMatrix m = a.leftCols(rank) * b.topRows(rank);  // rank-deficient
        const auto ns = nullspace_basis(m, 1e-10);
        CHECK(int(ns.size()) == n - rank);
        for (const auto& v : ns) {
            CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
            CHECK((m * v).norm() <= 1e-10 * m.norm());
        }
    }
}

TEST_CASE("nullspace_basis: zero matrix returns a full basis") {
    const auto ns = nullspace_basis(CMatrix::Zero(3, 3), 1e-10);
    CHECK(ns.size() == 3);
}

TEST_CASE("hermitian_split: anchors") {
    const CMatrix m = sigma(0) + Complex(0, 1) * sigma(1);
    const auto basis = hermitian_split({m});
    REQUIRE(basis.size() == 2);
    CHECK(mat_close(basis.elements[0], sigma(0), 1e-14));
    CHECK(mat_close(basis.elements[1], sigma(1), 1e-14));

    const auto one = hermitian_split({Complex(0, 1) * CMatrix::Identity(2, 2)});
    REQUIRE(one.size() == 1);
    CHECK(mat_close(one.elements[0], CMatrix::Identity(2, 2), 1e-14));
}

TEST_CASE("hermitian_split: conjugate-pair dyad splits into the symmetric pair") {
    // broken-phase dimer: complex-conjugate eigenvalues with left vectors
    // L+, L-; the dyad |L+><L-| splits into the two printed combinations
    const CMatrix h = build_dimer(1.0, 1.4).h;
    const SpectralData spec = eig_biorthogonal(h);
    const CVector lp = spec.left.col(0), lm = spec.left.col(1);
    REQUIRE(std::abs(spec.eigenvalues(0) - std::conj(spec.eigenvalues(1))) <= 1e-12);

    const CMatrix dyad = lp * lm.adjoint();
    const auto basis = hermitian_split({dyad});
    REQUIRE(basis.size() == 2);
    const CMatrix sym = (lp * lm.adjoint() + lm * lp.adjoint()) / 2.0;
    const CMatrix anti = Complex(0, 1) * (lp * lm.adjoint() - lm * lp.adjoint()) / 2.0;
    CHECK(mat_close(basis.elements[0], sym, 1e-13));
    // (M - M^+)/(2i) = -anti: same line, opposite sign convention
    CHECK(mat_close(basis.elements[1], CMatrix(-anti), 1e-13));
    CHECK(verify_relation(basis.elements[0], h, Relation::intertwine(0.0)) <= 1e-12);
    CHECK(verify_relation(basis.elements[1], h, Relation::intertwine(0.0)) <= 1e-12);
}

TEST_CASE("hermitian_split: spans the Hermitian/anti-Hermitian parts") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 15; ++rep) {
        const int n = 2 + int(rng() % 4);
        std::vector<CMatrix> ops;
        std::vector<CMatrix> direct;
        for (int k = 0; k < 3; ++k) {
            const CMatrix m = testutil::random_matrix(n, rng);
            ops.push_back(m);
            direct.push_back((m + m.adjoint()) / 2.0);
            direct.push_back((m - m.adjoint()) / Complex(0, 2));
        }
        const auto basis = hermitian_split(ops);
        for (const auto& e : basis.elements) CHECK((e - e.adjoint()).norm() <= 1e-12 * e.norm());
        CHECK(testutil::mutual_span_residual(basis.elements, direct) <= 1e-9);
        CHECK(independent_count(basis.elements) == basis.size());
    }
}

TEST_CASE("independent_count: anchors") {
    const CMatrix id = CMatrix::Identity(2, 2);
    CHECK(independent_count({id, sigma(2), id + sigma(2)}) == 2);
    CHECK(independent_count({CMatrix::Zero(2, 2)}) == 0);

    // tower of the D=3 spin model at gamma = 0.5 J
    const CMatrix h3 = build_pt_spin({3, 1.0, 0.5}).h;
    const CMatrix p3 = parity(3);
    CHECK(independent_count({p3, p3 * h3, p3 * h3 * h3}) == 3);
}

TEST_CASE("independent_count: invariant under real invertible recombination") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int rep = 0; rep < 15; ++rep) {
        const int n = 3;
        std::vector<CMatrix> ops;
        for (int k = 0; k < 3; ++k) ops.push_back(testutil::random_hermitian(n, rng));
        Eigen::Matrix3d mix;
        do {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) mix(i, j) = coef(rng);
        } while (std::abs(mix.determinant()) < 0.1);
        std::vector<CMatrix> mixed(3, CMatrix::Zero(n, n));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) mixed[i] += mix(i, j) * ops[j];
        CHECK(independent_count(ops) == independent_count(mixed));
    }
}

TEST_CASE("kron and helpers") {
    const CMatrix k = kron(sigma(2), sigma(0));
    CHECK(k.rows() == 4);
    CHECK(k(0, 1) == Complex(1, 0));
    CHECK(k(2, 3) == Complex(-1, 0));

    CVector v(2);
    v << Complex(0, -2), Complex(1, 0);
    gauge_phase(v);
    CHECK(v(0).real() == doctest::Approx(2.0));
    CHECK(std::abs(v(0).imag()) <= 1e-15);
}
