#include "support.hpp"

#include <specbounds/error.hpp>
#include <specbounds/laplace.hpp>

#include <doctest.h>

#include <cmath>

using namespace specbounds;
using support::rel;

TEST_CASE("stiffness symmetry, row sums, semidefiniteness and mass")
{
    const TriMesh m = gen_icosphere(3, 1.0);
    const SpectralPair p = assemble(m);
    const Eigen::MatrixXd K(p.stiffness);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((K * Eigen::VectorXd::Ones(K.rows())).cwiseAbs().maxCoeff() < 1e-12);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(K.rows());
        for (auto& v : x) v = g(rng);
        CHECK(x.dot(K * x) >= -1e-12);
    }
    CHECK(p.mass.minCoeff() > 0.0);
    CHECK(rel(p.mass.sum(), m.total_area()) < 1e-13);
}

TEST_CASE("cotangent stiffness equals the P1 gradient stiffness")
{
    for (const TriMesh& m : {support::tetrahedron(), gen_icosphere(2, 1.0), gen_torus(2, 0.7, 12, 7)}) {
        const Eigen::MatrixXd K(assemble(m).stiffness);
        CHECK((K - support::fem_stiffness(m)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("tetrahedron off-diagonal entries agree")
{
    const Eigen::MatrixXd K(assemble(support::tetrahedron(2.0)).stiffness);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i != j) CHECK(K(i, j) == doctest::Approx(K(0, 1)).epsilon(1e-14));
        }
    }
    // equilateral faces: every opposite angle is 60 degrees
    CHECK(K(0, 1) == doctest::Approx(-1.0 / std::tan(M_PI / 3.0)).epsilon(1e-14));
}

TEST_CASE("icosphere(5) spectrum")
{
    const TriMesh m = gen_icosphere(5, 1.0);
    const SpectralPair p = assemble(m);
    CHECK(rel(p.mass.sum(), 4.0 * M_PI) < 1e-3);
    const Spectrum sp = eigs(p, 9, 1e-8);
    const double expected[] = {0, 2, 2, 2, 6, 6, 6, 6, 6, 12};
    CHECK(std::abs(sp.eigenvalues[0]) < 1e-8 * sp.eigenvalues[1]);
    for (int j = 1; j < 10; ++j) CHECK(rel(sp.eigenvalues[j], expected[j]) < 0.01);
    for (double r : sp.residuals) CHECK(r <= 1e-8);
    REQUIRE(sp.clusters.size() == 4);
    CHECK(sp.clusters[1].multiplicity == 3);
    CHECK(sp.clusters[2].multiplicity == 5);
    // eigenvectors are mass-orthonormal
    const Eigen::MatrixXd G = sp.eigenvectors.transpose() * p.mass.asDiagonal() * sp.eigenvectors;
    CHECK((G - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-8);
    // coordinate functions are first eigenfunctions on the sphere
    Eigen::VectorXd x(m.vertex_count());
    for (int i = 0; i < m.vertex_count(); ++i) x[i] = m.vertices()[i].x();
    CHECK(rel(rayleigh(p, x), 2.0) < 0.01);
    CHECK(rel(rayleigh(p, sp.eigenvectors.col(1)), sp.eigenvalues[1]) < 1e-8);
}

TEST_CASE("dilation law for lambda_1")
{
    const Spectrum a = eigs(assemble(gen_icosphere(4, 1.0)), 5, 1e-9);
    const Spectrum b = eigs(assemble(gen_icosphere(4, 2.0)), 5, 1e-9);
    CHECK(rel(b.eigenvalues[1], 0.25 * a.eigenvalues[1]) < 1e-8);
    const TriMesh t = gen_torus(2, 1, 32, 16);
    const Spectrum base = eigs(assemble(t), 5, 1e-10);
    for (double s : {0.5, 3.0}) {
        const Spectrum d = eigs(assemble(scaled(t, s)), 5, 1e-10);
        for (int j = 1; j <= 5; ++j) CHECK(rel(d.eigenvalues[j] * s * s, base.eigenvalues[j]) < 1e-8);
    }
}

TEST_CASE("rigid motion leaves the spectrum unchanged")
{
    std::mt19937_64 rng(3);
    const TriMesh t = gen_torus(2, 1, 32, 16);
    const TriMesh moved = transformed(t, support::random_rotation(rng), Vec3(3, -1, 7));
    const Spectrum a = eigs(assemble(t), 8, 1e-11);
    const Spectrum b = eigs(assemble(moved), 8, 1e-11);
    for (int j = 1; j <= 8; ++j) CHECK(rel(a.eigenvalues[j], b.eigenvalues[j]) < 1e-10);
}

TEST_CASE("k = 0 gives the constant mode")
{
    const Spectrum sp = eigs(assemble(gen_torus(2, 1, 16, 8)), 0, 1e-8);
    REQUIRE(sp.eigenvalues.size() == 1);
    CHECK(std::abs(sp.eigenvalues[0]) < 1e-12);
}

TEST_CASE("eigensolver matches the dense oracle on small meshes")
{
    std::mt19937_64 rng(11);
    std::vector<TriMesh> meshes = {gen_icosphere(2, 1.0), scaled(gen_icosphere(2, 1.0), Vec3(2, 1, 1)),
        gen_torus(2, 1, 16, 8), gen_torus(3, 0.5, 20, 6), transformed(gen_icosphere(1, 1.0), support::random_rotation(rng), Vec3(1, 2, 3))};
    for (const auto& m : meshes) {
        REQUIRE(m.vertex_count() <= 300);
        const SpectralPair p = assemble(m);
        const Spectrum sp = eigs(p, 9, 1e-10);
        const Eigen::VectorXd dense = support::dense_spectrum(support::fem_stiffness(m), support::lumped_mass(m));
        for (int j = 0; j < 10; ++j) CHECK(std::abs(sp.eigenvalues[j] - dense[j]) <= 1e-8 * std::max(1.0, dense[j]));
    }
}

TEST_CASE("min-max consistency for random functions")
{
    const TriMesh m = gen_torus(2, 1, 24, 12);
    const SpectralPair p = assemble(m);
    const Spectrum sp = eigs(p, 1, 1e-9);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd f(m.vertex_count());
        for (auto& v : f) v = g(rng);
        f.array() -= f.dot(p.mass) / p.mass.sum();
        CHECK(rayleigh(p, f) >= sp.eigenvalues[1] - 1e-9);
    }
    CHECK(rayleigh(p, Eigen::VectorXd::Ones(m.vertex_count())) == doctest::Approx(0.0));
    CHECK_THROWS_AS(rayleigh(p, Eigen::VectorXd::Zero(m.vertex_count())), Error);
}

TEST_CASE("disconnected meshes have one zero per component")
{
    const TriMesh a = gen_icosphere(2, 1.0);
    const TriMesh two = merged({a, translated(a, Vec3(0, 0, 10))});
    const Spectrum sp = eigs(assemble(two), 3, 1e-9);
    CHECK(std::abs(sp.eigenvalues[0]) < 1e-12);
    CHECK(std::abs(sp.eigenvalues[1]) < 1e-12);
    CHECK(sp.eigenvalues[2] > 1.0);
}

TEST_CASE("eigs preconditions")
{
    const SpectralPair p = assemble(gen_icosphere(0, 1.0));
    try {
        eigs(p, 11, 1e-8);
        FAIL("k too large accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("k too large") != std::string::npos);
    }
    CHECK_THROWS_AS(eigs(p, 3, 1e-3), Error);
    CHECK_THROWS_AS(eigs(p, 3, 0.0), Error);
}

TEST_CASE("non-convergence reports residuals")
{
    EigsOptions opts;
    opts.max_restarts = 0;
    try {
        eigs(assemble(gen_icosphere(4, 1.0)), 20, 1e-12, opts);
        FAIL("converged without restarts");
    } catch (const ConvergenceError& e) {
        CHECK(e.residuals().size() == 21);
    }
}

TEST_CASE("mean curvature energy")
{
    const double e1 = mean_curvature_energy(gen_icosphere(5, 1.0));
    const double e2 = mean_curvature_energy(gen_icosphere(5, 2.0));
    CHECK(rel(e1, 4.0 * M_PI) < 0.01);
    CHECK(rel(e2, e1) < 1e-10);
    const double coarse = mean_curvature_energy(gen_torus(10, 1, 64, 16));
    const double fine = mean_curvature_energy(gen_torus(10, 1, 256, 64));
    CHECK(coarse > 0.0);
    CHECK(fine > 0.0);
    CHECK(rel(coarse, fine) < 0.05);
}
