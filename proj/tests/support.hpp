#pragma once

#include <specbounds/laplace.hpp>
#include <specbounds/mesh.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace support {

using namespace specbounds;

inline TriMesh tetrahedron(double s = 1.0)
{
    const double h = s / std::sqrt(8.0);
    std::vector<Vec3> v = {{h, h, h}, {h, -h, -h}, {-h, h, -h}, {-h, -h, h}};
    std::vector<Face> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return TriMesh::create(v, f);
}

// Stiffness from P1 gradients: K_ij = sum_T area(T) grad(phi_i).grad(phi_j).
// Shares no code with the cotangent assembly.
inline Eigen::MatrixXd fem_stiffness(const TriMesh& mesh)
{
    const int n = mesh.vertex_count();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    const auto& x = mesh.vertices();
    for (const auto& f : mesh.faces()) {
        const Vec3 e1 = x[f[1]] - x[f[0]];
        const Vec3 e2 = x[f[2]] - x[f[0]];
        Eigen::Matrix<double, 3, 2> J;
        J << e1, e2;
        const Eigen::Matrix2d G = J.transpose() * J;
        const double area = 0.5 * std::sqrt(G.determinant());
        // reference gradients of the three hat functions
        Eigen::Matrix<double, 2, 3> ref;
        ref << -1, 1, 0, -1, 0, 1;
        const Eigen::Matrix<double, 3, 3> grads = ref.transpose() * G.inverse() * ref;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) K(f[a], f[b]) += area * grads(a, b);
        }
    }
    return K;
}

inline Eigen::VectorXd lumped_mass(const TriMesh& mesh)
{
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int i = 0; i < mesh.face_count(); ++i) {
        for (int v : mesh.faces()[i]) m[v] += mesh.face_areas()[i] / 3.0;
    }
    return m;
}

// Ascending eigenvalues of M^{-1/2} K M^{-1/2}.
inline Eigen::VectorXd dense_spectrum(const Eigen::MatrixXd& K, const Eigen::VectorXd& mass)
{
    const Eigen::VectorXd s = mass.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd A = s.asDiagonal() * K * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    return es.eigenvalues();
}

// Uniform sample on triangle (a, b, c).
inline Vec3 sample_triangle(const Vec3& a, const Vec3& b, const Vec3& c, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double s = u(rng), t = u(rng);
    if (s + t > 1.0) {
        s = 1.0 - s;
        t = 1.0 - t;
    }
    return a + s * (b - a) + t * (c - a);
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    return q.toRotationMatrix();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace support

namespace support {

// Twice the signed area of a planar polygon.
inline double cross2_any(const std::vector<specbounds::Vec2>& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        s += a.x() * b.y() - a.y() * b.x();
    }
    return s;
}

} // namespace support
