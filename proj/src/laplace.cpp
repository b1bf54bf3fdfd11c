#include <specbounds/error.hpp>
#include <specbounds/laplace.hpp>

#include <cmath>
#include <string>

namespace specbounds {

SpectralPair assemble(const TriMesh& mesh)
{
    const int nv = mesh.vertex_count();
    const auto& verts = mesh.vertices();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.face_count()) * 9);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(nv);

    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces()[f];
        for (int c = 0; c < 3; ++c) {
            const int i = t[c];
            const int j = t[(c + 1) % 3];
            const int o = t[(c + 2) % 3];
            // Angle at o, opposite the edge (i, j).
            const Vec3 u = verts[i] - verts[o];
            const Vec3 v = verts[j] - verts[o];
            const double sin_part = u.cross(v).norm();
            const double cot = u.dot(v) / sin_part;
            if (!std::isfinite(cot)) {
                throw Error(ErrorKind::Numerical, "non-finite cotangent weight on face " + std::to_string(f));
            }
            const double w = 0.5 * cot;
            triplets.emplace_back(i, j, -w);
            triplets.emplace_back(j, i, -w);
            triplets.emplace_back(i, i, w);
            triplets.emplace_back(j, j, w);
        }
        const double third = mesh.face_areas()[f] / 3.0;
        for (int idx : t) mass[idx] += third;
    }

    SpectralPair pair;
    pair.vertex_count = nv;
    pair.stiffness.resize(nv, nv);
    pair.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    pair.stiffness.makeCompressed();
    pair.mass = std::move(mass);
    return pair;
}

double rayleigh(const SpectralPair& pair, const Eigen::VectorXd& f)
{
    if (f.size() != pair.vertex_count) throw_precondition("vertex function has wrong length");
    const double denom = f.dot(pair.mass.cwiseProduct(f));
    if (!(denom > 0.0)) throw_precondition("Rayleigh quotient has zero denominator");
    const double numer = f.dot(pair.stiffness * f);
    return std::max(0.0, numer) / denom;
}

double mean_curvature_energy(const TriMesh& mesh)
{
    const SpectralPair pair = assemble(mesh);
    Eigen::MatrixXd coords(mesh.vertex_count(), 3);
    for (int v = 0; v < mesh.vertex_count(); ++v) coords.row(v) = mesh.vertices()[v].transpose();
    const Eigen::MatrixXd kx = pair.stiffness * coords;
    double energy = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const double area = pair.mass[v];
        const Eigen::RowVector3d h = kx.row(v) / (2.0 * area);
        energy += area * h.squaredNorm();
    }
    return energy;
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& values, double relative_gap)
{
    std::vector<EigenCluster> clusters;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i + 1;
        while (j < values.size()) {
            const double scale = std::max(std::abs(values[j]), std::abs(values[j - 1]));
            const double gap = values[j] - values[j - 1];
            // Values near zero (the kernel) are grouped by absolute size.
            if (gap > relative_gap * std::max(scale, 1e-300) && scale > 1e-12) break;
            ++j;
        }
        double sum = 0.0;
        for (std::size_t q = i; q < j; ++q) sum += values[q];
        clusters.push_back({sum / static_cast<double>(j - i), static_cast<int>(i), static_cast<int>(j - i)});
        i = j;
    }
    return clusters;
}

} // namespace specbounds
