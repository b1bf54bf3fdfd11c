#include <specbounds/error.hpp>
#include <specbounds/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

namespace specbounds {

TriMesh gen_icosphere(int subdivisions, double radius)
{
    if (subdivisions < 0 || subdivisions > 9) {
        throw_precondition("icosphere subdivisions must be in [0, 9], got " + std::to_string(subdivisions));
    }
    if (!(radius > 0.0)) throw_precondition("icosphere radius must be positive");

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    std::vector<Face> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (auto& p : vertices) p.normalize();

    for (int level = 0; level < subdivisions; ++level) {
        std::unordered_map<std::uint64_t, int> midpoint;
        midpoint.reserve(faces.size() * 2);
        auto mid = [&](int a, int b) {
            const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32)
                | static_cast<std::uint64_t>(std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = static_cast<int>(vertices.size());
            vertices.push_back((vertices[a] + vertices[b]).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Face> refined;
        refined.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            refined.push_back({f[0], ab, ca});
            refined.push_back({f[1], bc, ab});
            refined.push_back({f[2], ca, bc});
            refined.push_back({ab, bc, ca});
        }
        faces = std::move(refined);
    }
    for (auto& p : vertices) p *= radius;
    return TriMesh::create(std::move(vertices), std::move(faces));
}

TriMesh gen_torus(double major_radius, double minor_radius, int nu, int nv)
{
    if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
        throw_precondition("torus requires R > r > 0");
    }
    if (nu < 3 || nv < 3) throw_precondition("torus resolution requires nu, nv >= 3");

    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<std::size_t>(nu) * nv);
    for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * std::numbers::pi * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double v = 2.0 * std::numbers::pi * j / nv;
            const double ring = major_radius + minor_radius * std::cos(v);
            vertices.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v));
        }
    }
    auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
    std::vector<Face> faces;
    faces.reserve(static_cast<std::size_t>(nu) * nv * 2);
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const int p00 = id(i, j);
            const int p10 = id(i + 1, j);
            const int p11 = id(i + 1, j + 1);
            const int p01 = id(i, j + 1);
            faces.push_back({p00, p10, p11});
            faces.push_back({p00, p11, p01});
        }
    }
    return TriMesh::create(std::move(vertices), std::move(faces));
}

} // namespace specbounds
