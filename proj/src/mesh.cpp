#include <specbounds/error.hpp>
#include <specbounds/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace specbounds {

namespace {

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n)
        : parent(n)
    {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct HalfUse {
    int face;
    int from;
    int to;
};

} // namespace

TriMesh TriMesh::create(
    std::vector<Vec3> vertices,
    std::vector<Face> faces,
    const ValidationOptions& options)
{
    std::vector<MeshIssue> issues;
    const int nv = static_cast<int>(vertices.size());
    const int nf = static_cast<int>(faces.size());

    if (nv == 0 || nf == 0) {
        throw MeshValidationError({{ErrorKind::Topology, "empty mesh"}});
    }
    for (int f = 0; f < nf; ++f) {
        for (int idx : faces[f]) {
            if (idx < 0 || idx >= nv) {
                throw MeshValidationError(
                    {{ErrorKind::Topology, "face " + std::to_string(f) + " index out of range"}});
            }
        }
        const auto& t = faces[f];
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            issues.push_back({ErrorKind::Topology, "face " + std::to_string(f) + " repeats a vertex"});
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (!vertices[v].allFinite()) {
            issues.push_back({ErrorKind::Geometry, "vertex " + std::to_string(v) + " is not finite"});
        }
    }
    if (!issues.empty()) throw MeshValidationError(std::move(issues));

    TriMesh mesh;
    mesh.m_options = options;
    for (const auto& p : vertices) mesh.m_bbox.extend(p);

    // Edge incidence.
    std::unordered_map<std::uint64_t, std::vector<HalfUse>> uses;
    uses.reserve(static_cast<std::size_t>(nf) * 2);
    for (int f = 0; f < nf; ++f) {
        for (int c = 0; c < 3; ++c) {
            const int a = faces[f][c];
            const int b = faces[f][(c + 1) % 3];
            uses[edge_key(a, b)].push_back({f, a, b});
        }
    }

    int boundary = 0;
    int nonmanifold = 0;
    int misoriented = 0;
    mesh.m_edges.reserve(uses.size());
    for (const auto& [key, list] : uses) {
        if (list.size() == 1) {
            ++boundary;
            continue;
        }
        if (list.size() > 2) {
            ++nonmanifold;
            continue;
        }
        if (list[0].from == list[1].from) {
            ++misoriented;
            continue;
        }
        mesh.m_edges.push_back({{list[0].from, list[0].to}, {list[0].face, list[1].face}});
    }
    if (boundary > 0) {
        issues.push_back({ErrorKind::Topology, std::to_string(boundary) + " boundary edge(s)"});
    }
    if (nonmanifold > 0) {
        issues.push_back({ErrorKind::Topology, std::to_string(nonmanifold) + " non-manifold edge(s)"});
    }
    if (misoriented > 0) {
        issues.push_back(
            {ErrorKind::Topology, std::to_string(misoriented) + " edge(s) with inconsistent orientation"});
    }
    // Deterministic edge order regardless of hash iteration.
    std::sort(mesh.m_edges.begin(), mesh.m_edges.end(), [](const Edge& x, const Edge& y) {
        return edge_key(x.v[0], x.v[1]) < edge_key(y.v[0], y.v[1]);
    });

    // Vertex links must be a single cycle once edges are manifold.
    std::vector<int> valence(nv, 0);
    for (const auto& t : faces) {
        for (int idx : t) ++valence[idx];
    }
    int isolated = 0;
    for (int v = 0; v < nv; ++v) {
        if (valence[v] == 0) ++isolated;
    }
    if (isolated > 0) {
        issues.push_back({ErrorKind::Topology, std::to_string(isolated) + " unreferenced vertex(es)"});
    }
    if (boundary == 0 && nonmanifold == 0 && misoriented == 0) {
        std::vector<std::vector<std::pair<int, int>>> link(nv);
        for (const auto& t : faces) {
            for (int c = 0; c < 3; ++c) {
                link[t[c]].emplace_back(t[(c + 1) % 3], t[(c + 2) % 3]);
            }
        }
        int pinched = 0;
        for (int v = 0; v < nv; ++v) {
            auto& arcs = link[v];
            if (arcs.empty()) continue;
            std::unordered_map<int, int> next;
            for (auto [a, b] : arcs) next[a] = b;
            int steps = 1;
            int cur = next[arcs.front().first];
            while (cur != arcs.front().first && steps <= static_cast<int>(arcs.size())) {
                cur = next[cur];
                ++steps;
            }
            if (steps != static_cast<int>(arcs.size())) ++pinched;
        }
        if (pinched > 0) {
            issues.push_back({ErrorKind::Topology, std::to_string(pinched) + " non-manifold vertex(es)"});
        }
    }

    // Components and per-component Euler characteristic.
    UnionFind uf(nv);
    for (const auto& t : faces) {
        uf.unite(t[0], t[1]);
        uf.unite(t[1], t[2]);
    }
    std::unordered_map<int, std::array<int, 3>> counts;  // root -> (V, E, F)
    for (int v = 0; v < nv; ++v) {
        if (valence[v] > 0) ++counts[uf.find(v)][0];
    }
    for (const auto& e : mesh.m_edges) ++counts[uf.find(e.v[0])][1];
    for (const auto& t : faces) ++counts[uf.find(t[0])][2];
    mesh.m_component_count = static_cast<int>(counts.size());
    if (mesh.m_component_count > 1 && !options.allow_disconnected) {
        issues.push_back(
            {ErrorKind::Topology,
             "mesh has " + std::to_string(mesh.m_component_count) + " connected components"});
    }
    if (issues.empty()) {
        for (const auto& [root, c] : counts) {
            const int chi = c[0] - c[1] + c[2];
            if (chi > 2 || chi % 2 != 0) {
                issues.push_back(
                    {ErrorKind::Topology,
                     "component Euler characteristic " + std::to_string(chi) + " is not an even integer <= 2"});
            }
        }
    }

    // Per-face geometry.
    const double diag = mesh.m_bbox.diagonal();
    const double min_area = options.degenerate_area_factor * diag * diag;
    mesh.m_face_areas.resize(nf);
    mesh.m_face_normals.resize(nf);
    int degenerate = 0;
    int first_degenerate = -1;
    for (int f = 0; f < nf; ++f) {
        const Vec3& a = vertices[faces[f][0]];
        const Vec3& b = vertices[faces[f][1]];
        const Vec3& c = vertices[faces[f][2]];
        const Vec3 n = (b - a).cross(c - a);
        const double twice = n.norm();
        mesh.m_face_areas[f] = 0.5 * twice;
        mesh.m_face_normals[f] = twice > 0.0 ? Vec3(n / twice) : Vec3::Zero();
        if (!(mesh.m_face_areas[f] > min_area)) {
            if (degenerate == 0) first_degenerate = f;
            ++degenerate;
        }
    }
    if (degenerate > 0) {
        issues.push_back(
            {ErrorKind::Geometry,
             std::to_string(degenerate) + " zero-area face(s), first is face " + std::to_string(first_degenerate)});
    }
    if (!issues.empty()) throw MeshValidationError(std::move(issues));

    // Pairwise summation keeps the total stable for large meshes.
    mesh.m_total_area = 0.0;
    {
        std::vector<double> partial(mesh.m_face_areas);
        std::size_t n = partial.size();
        while (n > 1) {
            const std::size_t half = (n + 1) / 2;
            for (std::size_t i = 0; i + half < n; ++i) partial[i] += partial[i + half];
            n = half;
        }
        mesh.m_total_area = partial[0];
    }

    mesh.m_vertices = std::move(vertices);
    mesh.m_faces = std::move(faces);
    return mesh;
}

Vec3 TriMesh::face_centroid(int f) const
{
    const auto& t = m_faces[f];
    return (m_vertices[t[0]] + m_vertices[t[1]] + m_vertices[t[2]]) / 3.0;
}

Vec3 barycenter(const TriMesh& mesh)
{
    Vec3 sum = Vec3::Zero();
    for (int f = 0; f < mesh.face_count(); ++f) {
        sum += mesh.face_areas()[f] * mesh.face_centroid(f);
    }
    return sum / mesh.total_area();
}

double bounding_radius(const TriMesh& mesh)
{
    const Vec3 c = barycenter(mesh);
    double r2 = 0.0;
    for (const auto& p : mesh.vertices()) r2 = std::max(r2, (p - c).squaredNorm());
    return std::sqrt(r2);
}

MeshStats mesh_stats(const TriMesh& mesh)
{
    MeshStats stats;
    stats.area = mesh.total_area();
    stats.euler_char = mesh.euler_characteristic();
    stats.components = mesh.component_count();
    stats.genus = (2 * stats.components - stats.euler_char) / 2;
    stats.barycenter = barycenter(mesh);
    stats.bounding_box = mesh.bounding_box();
    return stats;
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& linear, const Vec3& offset)
{
    std::vector<Vec3> vertices;
    vertices.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) vertices.push_back(linear * p + offset);
    std::vector<Face> faces = mesh.faces();
    if (linear.determinant() < 0.0) {
        for (auto& t : faces) std::swap(t[1], t[2]);
    }
    return TriMesh::create(std::move(vertices), std::move(faces), mesh.options());
}

TriMesh translated(const TriMesh& mesh, const Vec3& offset)
{
    std::vector<Vec3> vertices;
    vertices.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) vertices.push_back(p + offset);
    return TriMesh::create(std::move(vertices), mesh.faces(), mesh.options());
}

TriMesh scaled(const TriMesh& mesh, double factor)
{
    if (!(factor > 0.0)) throw_precondition("dilation factor must be positive");
    std::vector<Vec3> vertices;
    vertices.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) vertices.push_back(factor * p);
    return TriMesh::create(std::move(vertices), mesh.faces(), mesh.options());
}

TriMesh scaled(const TriMesh& mesh, const Vec3& axis_factors)
{
    if (!(axis_factors.minCoeff() > 0.0)) throw_precondition("axis factors must be positive");
    return transformed(mesh, axis_factors.asDiagonal().toDenseMatrix(), Vec3::Zero());
}

TriMesh merged(const std::vector<TriMesh>& parts)
{
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    for (const auto& part : parts) {
        const int base = static_cast<int>(vertices.size());
        vertices.insert(vertices.end(), part.vertices().begin(), part.vertices().end());
        for (const auto& t : part.faces()) faces.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    ValidationOptions options;
    options.allow_disconnected = true;
    return TriMesh::create(std::move(vertices), std::move(faces), options);
}

TriMesh recenter_unit_area(const TriMesh& mesh)
{
    const Vec3 c = barycenter(mesh);
    const double s = 1.0 / std::sqrt(mesh.total_area());
    std::vector<Vec3> vertices;
    vertices.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) vertices.push_back(s * (p - c));
    return TriMesh::create(std::move(vertices), mesh.faces(), mesh.options());
}

} // namespace specbounds
