#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

namespace specbounds {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& o)
    {
        lo = lo.cwiseMin(o.lo);
        hi = hi.cwiseMax(o.hi);
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
    double diagonal() const { return (hi - lo).norm(); }
};

/// An undirected mesh edge with its two incident faces. `face[0]` traverses
/// the edge as v[0] -> v[1].
struct Edge {
    std::array<int, 2> v;
    std::array<int, 2> face;
};

struct ValidationOptions {
    /// Accept several closed components (used for the two-sphere fixtures).
    bool allow_disconnected = false;
    /// Faces with area below this multiple of bbox_diagonal^2 are rejected.
    double degenerate_area_factor = 1e-12;
};

/// Closed, consistently oriented triangle surface in R^3. Construction
/// validates the input and throws MeshValidationError listing every
/// violated invariant; a constructed mesh is immutable.
class TriMesh {
public:
    static TriMesh create(
        std::vector<Vec3> vertices,
        std::vector<Face> faces,
        const ValidationOptions& options = {});

    const std::vector<Vec3>& vertices() const { return m_vertices; }
    const std::vector<Face>& faces() const { return m_faces; }
    const std::vector<double>& face_areas() const { return m_face_areas; }
    /// Unit normals, oriented by the face winding.
    const std::vector<Vec3>& face_normals() const { return m_face_normals; }
    const std::vector<Edge>& edges() const { return m_edges; }

    int vertex_count() const { return static_cast<int>(m_vertices.size()); }
    int face_count() const { return static_cast<int>(m_faces.size()); }
    int edge_count() const { return static_cast<int>(m_edges.size()); }
    int ambient_dim() const { return 3; }
    double total_area() const { return m_total_area; }
    int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }
    int component_count() const { return m_component_count; }
    const Aabb& bounding_box() const { return m_bbox; }

    Vec3 face_centroid(int f) const;
    const ValidationOptions& options() const { return m_options; }

private:
    TriMesh() = default;

    std::vector<Vec3> m_vertices;
    std::vector<Face> m_faces;
    std::vector<double> m_face_areas;
    std::vector<Vec3> m_face_normals;
    std::vector<Edge> m_edges;
    double m_total_area = 0.0;
    int m_component_count = 0;
    Aabb m_bbox;
    ValidationOptions m_options;
};

struct MeshStats {
    double area = 0.0;
    int genus = 0;
    int euler_char = 0;
    int components = 0;
    Vec3 barycenter = Vec3::Zero();
    Aabb bounding_box;
};

MeshStats mesh_stats(const TriMesh& mesh);

/// Area-weighted centroid (1/Vol) * integral of x over the surface.
Vec3 barycenter(const TriMesh& mesh);

/// Largest distance from the barycenter to a vertex. Unlike the bounding
/// box diagonal this is invariant under rigid motions.
double bounding_radius(const TriMesh& mesh);

// Rigid motions and dilations. All results are revalidated.
TriMesh translated(const TriMesh& mesh, const Vec3& offset);
TriMesh scaled(const TriMesh& mesh, double factor);
TriMesh scaled(const TriMesh& mesh, const Vec3& axis_factors);
TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& linear, const Vec3& offset);

/// Disjoint union. The result allows several components.
TriMesh merged(const std::vector<TriMesh>& parts);

/// Translate the barycenter to the origin and dilate to unit area.
TriMesh recenter_unit_area(const TriMesh& mesh);

// File formats (ASCII, triangles only).
enum class MeshFormat { Off, Obj };

MeshFormat format_from_path(const std::filesystem::path& path);
TriMesh load_mesh(
    const std::filesystem::path& path,
    MeshFormat format,
    const ValidationOptions& options = {});
TriMesh load_mesh(const std::filesystem::path& path, const ValidationOptions& options = {});
void save_off(const TriMesh& mesh, const std::filesystem::path& path);

// Generators.
TriMesh gen_icosphere(int subdivisions, double radius);
TriMesh gen_torus(double major_radius, double minor_radius, int nu, int nv);

} // namespace specbounds
