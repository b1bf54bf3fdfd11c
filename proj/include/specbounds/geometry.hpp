#pragma once

#include <specbounds/mesh.hpp>

#include <functional>
#include <vector>

namespace specbounds {

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Signed area of the intersection of the disk |x| <= radius with the
/// triangle (0, a, b). Summing over the edges of a polygon gives the area
/// of polygon-disk intersection.
double disk_wedge_area(const Vec2& a, const Vec2& b, double radius);

/// Area of the intersection of a planar polygon (any orientation) with a
/// disk centred at `center`.
double polygon_disk_area(const std::vector<Vec2>& polygon, const Vec2& center, double radius);

/// Area of triangle (a, b, c) inside the solid ball B(center, r).
double triangle_ball_area(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& center, double r);

/// Euclidean distance from p to the closed triangle (a, b, c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Bounding-volume hierarchy over mesh faces with per-node area totals.
class TriangleBvh {
public:
    explicit TriangleBvh(const TriMesh& mesh);

    /// Exact area of mesh inside B(center, r). Subtrees whose box lies in the
    /// ball contribute their cached area without visiting triangles.
    double ball_area(const Vec3& center, double r) const;

    /// Visits every face whose box meets the infinite line origin + t*dir.
    void visit_line(const Vec3& origin, const Vec3& dir, const std::function<void(int)>& visit) const;

    /// Visits every face whose box comes within `r` of `center`.
    void visit_ball(const Vec3& center, double r, const std::function<void(int)>& visit) const;

    const TriMesh& mesh() const { return *m_mesh; }

private:
    struct Node {
        Aabb box;
        double area = 0.0;
        int left = -1;  // child indices, -1 for leaves
        int right = -1;
        int first = 0;  // range into m_order for leaves
        int count = 0;
    };

    int build(int first, int count, std::vector<Vec3>& centroids);

    const TriMesh* m_mesh;
    std::vector<Node> m_nodes;
    std::vector<int> m_order;
};

} // namespace specbounds
