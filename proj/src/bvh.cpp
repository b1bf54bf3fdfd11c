#include <specbounds/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace specbounds {

double disk_wedge_area(const Vec2& a, const Vec2& b, double radius)
{
    const double r2 = radius * radius;
    auto sector = [r2](const Vec2& u, const Vec2& v) {
        return 0.5 * r2 * std::atan2(cross2(u, v), u.dot(v));
    };
    const bool a_in = a.squaredNorm() <= r2;
    const bool b_in = b.squaredNorm() <= r2;
    if (a_in && b_in) return 0.5 * cross2(a, b);

    const Vec2 d = b - a;
    const double qa = d.squaredNorm();
    if (qa == 0.0) return 0.0;
    const double qb = a.dot(d);
    const double qc = a.squaredNorm() - r2;
    const double disc = qb * qb - qa * qc;
    if (disc <= 0.0) return sector(a, b);
    const double root = std::sqrt(disc);
    const double t1 = (-qb - root) / qa;
    const double t2 = (-qb + root) / qa;
    if (t1 >= 1.0 || t2 <= 0.0) return sector(a, b);
    // Endpoints inside the disk are used as given: a + 1*d need not equal b,
    // and near the centre the angle between two tiny vectors is noise.
    const Vec2 p1 = a_in ? a : Vec2(a + t1 * d);
    const Vec2 p2 = b_in ? b : Vec2(a + t2 * d);
    return (a_in ? 0.0 : sector(a, p1)) + 0.5 * cross2(p1, p2) + (b_in ? 0.0 : sector(p2, b));
}

double polygon_disk_area(const std::vector<Vec2>& polygon, const Vec2& center, double radius)
{
    if (polygon.size() < 3 || !(radius > 0.0)) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2 a = polygon[i] - center;
        const Vec2 b = polygon[(i + 1) % polygon.size()] - center;
        sum += disk_wedge_area(a, b, radius);
    }
    return std::abs(sum);
}

double triangle_ball_area(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& center, double r)
{
    if (!(r > 0.0)) return 0.0;
    const double r2 = r * r;
    const Vec3 n_raw = (b - a).cross(c - a);
    const double twice_area = n_raw.norm();
    if (twice_area == 0.0) return 0.0;
    if ((a - center).squaredNorm() <= r2 && (b - center).squaredNorm() <= r2 && (c - center).squaredNorm() <= r2) {
        return 0.5 * twice_area;
    }
    const Vec3 n = n_raw / twice_area;
    const double dist = n.dot(center - a);
    if (std::abs(dist) >= r) return 0.0;
    const double rho = std::sqrt(r2 - dist * dist);
    const Vec3 foot = center - dist * n;
    const Vec3 e1 = (b - a).normalized();
    const Vec3 e2 = n.cross(e1);
    auto local = [&](const Vec3& p) { return Vec2((p - foot).dot(e1), (p - foot).dot(e2)); };
    const Vec2 pa = local(a);
    const Vec2 pb = local(b);
    const Vec2 pc = local(c);
    const double sum = disk_wedge_area(pa, pb, rho) + disk_wedge_area(pb, pc, rho) + disk_wedge_area(pc, pa, rho);
    return std::clamp(std::abs(sum), 0.0, 0.5 * twice_area);
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c)
{
    // Closest-point classification over the Voronoi regions of the triangle.
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return bp.norm();

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return (p - (a + v * ab)).norm();
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return cp.norm();

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return (p - (a + w * ac)).norm();
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + w * (c - b))).norm();
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    return (p - (a + ab * v + ac * w)).norm();
}

namespace {

constexpr int k_leaf_size = 4;

double box_min_dist2(const Aabb& box, const Vec3& p)
{
    const Vec3 below = (box.lo - p).cwiseMax(0.0);
    const Vec3 above = (p - box.hi).cwiseMax(0.0);
    return (below + above).squaredNorm();
}

double box_max_dist2(const Aabb& box, const Vec3& p)
{
    const Vec3 far = (p - box.lo).cwiseAbs().cwiseMax((p - box.hi).cwiseAbs());
    return far.squaredNorm();
}

bool line_hits_box(const Aabb& box, const Vec3& origin, const Vec3& dir)
{
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            if (origin[a] < box.lo[a] || origin[a] > box.hi[a]) return false;
            continue;
        }
        double t0 = (box.lo[a] - origin[a]) / dir[a];
        double t1 = (box.hi[a] - origin[a]) / dir[a];
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
        if (t_lo > t_hi) return false;
    }
    return true;
}

} // namespace

TriangleBvh::TriangleBvh(const TriMesh& mesh)
    : m_mesh(&mesh)
{
    const int n = mesh.face_count();
    m_order.resize(n);
    std::iota(m_order.begin(), m_order.end(), 0);
    std::vector<Vec3> centroids(n);
    for (int f = 0; f < n; ++f) centroids[f] = mesh.face_centroid(f);
    m_nodes.reserve(2 * static_cast<std::size_t>(n) / k_leaf_size + 2);
    build(0, n, centroids);
}

int TriangleBvh::build(int first, int count, std::vector<Vec3>& centroids)
{
    const int index = static_cast<int>(m_nodes.size());
    m_nodes.emplace_back();
    Node node;
    Aabb centroid_box;
    for (int i = first; i < first + count; ++i) {
        const int f = m_order[i];
        for (int v : m_mesh->faces()[f]) node.box.extend(m_mesh->vertices()[v]);
        centroid_box.extend(centroids[f]);
        node.area += m_mesh->face_areas()[f];
    }
    if (count <= k_leaf_size) {
        node.first = first;
        node.count = count;
        m_nodes[index] = node;
        return index;
    }
    int axis = 0;
    const Vec3 ext = centroid_box.hi - centroid_box.lo;
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;
    const int mid = first + count / 2;
    std::nth_element(
        m_order.begin() + first, m_order.begin() + mid, m_order.begin() + first + count,
        [&](int x, int y) {
            if (centroids[x][axis] != centroids[y][axis]) return centroids[x][axis] < centroids[y][axis];
            return x < y;
        });
    node.left = build(first, mid - first, centroids);
    node.right = build(mid, first + count - mid, centroids);
    m_nodes[index] = node;
    return index;
}

double TriangleBvh::ball_area(const Vec3& center, double r) const
{
    if (!(r > 0.0) || m_nodes.empty()) return 0.0;
    const double r2 = r * r;
    double total = 0.0;
    std::vector<int> stack{0};
    const auto& verts = m_mesh->vertices();
    while (!stack.empty()) {
        const Node& node = m_nodes[stack.back()];
        stack.pop_back();
        if (box_min_dist2(node.box, center) >= r2) continue;
        if (box_max_dist2(node.box, center) <= r2) {
            total += node.area;
            continue;
        }
        if (node.left < 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                const auto& t = m_mesh->faces()[m_order[i]];
                total += triangle_ball_area(verts[t[0]], verts[t[1]], verts[t[2]], center, r);
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
    return total;
}

void TriangleBvh::visit_line(const Vec3& origin, const Vec3& dir, const std::function<void(int)>& visit) const
{
    if (m_nodes.empty()) return;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = m_nodes[stack.back()];
        stack.pop_back();
        if (!line_hits_box(node.box, origin, dir)) continue;
        if (node.left < 0) {
            for (int i = node.first; i < node.first + node.count; ++i) visit(m_order[i]);
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
}

void TriangleBvh::visit_ball(const Vec3& center, double r, const std::function<void(int)>& visit) const
{
    if (m_nodes.empty()) return;
    const double r2 = r * r;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = m_nodes[stack.back()];
        stack.pop_back();
        if (box_min_dist2(node.box, center) > r2) continue;
        if (node.left < 0) {
            for (int i = node.first; i < node.first + node.count; ++i) visit(m_order[i]);
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
}

} // namespace specbounds
