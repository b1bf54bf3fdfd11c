#include <specbounds/error.hpp>
#include <specbounds/geometry.hpp>
#include <specbounds/invariants.hpp>
#include <specbounds/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace specbounds {

namespace {

Vec3 random_direction(std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        const Vec3 d(gauss(rng), gauss(rng), gauss(rng));
        const double n = d.norm();
        if (n > 1e-12) return d / n;
    }
}

void orthonormal_basis(const Vec3& d, Vec3& e1, Vec3& e2)
{
    const Vec3 helper = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    e1 = d.cross(helper).normalized();
    e2 = d.cross(e1);
}

enum class LineVerdict { Accept, Reject };

// Counts crossings of the line origin + t*dir with the mesh, or rejects the
// line as non-generic.
LineVerdict count_crossings(
    const TriangleBvh& bvh,
    const Vec3& origin,
    const Vec3& dir,
    double eps_len,
    double eps_angle,
    int& crossings)
{
    const TriMesh& mesh = bvh.mesh();
    const auto& verts = mesh.vertices();
    crossings = 0;
    bool reject = false;
    bvh.visit_line(origin, dir, [&](int f) {
        if (reject) return;
        const auto& t = mesh.faces()[f];
        const Vec3& a = verts[t[0]];
        const Vec3& b = verts[t[1]];
        const Vec3& c = verts[t[2]];
        const Vec3 e1 = b - a;
        const Vec3 e2 = c - a;
        const Vec3 p = dir.cross(e2);
        const double det = e1.dot(p);
        if (det == 0.0) {
            // Line parallel to the plane; reject only if it lies in it.
            if (std::abs(mesh.face_normals()[f].dot(origin - a)) < eps_len) reject = true;
            return;
        }
        const double inv = 1.0 / det;
        const Vec3 s = origin - a;
        const double u = s.dot(p) * inv;
        const Vec3 q = s.cross(e1);
        const double v = dir.dot(q) * inv;
        const double w = 1.0 - u - v;
        // Distance of the hit point to each edge: barycentric * altitude.
        const double twice_area = 2.0 * mesh.face_areas()[f];
        const double d_bc = w * twice_area / (c - b).norm();
        const double d_ca = u * twice_area / (a - c).norm();
        const double d_ab = v * twice_area / e1.norm();
        const double nearest = std::min({d_bc, d_ca, d_ab});
        if (nearest <= -eps_len) return;  // clean miss
        if (nearest < eps_len) {
            reject = true;
            return;
        }
        if (std::abs(dir.dot(mesh.face_normals()[f])) < eps_angle) {
            reject = true;
            return;
        }
        ++crossings;
    });
    return reject ? LineVerdict::Reject : LineVerdict::Accept;
}

Vec3 random_surface_point(const TriMesh& mesh, const std::vector<double>& cumulative, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double target = unit(rng) * cumulative.back();
    int f = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
    f = std::min(f, mesh.face_count() - 1);
    const double s = std::sqrt(unit(rng));
    const double t = unit(rng);
    const auto& tri = mesh.faces()[f];
    const auto& verts = mesh.vertices();
    return (1.0 - s) * verts[tri[0]] + s * (1.0 - t) * verts[tri[1]] + s * t * verts[tri[2]];
}

} // namespace

IntersectionIndexResult intersection_index(const TriMesh& mesh, int n_lines, std::uint64_t seed, double eps)
{
    if (n_lines < 1) throw_precondition("intersection_index needs n_lines >= 1");
    const double diag = mesh.bounding_box().diagonal();
    const double eps_len = eps > 0.0 ? eps : 1e-9 * diag;
    const double eps_angle = eps_len / diag;

    const TriangleBvh bvh(mesh);
    const Vec3 center = barycenter(mesh);
    const double radius = bounding_radius(mesh) * (1.0 + 1e-9);

    const int n_chunks = (n_lines + k_chunk_size - 1) / k_chunk_size;
    struct ChunkResult {
        int max_count = 0;
        std::map<int, std::int64_t> histogram;
        std::int64_t odd = 0;
        std::int64_t rejected = 0;
        bool exhausted = false;
    };
    std::vector<ChunkResult> chunks(n_chunks);

    parallel_for(n_chunks, [&](int chunk) {
        const int quota = std::min(k_chunk_size, n_lines - chunk * k_chunk_size);
        std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(chunk));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        ChunkResult& out = chunks[chunk];
        const std::int64_t max_attempts = 100LL * quota + 1000;
        std::int64_t attempts = 0;
        int accepted = 0;
        while (accepted < quota) {
            if (++attempts > max_attempts) {
                out.exhausted = true;
                return;
            }
            const Vec3 dir = random_direction(rng);
            Vec3 e1;
            Vec3 e2;
            orthonormal_basis(dir, e1, e2);
            const double rho = radius * std::sqrt(unit(rng));
            const double phi = 2.0 * std::numbers::pi * unit(rng);
            const Vec3 origin = center + rho * (std::cos(phi) * e1 + std::sin(phi) * e2);
            int crossings = 0;
            if (count_crossings(bvh, origin, dir, eps_len, eps_angle, crossings) == LineVerdict::Reject) {
                ++out.rejected;
                continue;
            }
            ++accepted;
            ++out.histogram[crossings];
            if (crossings % 2 != 0) ++out.odd;
            out.max_count = std::max(out.max_count, crossings);
        }
    });

    IntersectionIndexResult result;
    result.n_lines = n_lines;
    result.seed = seed;
    result.eps = eps_len;
    for (const auto& c : chunks) {
        if (c.exhausted) {
            throw Error(ErrorKind::Precondition, "intersection_index: all sampled lines rejected (eps too large?)");
        }
        result.i_hat = std::max(result.i_hat, c.max_count);
        for (const auto& [count, freq] : c.histogram) result.histogram[count] += freq;
        result.odd_lines += c.odd;
        result.rejected += c.rejected;
    }
    return result;
}

double ball_area(const TriMesh& mesh, const Vec3& center, double r)
{
    return TriangleBvh(mesh).ball_area(center, r);
}

ConcentrationResult concentration(const TriMesh& mesh, int n_centers, int n_radii, std::uint64_t seed)
{
    if (n_centers < 1 || n_radii < 1) throw_precondition("concentration needs n_centers, n_radii >= 1");
    const TriangleBvh bvh(mesh);
    const Vec3 bary = barycenter(mesh);
    const double diameter = 2.0 * bounding_radius(mesh);

    std::vector<double> radii(n_radii);
    for (int i = 0; i < n_radii; ++i) {
        const double t = n_radii == 1 ? 1.0 : static_cast<double>(i) / (n_radii - 1);
        radii[i] = diameter * std::pow(1e-3, 1.0 - t);
    }

    std::vector<Vec3> centers(mesh.vertices());
    const std::size_t special_begin = centers.size();
    centers.push_back(bary);
    centers.push_back(Vec3::Zero());
    {
        std::vector<double> cumulative(mesh.face_count());
        double acc = 0.0;
        for (int f = 0; f < mesh.face_count(); ++f) cumulative[f] = acc += mesh.face_areas()[f];
        std::mt19937_64 rng = make_stream(seed, 0);
        for (int i = 0; i < n_centers; ++i) centers.push_back(random_surface_point(mesh, cumulative, rng));
    }

    auto enclosing_radius = [&](const Vec3& c) {
        double r2 = 0.0;
        for (const auto& p : mesh.vertices()) r2 = std::max(r2, (p - c).squaredNorm());
        return std::sqrt(r2);
    };

    struct Best {
        double ratio = -1.0;
        Vec3 center = Vec3::Zero();
        double radius = 0.0;
    };
    const int n_total = static_cast<int>(centers.size());
    const int n_chunks = (n_total + k_chunk_size - 1) / k_chunk_size;
    std::vector<Best> best(n_chunks);
    parallel_for(n_chunks, [&](int chunk) {
        Best local;
        const int end = std::min(n_total, (chunk + 1) * k_chunk_size);
        for (int i = chunk * k_chunk_size; i < end; ++i) {
            const Vec3& c = centers[i];
            auto probe = [&](double r) {
                const double ratio = bvh.ball_area(c, r) / (r * r);
                if (ratio > local.ratio) local = {ratio, c, r};
            };
            for (double r : radii) probe(r);
            const auto idx = static_cast<std::size_t>(i);
            if (idx == special_begin || idx == special_begin + 1) {
                const double r = enclosing_radius(c);
                if (r > 0.0) probe(r * (1.0 + 1e-12));
            }
        }
        best[chunk] = local;
    });

    ConcentrationResult result;
    for (const auto& b : best) {
        if (b.ratio > result.L_hat) {
            result.L_hat = b.ratio;
            result.witness_center = b.center;
            result.witness_radius = b.radius;
        }
    }
    result.probe_centers = n_total;
    result.n_centers = n_centers;
    result.n_radii = n_radii;
    result.seed = seed;
    return result;
}

double moment_of_inertia(const TriMesh& mesh)
{
    const Vec3 c = barycenter(mesh);
    const double scale = bounding_radius(mesh);
    if (c.norm() > 1e-8 * scale) {
        throw_precondition("moment_of_inertia requires the barycenter at the origin (recenter the mesh first)");
    }
    const auto& verts = mesh.vertices();
    double total = 0.0;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces()[f];
        const Vec3& a = verts[t[0]];
        const Vec3& b = verts[t[1]];
        const Vec3& d = verts[t[2]];
        // Exact for quadratics: A/12 (sum |v_i|^2 + |sum v_i|^2).
        const double sum_sq = a.squaredNorm() + b.squaredNorm() + d.squaredNorm();
        total += mesh.face_areas()[f] / 12.0 * (sum_sq + (a + b + d).squaredNorm());
    }
    return total;
}

RearrangementResult rearrangement_check(const std::vector<Vec2>& cell_centers, double cell_size)
{
    if (cell_centers.empty()) throw_precondition("rearrangement_check needs a nonempty cell set");
    if (!(cell_size > 0.0)) throw_precondition("cell size must be positive");
    const double cell_area = cell_size * cell_size;
    RearrangementResult result;
    result.area = cell_area * static_cast<double>(cell_centers.size());
    for (const auto& c : cell_centers) result.integral_omega += c.squaredNorm() * cell_area;
    // Disk of radius rho: 2 pi rho^4 / 4 with rho^2 = area / pi.
    result.integral_star = result.area * result.area / (2.0 * std::numbers::pi);
    // The midpoint rule underestimates each square cell by h^4 / 6.
    result.discretization_bound = result.area * cell_area / 6.0;
    result.pass = result.integral_omega >= result.integral_star - result.discretization_bound;
    return result;
}

} // namespace specbounds
