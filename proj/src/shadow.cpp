#include <specbounds/error.hpp>
#include <specbounds/geometry.hpp>
#include <specbounds/invariants.hpp>
#include <specbounds/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace specbounds {

namespace {

void plane_basis(const Vec3& d, Vec3& e1, Vec3& e2)
{
    const Vec3 helper = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    e1 = d.cross(helper).normalized();
    e2 = d.cross(e1);
}

} // namespace

ShadowResult shadow(const TriMesh& mesh, const Vec3& direction, int grid_resolution)
{
    if (grid_resolution < 64) throw_precondition("shadow grid resolution must be >= 64");
    const double len = direction.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw_precondition("shadow direction must be a nonzero vector");
    const Vec3 d = direction / len;
    Vec3 e1;
    Vec3 e2;
    plane_basis(d, e1, e2);

    const auto& verts = mesh.vertices();
    std::vector<Vec2> proj(verts.size());
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    Vec2 hi = -lo;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        proj[i] = Vec2(verts[i].dot(e1), verts[i].dot(e2));
        lo = lo.cwiseMin(proj[i]);
        hi = hi.cwiseMax(proj[i]);
    }
    const double side = std::max(hi.x() - lo.x(), hi.y() - lo.y()) * (1.0 + 1e-9);
    const double h = side / grid_resolution;
    const Vec2 origin = 0.5 * (lo + hi) - Vec2::Constant(0.5 * side);

    ShadowResult result;
    result.direction = d;
    result.grid_resolution = grid_resolution;
    result.cell_size = h;

    const int nf = mesh.face_count();
    std::vector<double> signed_area(nf);
    const int res = grid_resolution;
    std::vector<unsigned char> covered(static_cast<std::size_t>(res) * res, 0);
    for (int f = 0; f < nf; ++f) {
        const auto& t = mesh.faces()[f];
        const Vec2& a = proj[t[0]];
        const Vec2& b = proj[t[1]];
        const Vec2& c = proj[t[2]];
        const double twice = cross2(b - a, c - a);
        signed_area[f] = 0.5 * twice;
        result.signed_mass += 0.5 * std::abs(twice);
        if (twice == 0.0) continue;
        const double sgn = twice > 0.0 ? 1.0 : -1.0;
        const double slack = -1e-12 * std::abs(twice);
        const Vec2 tlo = a.cwiseMin(b).cwiseMin(c);
        const Vec2 thi = a.cwiseMax(b).cwiseMax(c);
        const int i0 = std::max(0, static_cast<int>(std::ceil((tlo.x() - origin.x()) / h - 0.5)));
        const int i1 = std::min(res - 1, static_cast<int>(std::floor((thi.x() - origin.x()) / h - 0.5)));
        const int j0 = std::max(0, static_cast<int>(std::ceil((tlo.y() - origin.y()) / h - 0.5)));
        const int j1 = std::min(res - 1, static_cast<int>(std::floor((thi.y() - origin.y()) / h - 0.5)));
        for (int j = j0; j <= j1; ++j) {
            const double y = origin.y() + (j + 0.5) * h;
            for (int i = i0; i <= i1; ++i) {
                const Vec2 p(origin.x() + (i + 0.5) * h, y);
                if (sgn * cross2(b - a, p - a) >= slack && sgn * cross2(c - b, p - b) >= slack &&
                    sgn * cross2(a - c, p - c) >= slack) {
                    covered[static_cast<std::size_t>(j) * res + i] = 1;
                }
            }
        }
    }
    std::int64_t cells = 0;
    for (unsigned char v : covered) cells += v;
    result.shadow_area = static_cast<double>(cells) * h * h;

    // The shadow boundary lies on projected fold edges, where the two faces
    // project with opposite (or zero) orientation. A segment of projected
    // length l meets at most 3 + sqrt(2) l / h cells.
    double fold_length = 0.0;
    std::int64_t fold_count = 0;
    for (const auto& e : mesh.edges()) {
        const double s0 = signed_area[e.face[0]];
        const double s1 = signed_area[e.face[1]];
        if (s0 * s1 > 0.0) continue;
        fold_length += (proj[e.v[0]] - proj[e.v[1]]).norm();
        ++fold_count;
    }
    result.error_bound = std::numbers::sqrt2 * h * fold_length + 3.0 * h * h * static_cast<double>(fold_count);
    return result;
}

GrassmannResult grassmann_average(
    const TriMesh& mesh, int n_planes, std::uint64_t seed, int grid_resolution, int i_hat)
{
    if (n_planes < 10) throw_precondition("grassmann_average needs n_planes >= 10");
    if (i_hat < 1) throw_precondition("grassmann_average needs an intersection index >= 1");

    std::vector<Vec3> dirs(n_planes);
    {
        std::mt19937_64 rng = make_stream(seed, 0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& d : dirs) {
            do {
                d = Vec3(gauss(rng), gauss(rng), gauss(rng));
            } while (d.norm() < 1e-12);
            d.normalize();
        }
    }
    std::vector<ShadowResult> shadows(n_planes);
    parallel_for(n_planes, [&](int i) { shadows[i] = shadow(mesh, dirs[i], grid_resolution); });

    GrassmannResult result;
    result.n_planes = n_planes;
    result.i_hat = i_hat;
    result.grid_resolution = grid_resolution;
    result.seed = seed;
    double sum = 0.0;
    double bound_sum = 0.0;
    for (const auto& s : shadows) {
        sum += s.shadow_area;
        bound_sum += s.error_bound;
    }
    result.avg_shadow = sum / n_planes;
    result.mean_error_bound = bound_sum / n_planes;
    double var = 0.0;
    for (const auto& s : shadows) var += (s.shadow_area - result.avg_shadow) * (s.shadow_area - result.avg_shadow);
    var /= (n_planes - 1);
    result.std_error = std::sqrt(var / n_planes);
    // Vol(B^2) / Vol(S^2) = pi / (4 pi).
    result.lemma_rhs = (2.0 / i_hat) * 0.25 * mesh.total_area();
    const double margin = 3.0 * result.std_error + result.mean_error_bound;
    result.mc_error = margin / result.lemma_rhs;
    result.pass = result.avg_shadow >= result.lemma_rhs - margin;
    return result;
}

} // namespace specbounds
