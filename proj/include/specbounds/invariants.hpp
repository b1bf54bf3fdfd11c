#pragma once

#include <specbounds/mesh.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace specbounds {

class TriangleBvh;

struct IntersectionIndexResult {
    /// Largest transversal crossing count seen; a certified lower bound on
    /// the intersection index.
    int i_hat = 0;
    std::map<int, std::int64_t> histogram;  // crossing count -> lines
    std::int64_t odd_lines = 0;             // accepted lines with an odd count
    std::int64_t rejected = 0;              // non-generic lines resampled
    int n_lines = 0;
    std::uint64_t seed = 0;
    double eps = 0.0;
};

/// Samples n_lines lines (uniform direction, uniform offset in the disk of
/// the projected bounding sphere) and counts transversal crossings.
/// Lines hitting within eps of a triangle edge, or meeting a triangle
/// tangentially, are resampled. eps <= 0 selects 1e-9 * bbox diagonal.
IntersectionIndexResult intersection_index(const TriMesh& mesh, int n_lines, std::uint64_t seed, double eps = 0.0);

/// Area of mesh inside the solid ball B(center, r).
double ball_area(const TriMesh& mesh, const Vec3& center, double r);

struct ConcentrationResult {
    double L_hat = 0.0;
    Vec3 witness_center = Vec3::Zero();
    double witness_radius = 0.0;
    int probe_centers = 0;
    int n_centers = 0;
    int n_radii = 0;
    std::uint64_t seed = 0;
};

/// Max of ball_area(x, r) / r^2 over mesh vertices, barycenter, origin and
/// n_centers random surface points, with n_radii geometric radii between
/// D/1000 and D (D = twice the bounding radius about the barycenter).
/// Barycenter and origin are also probed at the radius enclosing the
/// whole mesh.
ConcentrationResult concentration(const TriMesh& mesh, int n_centers, int n_radii, std::uint64_t seed);

struct ShadowResult {
    Vec3 direction = Vec3::UnitZ();  // normal of the projection plane
    double shadow_area = 0.0;        // projection counted once
    double signed_mass = 0.0;        // sum of |projected triangle areas|
    double error_bound = 0.0;        // bound on |shadow_area - exact|
    int grid_resolution = 0;
    double cell_size = 0.0;
};

ShadowResult shadow(const TriMesh& mesh, const Vec3& direction, int grid_resolution = 1024);

struct GrassmannResult {
    double avg_shadow = 0.0;
    double std_error = 0.0;         // sample standard error of the mean
    double mean_error_bound = 0.0;  // mean rasterisation bound
    double mc_error = 0.0;          // (3 std_error + mean_error_bound) / lemma_rhs
    double lemma_rhs = 0.0;         // (2 / i) (Vol B^2 / Vol S^2) Vol(M)
    bool pass = false;
    int n_planes = 0;
    int i_hat = 0;
    int grid_resolution = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo mean of the shadow area over uniformly random planes,
/// compared against the projection lower bound for intersection index i_hat.
GrassmannResult grassmann_average(
    const TriMesh& mesh, int n_planes, std::uint64_t seed, int grid_resolution, int i_hat);

/// Integral of |x|^2 over the surface with exact quadrature on each
/// triangle. The barycenter must be at the origin.
double moment_of_inertia(const TriMesh& mesh);

struct RearrangementResult {
    double area = 0.0;
    double integral_omega = 0.0;  // midpoint rule over the cells
    double integral_star = 0.0;   // exact, origin-centred disk of equal area
    double discretization_bound = 0.0;
    bool pass = false;
};

/// Compares the second moment of a union of square cells with that of the
/// centred disk of the same area.
RearrangementResult rearrangement_check(const std::vector<Vec2>& cell_centers, double cell_size);

struct GeometricInvariants {
    IntersectionIndexResult index;
    ConcentrationResult concentration;
    std::optional<double> moment_of_inertia;

    int i_hat() const { return index.i_hat; }
    double L_hat() const { return concentration.L_hat; }
};

} // namespace specbounds
