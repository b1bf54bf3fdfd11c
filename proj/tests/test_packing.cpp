#include "support.hpp"

#include <specbounds/error.hpp>
#include <specbounds/geometry.hpp>
#include <specbounds/packing.hpp>

#include <doctest.h>

#include <cmath>
#include <set>

using namespace specbounds;
using support::rel;

namespace {

// Brute-force distance between two face sets (closest pair of triangles,
// checked via vertex-to-triangle distances in both directions).
double brute_set_distance(const TriMesh& m, const std::vector<int>& a, const std::vector<int>& b)
{
    double best = std::numeric_limits<double>::infinity();
    const auto& x = m.vertices();
    for (int fa : a) {
        for (int fb : b) {
            const auto& p = m.faces()[fa];
            const auto& q = m.faces()[fb];
            for (int v : p) best = std::min(best, point_triangle_distance(x[v], x[q[0]], x[q[1]], x[q[2]]));
            for (int v : q) best = std::min(best, point_triangle_distance(x[v], x[p[0]], x[p[1]], x[p[2]]));
        }
    }
    return best;
}

} // namespace

TEST_CASE("measure atoms")
{
    const TriMesh tet = support::tetrahedron(2.0);
    const DiscreteMeasure mu = build_measure(tet);
    CHECK(mu.atoms.size() == 4);
    for (double w : mu.weights) CHECK(w == doctest::Approx(std::sqrt(3.0) / 4.0 * 4.0).epsilon(1e-12));
    const DiscreteMeasure s = build_measure(gen_icosphere(5, 1.0));
    CHECK(rel(s.total, 4.0 * M_PI) < 1e-3);
    CHECK(build_measure(gen_torus(2, 1, 64, 32)).atoms.size() == 2 * 64 * 32);
}

TEST_CASE("point-triangle distance")
{
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    CHECK(point_triangle_distance(Vec3(0.2, 0.2, 3), a, b, c) == doctest::Approx(3.0));
    CHECK(point_triangle_distance(Vec3(-1, -1, 0), a, b, c) == doctest::Approx(std::sqrt(2.0)));
    CHECK(point_triangle_distance(Vec3(1, 1, 0), a, b, c) == doctest::Approx(std::sqrt(0.5)));
    CHECK(point_triangle_distance(Vec3(2, 0, 1), a, b, c) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("admissible radius on the unit sphere follows cap growth")
{
    const TriMesh m = gen_icosphere(5, 1.0);
    const double alpha = 4.0 * M_PI / (6.0 * 512.0 * 2.0);
    const AdmissibleR ar = admissible_r(m, alpha, 3);
    // mu(B(x, r)) = pi r^2 on the unit sphere
    const double r_cap = std::sqrt(alpha / (2.0 * 512.0 * M_PI));
    CHECK(ar.r <= r_cap * 1.01);
    CHECK(ar.r >= r_cap * std::pow(1e-6, 1.0 / 63.0) * 0.98);  // within one grid step
    CHECK(2.0 * 512.0 * ar.max_ball_measure <= alpha);
    CHECK_THROWS_AS(admissible_r(m, 1e-300, 3), Error);
}

TEST_CASE("admissible radius ignores a far-away second component")
{
    const TriMesh a = gen_icosphere(3, 1.0);
    const TriMesh two = merged({a, translated(a, Vec3(0, 0, 100))});
    const double alpha = 4.0 * M_PI / 10.0;
    // grids differ with the bounding radius, so compare up to one grid step
    const double q = std::pow(1e-6, 1.0 / 63.0);
    const AdmissibleR one = admissible_r(a, alpha, 3);
    const AdmissibleR both = admissible_r(two, alpha, 3);
    CHECK(both.r >= one.r * q * (1.0 - 1e-12));
    CHECK(both.r <= one.r / q * (1.0 + 1e-12));
}

TEST_CASE("K = 1 packing")
{
    const TriMesh m = gen_torus(2, 1, 32, 16);
    const double alpha = m.total_area() / (2.0 * 512.0);
    const double r = admissible_r(m, alpha, 3).r;
    const PackingResult p = construct_sets(m, build_measure(m), 1, alpha, r);
    REQUIRE(p.success);
    CHECK(p.sets.size() == 1);
    CHECK(p.measures[0] >= alpha);
    CHECK(std::isinf(p.min_pairwise_distance));
}

TEST_CASE("two far spheres give two sets with zero Rayleigh quotients")
{
    ValidationOptions opts;
    opts.allow_disconnected = true;
    const TriMesh a = gen_icosphere(3, 1.0);
    const TriMesh two = merged({a, translated(a, Vec3(0, 0, 100))});
    PackingOptions po;
    po.enforce_hypotheses = false;
    const PackingResult p = construct_sets(two, build_measure(two), 2, a.total_area() * (1.0 - 1e-12), 1.0, po);
    REQUIRE(p.success);
    CHECK(p.min_pairwise_distance >= 98.0 - 1e-9);
    const SpectralPair pair = assemble(two);
    const Spectrum sp = eigs(pair, 1, 1e-9);
    const TestFunctionReport tf = test_functions(two, pair, p, sp);
    CHECK(tf.supports_disjoint);
    for (const auto& row : tf.rows) CHECK(row.rayleigh < 1e-12);
    CHECK(tf.minmax_pass);
    CHECK(tf.all_pass);
}

TEST_CASE("alpha above the hypothesis bound is rejected with the bound quoted")
{
    const TriMesh m = gen_icosphere(3, 1.0);
    try {
        construct_sets(m, build_measure(m), 2, 1.0, 0.01);
        FAIL("accepted infeasible alpha");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Precondition);
        CHECK(std::string(e.what()).find("omega/(2*8^3*K)") != std::string::npos);
    }
}

TEST_CASE("greedy exhaustion is a reported failure")
{
    const TriMesh m = gen_icosphere(2, 1.0);
    PackingOptions po;
    po.enforce_hypotheses = false;
    const PackingResult p = construct_sets(m, build_measure(m), 6, 1.0, 0.5, po);
    CHECK_FALSE(p.success);
    CHECK(p.failure.find("iteration") != std::string::npos);
    CHECK(p.sets_built < 6);
}

TEST_CASE("icosphere(5) packing with K = 5")
{
    const TriMesh m = gen_icosphere(5, 1.0);
    const double alpha = 4.0 * M_PI / (6.0 * 512.0 * 2.0);
    const double r = admissible_r(m, alpha, 3).r;
    const PackingResult p = construct_sets(m, build_measure(m), 5, alpha, r);
    REQUIRE(p.success);
    std::set<int> seen;
    for (std::size_t i = 0; i < p.sets.size(); ++i) {
        CHECK(p.measures[i] >= alpha);
        for (int f : p.sets[i]) CHECK(seen.insert(f).second);
    }
    for (std::size_t i = 0; i < p.sets.size(); ++i) {
        for (std::size_t j = i + 1; j < p.sets.size(); ++j) CHECK(brute_set_distance(m, p.sets[i], p.sets[j]) >= 3.0 * r);
    }
    const SpectralPair pair = assemble(m);
    const Spectrum sp = eigs(pair, 4, 1e-9);
    const TestFunctionReport tf = test_functions(m, pair, p, sp);
    CHECK(tf.supports_disjoint);
    CHECK(tf.supports_separated);
    CHECK(tf.minmax_pass);
    CHECK(tf.max_rayleigh >= sp.eigenvalues[4] - 1e-6);
    for (const auto& row : tf.rows) {
        CHECK(row.local_pass);
        CHECK(row.global_pass);
        CHECK(row.rayleigh <= 6.0 * 512.0 / (r * r));
        // phi is 1 on its set, in [0, 1] everywhere
        CHECK(tf.functions[row.set].maxCoeff() == doctest::Approx(1.0));
        CHECK(tf.functions[row.set].minCoeff() >= 0.0);
    }
    // discrete gradient bound: energy <= support mass / r^2 with 10% slack
    for (std::size_t i = 0; i < tf.functions.size(); ++i) {
        const Eigen::VectorXd& phi = tf.functions[i];
        const double energy = phi.dot(pair.stiffness * phi);
        CHECK(energy <= tf.rows[i].support_mass / (r * r) * 1.1);
    }
}

TEST_CASE("packing bound replay on the sphere")
{
    const TriMesh m = gen_icosphere(4, 1.0);
    const SpectralPair pair = assemble(m);
    const Spectrum sp = eigs(pair, 4, 1e-9);
    const ReplayResult rep = replay_packing_bound(m, pair, sp, 2, 4.0 * M_PI);
    CHECK(rep.K == 5);
    CHECK(rel(rep.alpha, m.total_area() / (6.0 * 512.0 * 2.0)) < 1e-14);
    REQUIRE(rep.packing.success);
    CHECK(rep.minmax_pass);
    CHECK(rep.thm3_pass);
    CHECK(rep.pass);
    CHECK(rep.kept.size() >= 3);
    CHECK(rel(rep.log2_thm3_rhs, std::log2(2.0 / m.total_area()) + std::log2(4.0 * M_PI) + std::log2(6.0 * 512.0 * 12.0) + 18.0) < 1e-12);
}

TEST_CASE("packing is deterministic")
{
    const TriMesh m = gen_torus(2, 1, 48, 24);
    const double alpha = m.total_area() / (6.0 * 512.0 * 2.0);
    const double r = admissible_r(m, alpha, 3).r;
    const PackingResult a = construct_sets(m, build_measure(m), 5, alpha, r);
    const PackingResult b = construct_sets(m, build_measure(m), 5, alpha, r);
    CHECK(a.sets == b.sets);
}
