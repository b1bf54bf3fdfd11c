#pragma once

#include <specbounds/laplace.hpp>
#include <specbounds/mesh.hpp>

#include <string>
#include <vector>

namespace specbounds {

/// Surface measure on a mesh, one atom per face (centroid, face area).
/// Sets are unions of faces, so mu(A) is the area of A.
struct DiscreteMeasure {
    std::vector<Vec3> atoms;
    std::vector<double> weights;
    double total = 0.0;
};

DiscreteMeasure build_measure(const TriMesh& mesh);

struct AdmissibleR {
    double r = 0.0;
    double max_ball_measure = 0.0;  // sup of mu(B(x, r)) over the probes
    Vec3 witness = Vec3::Zero();
    int grid_index = 0;  // 0 is the largest grid radius
};

/// Largest r on a 64-step geometric grid (2 * bounding radius down to a
/// factor 1e-6 below it) with 2 * 8^ambient_exp * mu(B(x, r)) <= alpha for
/// every probe x (face centroids and vertices). mu(B(x, r)) is the exact
/// surface area inside the ball.
AdmissibleR admissible_r(const TriMesh& mesh, double alpha, int ambient_exp);

struct PackingOptions {
    int ambient_exp = 3;
    /// Reject alpha above the bound omega / (2 * 8^ambient_exp * K).
    bool enforce_hypotheses = true;
    /// Graph rings kept free around each support so supports of different
    /// sets are never joined by an edge.
    int buffer_rings = 2;
};

struct PackingResult {
    bool success = false;
    std::string failure;  // set when success is false
    int sets_built = 0;
    std::vector<std::vector<int>> sets;  // face (atom) indices, ascending
    std::vector<double> measures;
    double r = 0.0;
    double alpha = 0.0;
    int K = 0;
    double min_pairwise_distance = 0.0;  // exact triangle-set distance
    int ambient_exp = 3;
};

/// Greedy construction of K face sets with mu(A_i) >= alpha and pairwise
/// distance >= 3r. A failed greedy is reported in the result, not thrown.
PackingResult construct_sets(
    const TriMesh& mesh, const DiscreteMeasure& measure, int K, double alpha, double r, const PackingOptions& options = {});

struct RayleighRow {
    int set = 0;
    double measure = 0.0;         // mu(A_i)
    double support_mass = 0.0;    // lumped mass of supp phi_i, standing in for mu(A_i^r)
    int support_size = 0;
    double rayleigh = 0.0;
    double local_bound = 0.0;     // (1 / r^2) support_mass / measure, with 10% slack
    double global_bound = 0.0;     // 6 * 8^{m+p} / r^2
    bool local_pass = false;
    bool global_pass = false;
};

struct TestFunctionReport {
    std::vector<RayleighRow> rows;
    std::vector<Eigen::VectorXd> functions;
    bool supports_disjoint = false;  // no shared vertex
    bool supports_separated = false; // no edge joins two supports
    double max_rayleigh = 0.0;
    double lambda_K_minus_1 = 0.0;
    bool minmax_pass = false;
    bool all_pass = false;
};

/// phi_i(v) = clamp(1 - d(v, A_i) / r, 0, 1) and their Rayleigh quotients,
/// with the support, gradient and min-max checks. The spectrum must hold at
/// least K eigenvalues.
TestFunctionReport test_functions(
    const TriMesh& mesh, const SpectralPair& pair, const PackingResult& packing, const Spectrum& spectrum,
    double tol = 1e-6);

struct ReplayResult {
    int k = 0;
    int K = 0;
    double alpha = 0.0;
    AdmissibleR radius;
    PackingResult packing;
    TestFunctionReport functions;
    std::vector<int> kept;        // sets surviving the neighbourhood filter
    bool filter_triggered = false;
    double max_kept_rayleigh = 0.0;
    double lambda_k = 0.0;
    bool minmax_pass = false;
    double log2_thm3_rhs = 0.0;   // (k/Vol)^{2/m} L^{2/m} C(m, p)
    double thm3_rhs = 0.0;
    bool thm3_pass = false;
    bool pass = false;
};

/// Full packing route for lambda_k: K = 2k+1, alpha = Vol / (6 * 8^{m+p} k),
/// r from admissible_r, then the filter dropping sets whose neighbourhood
/// has measure >= Vol / k. The spectrum must hold at least K eigenvalues.
ReplayResult replay_packing_bound(
    const TriMesh& mesh, const SpectralPair& pair, const Spectrum& spectrum, int k, double L_hat,
    int ambient_exp = 3);

} // namespace specbounds
