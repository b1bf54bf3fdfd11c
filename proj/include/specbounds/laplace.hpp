#pragma once

#include <specbounds/mesh.hpp>

#include <Eigen/Sparse>

#include <vector>

namespace specbounds {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Cotangent stiffness K and lumped (barycentric) mass M of a closed mesh.
/// Eigenpairs solve K u = lambda M u.
struct SpectralPair {
    SparseMatrix stiffness;
    Eigen::VectorXd mass;  // diagonal of M
    int vertex_count = 0;

    double total_area() const { return mass.sum(); }
};

SpectralPair assemble(const TriMesh& mesh);

/// A run of eigenvalues whose consecutive relative gaps are below the
/// grouping threshold.
struct EigenCluster {
    double value = 0.0;  // mean of the run
    int first = 0;
    int multiplicity = 0;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending, lambda_0 .. lambda_k
    std::vector<double> normalized;   // lambda_j * Vol
    std::vector<double> residuals;    // |K u - lambda M u| / |M u|
    Eigen::MatrixXd eigenvectors;     // columns are M-orthonormal; may be empty
    std::vector<EigenCluster> clusters;
    int k_requested = 0;
    double area = 0.0;
    int restarts = 0;
};

struct EigsOptions {
    double shift = -1e-8;
    int max_restarts = 500;
    int block_size = 8;
    double cluster_gap = 1e-4;
    bool keep_vectors = true;
};

/// First k+1 eigenpairs by shift-invert block Krylov iteration with thick
/// restarts. Requires k + 1 < V and tol in (0, 1e-4]. Throws
/// ConvergenceError (with the achieved residuals) after max_restarts.
Spectrum eigs(const SpectralPair& pair, int k, double tol, const EigsOptions& options = {});

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& values, double relative_gap);

/// (f^T K f) / (f^T M f).
double rayleigh(const SpectralPair& pair, const Eigen::VectorXd& f);

/// Squared L2 norm of the discrete mean-curvature vector,
/// sum_v A_v |H_v|^2 with H_v = (K X)_v / (2 A_v).
double mean_curvature_energy(const TriMesh& mesh);

} // namespace specbounds
