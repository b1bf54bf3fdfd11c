#pragma once

#include <specbounds/invariants.hpp>
#include <specbounds/laplace.hpp>
#include <specbounds/mesh.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace specbounds {

/// Vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double vol_sphere(int n);
/// Vol(B^n) = pi^{n/2} / Gamma(n/2 + 1).
double vol_ball(int n);

struct DimensionConstants {
    int m = 2;
    double vol_sphere_m = 0.0;
    double vol_ball_m = 0.0;
    double vol_sphere_m_minus_1 = 0.0;
    double A_m = 0.0;
    double log2_C_m = 0.0;
    double log2_c_m = 0.0;
    std::optional<double> C_m;  // present only when representable as a double
    std::optional<double> c_m;
    int nash_p = 0;
};

/// Closed-form constants for dimension m, 2 <= m <= 50.
DimensionConstants constants(int m);

/// log2 of 6 * 8^{m+p} * (12 * 8^{2(m+p)})^{2/m}, the packing-route
/// constant for ambient exponent m+p.
double log2_packing_constant(int m, int ambient_exp);

struct BoundInput {
    std::string name;
    double value = 0.0;
    std::string provenance;  // "measured", "degree bound", "constant", "surrogate"
};

struct BoundRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool pass = false;
    double tolerance = 1e-9;  // relative: pass iff lhs <= rhs (1 + tolerance)
    std::vector<BoundInput> inputs;
};

struct BoundReport {
    std::vector<BoundRecord> records;

    bool all_pass() const;
    const BoundRecord* find(const std::string& name) const;
};

struct BoundOptions {
    std::optional<int> degree_bound;
    /// Squared L2 norm of the mean curvature vector; enables Reilly.
    std::optional<double> mean_curvature_energy;
    /// Largest k for the Thm2 and Thm3 records (capped by the spectrum).
    int max_k = 50;
    /// Families to evaluate: Hersch, ElSoufiIlias_genus, Reilly, Thm1, Thm2,
    /// Thm3, Milnor_degree, eqlambda, eqint. Empty selects every family whose
    /// inputs are available; a named family with missing inputs is an error.
    std::set<std::string> select;
    double equality_tolerance = 0.02;
    double tolerance = 1e-9;
};

/// Evaluates the eigenvalue inequalities on one mesh. All records are in
/// dilation-invariant form: eigenvalues enter as lambda * Vol, the moment
/// bounds are divided by Vol (eqlambda) or Vol^2 (eqint).
BoundReport check_bounds(
    const Spectrum& spectrum,
    const GeometricInvariants& inv,
    const MeshStats& stats,
    const DimensionConstants& consts,
    const BoundOptions& options = {});

struct WeylRow {
    int k = 0;
    double ratio = 0.0;  // lambda_k Vol / k^{2/m}
};

struct WeylTable {
    std::vector<WeylRow> rows;
    double sup_ratio = 0.0;
    int sup_k = 0;
    double bound = 0.0;  // c(m) i_hat^{2/m}
    double log2_bound = 0.0;
    bool pass = false;
};

/// Ratios lambda_k Vol / k^{2/m} for k = 1 .. spectrum size - 1 against the
/// Thm 2 constant. Needs at least lambda_0 and lambda_1.
WeylTable weyl_scan(const Spectrum& spectrum, const GeometricInvariants& inv, const DimensionConstants& consts);

} // namespace specbounds
