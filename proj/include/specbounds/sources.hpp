#pragma once

#include <specbounds/implicit.hpp>
#include <specbounds/mesh.hpp>

#include <optional>
#include <string>
#include <vector>

namespace specbounds {

struct MeshSource {
    TriMesh mesh;
    std::optional<int> degree;  // polynomial degree for algebraic sources
    std::string description;
};

/// Polynomial whose zero set is the torus of revolution with radii R > r.
Polynomial torus_polynomial(double R, double r);

/// (x(x-1)^2(x-2) + y^2)^2 + z^2 - 0.01, a smooth genus-2 surface of degree 8.
Polynomial genus2_polynomial();

/// Mesh from a file path (.off or .obj) or a generator spec:
///   icosphere:S[:radius]          ellipsoid:S:a:b:c
///   torus:R:r:nu:nv               two-spheres:S:separation
///   quartic-torus:RES             genus2:RES[:seed]
/// genus2 with a seed applies a seeded random rotation and anisotropic
/// scaling to the base surface.
MeshSource mesh_from_source(const std::string& source, const ValidationOptions& options = {});

} // namespace specbounds
