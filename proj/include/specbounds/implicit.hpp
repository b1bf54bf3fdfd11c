#pragma once

#include <specbounds/mesh.hpp>

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace specbounds {

/// Real polynomial in x, y, z with sparse monomial storage.
class Polynomial {
public:
    using Exponents = std::array<int, 3>;

    Polynomial() = default;
    static Polynomial constant(double c);
    static Polynomial variable(int axis);

    /// Parses expressions such as "(x^2+y^2+z^2+3)^2 - 16*(x^2+y^2)".
    /// Supports + - * ^ (non-negative integer powers), parentheses, unary
    /// minus, decimal literals and the variables x, y, z.
    static Polynomial parse(std::string_view text);

    int degree() const;
    double eval(const Vec3& p) const;
    Vec3 gradient(const Vec3& p) const;
    const std::map<Exponents, double>& terms() const { return m_terms; }
    std::string to_string() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial pow(int exponent) const;

private:
    void prune();

    std::map<Exponents, double> m_terms;
};

struct ImplicitMesh {
    TriMesh mesh;
    /// Total degree N of the defining polynomial; bounds the intersection
    /// index of the zero set from above.
    int degree = 0;
};

/// Meshes the zero set of `poly` inside `box` by marching cubes with the
/// asymptotic decider on ambiguous faces. `resolution` is the number of
/// cells along the longest box side; cells are cubes.
ImplicitMesh gen_implicit(const Polynomial& poly, const Aabb& box, int resolution);

} // namespace specbounds
