#include <specbounds/error.hpp>
#include <specbounds/parallel.hpp>
#include <specbounds/sources.hpp>

#include <charconv>
#include <cmath>
#include <random>

namespace specbounds {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(const std::string& s, const std::string& spec)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::Parse, "bad number '" + s + "' in mesh spec '" + spec + "'");
    }
    return v;
}

int to_int(const std::string& s, const std::string& spec)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::Parse, "bad integer '" + s + "' in mesh spec '" + spec + "'");
    }
    return v;
}

void expect_arity(const std::vector<std::string>& parts, std::size_t lo, std::size_t hi, const std::string& spec)
{
    if (parts.size() < lo || parts.size() > hi) throw Error(ErrorKind::Parse, "wrong field count in mesh spec '" + spec + "'");
}

Aabb box(const Vec3& lo, const Vec3& hi)
{
    Aabb b;
    b.extend(lo);
    b.extend(hi);
    return b;
}

} // namespace

Polynomial torus_polynomial(double R, double r)
{
    const Polynomial x = Polynomial::variable(0);
    const Polynomial y = Polynomial::variable(1);
    const Polynomial z = Polynomial::variable(2);
    const Polynomial rho2 = x * x + y * y;
    return (rho2 + z * z + Polynomial::constant(R * R - r * r)).pow(2) - Polynomial::constant(4.0 * R * R) * rho2;
}

Polynomial genus2_polynomial()
{
    return Polynomial::parse("(x*(x-1)^2*(x-2) + y^2)^2 + z^2 - 0.01");
}

MeshSource mesh_from_source(const std::string& source, const ValidationOptions& options)
{
    const auto parts = split(source, ':');
    const std::string& kind = parts[0];
    std::optional<int> degree;
    auto build = [&]() -> TriMesh {
        if (kind == "icosphere") {
            expect_arity(parts, 2, 3, source);
            const double radius = parts.size() == 3 ? to_double(parts[2], source) : 1.0;
            return gen_icosphere(to_int(parts[1], source), radius);
        } else if (kind == "ellipsoid") {
            expect_arity(parts, 5, 5, source);
            const Vec3 axes(to_double(parts[2], source), to_double(parts[3], source), to_double(parts[4], source));
            return scaled(gen_icosphere(to_int(parts[1], source), 1.0), axes);
        } else if (kind == "torus") {
            expect_arity(parts, 5, 5, source);
            degree = 4;
            return gen_torus(to_double(parts[1], source), to_double(parts[2], source), to_int(parts[3], source),
                to_int(parts[4], source));
        } else if (kind == "two-spheres") {
            expect_arity(parts, 3, 3, source);
            const TriMesh unit = gen_icosphere(to_int(parts[1], source), 1.0);
            const double sep = to_double(parts[2], source);
            return merged({unit, translated(unit, Vec3(0.0, 0.0, sep))});
        } else if (kind == "quartic-torus") {
            expect_arity(parts, 2, 2, source);
            const ImplicitMesh im =
                gen_implicit(torus_polynomial(2.0, 1.0), box(Vec3(-3.5, -3.5, -1.5), Vec3(3.5, 3.5, 1.5)), to_int(parts[1], source));
            degree = im.degree;
            return im.mesh;
        } else if (kind == "genus2") {
            expect_arity(parts, 2, 3, source);
            const ImplicitMesh im =
                gen_implicit(genus2_polynomial(), box(Vec3(-0.5, -1.0, -0.3), Vec3(2.5, 1.0, 0.3)), to_int(parts[1], source));
            degree = im.degree;
            if (parts.size() == 3) {
                std::mt19937_64 rng = make_stream(static_cast<std::uint64_t>(to_int(parts[2], source)), 0);
                std::normal_distribution<double> gauss(0.0, 1.0);
                std::uniform_real_distribution<double> stretch(0.7, 1.4);
                Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
                q.normalize();
                const Vec3 axes(stretch(rng), stretch(rng), stretch(rng));
                // A linear map keeps the degree, so the Milnor bound still applies.
                return transformed(im.mesh, q.toRotationMatrix() * axes.asDiagonal(), Vec3::Zero());
            }
            return im.mesh;
        }
        return load_mesh(source, options);
    };
    TriMesh mesh = build();
    return MeshSource{std::move(mesh), degree, source};
}

} // namespace specbounds
