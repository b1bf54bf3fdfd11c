#include <specbounds/error.hpp>
#include <specbounds/implicit.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace specbounds {

namespace {

// Keeps surface vertices away from grid corners so that no output triangle
// collapses when the zero set passes through (or very near) a grid node.
constexpr double k_corner_margin = 1e-3;

struct Grid {
    Vec3 origin;
    double h = 0.0;
    std::array<int, 3> cells{};  // cells per axis

    std::int64_t node(int i, int j, int k) const
    {
        return (static_cast<std::int64_t>(k) * (cells[1] + 1) + j) * (cells[0] + 1) + i;
    }
    std::int64_t node_count() const
    {
        return static_cast<std::int64_t>(cells[0] + 1) * (cells[1] + 1) * (cells[2] + 1);
    }
    Vec3 position(int i, int j, int k) const { return origin + h * Vec3(i, j, k); }
};

// The four corners of each cube face, counter-clockwise seen from outside
// the cube. Corner c has offsets (c & 1, (c >> 1) & 1, (c >> 2) & 1).
std::array<std::array<int, 4>, 6> cube_faces()
{
    std::array<std::array<int, 4>, 6> faces{};
    const int loop[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3;
        const int w = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            std::array<int, 4> corners{};
            for (int q = 0; q < 4; ++q) {
                const int src = side == 1 ? q : 3 - q;
                std::array<int, 3> off{};
                off[axis] = side;
                off[u] = loop[src][0];
                off[w] = loop[src][1];
                corners[q] = off[0] | (off[1] << 1) | (off[2] << 2);
            }
            faces[axis * 2 + side] = corners;
        }
    }
    return faces;
}

} // namespace

ImplicitMesh gen_implicit(const Polynomial& poly, const Aabb& box, int resolution)
{
    if (resolution < 2) throw_precondition("implicit resolution must be at least 2");
    const Vec3 extent = box.hi - box.lo;
    if (!(extent.minCoeff() > 0.0)) throw_precondition("implicit bounding box must have positive extent");

    Grid grid;
    grid.origin = box.lo;
    grid.h = extent.maxCoeff() / resolution;
    for (int a = 0; a < 3; ++a) {
        grid.cells[a] = std::max(1, static_cast<int>(std::ceil(extent[a] / grid.h - 1e-9)));
    }
    if (grid.node_count() > 80'000'000) throw_precondition("implicit grid too large");

    std::vector<double> value(static_cast<std::size_t>(grid.node_count()));
    for (int k = 0; k <= grid.cells[2]; ++k) {
        for (int j = 0; j <= grid.cells[1]; ++j) {
            for (int i = 0; i <= grid.cells[0]; ++i) {
                value[grid.node(i, j, k)] = poly.eval(grid.position(i, j, k));
            }
        }
    }

    // The zero set must lie strictly inside the box: every boundary node
    // carries the same (nonzero) sign.
    int positive = 0;
    int negative = 0;
    int zero = 0;
    for (int k = 0; k <= grid.cells[2]; ++k) {
        for (int j = 0; j <= grid.cells[1]; ++j) {
            for (int i = 0; i <= grid.cells[0]; ++i) {
                const bool on_boundary = i == 0 || j == 0 || k == 0 || i == grid.cells[0]
                    || j == grid.cells[1] || k == grid.cells[2];
                if (!on_boundary) continue;
                const double v = value[grid.node(i, j, k)];
                if (v > 0.0) {
                    ++positive;
                } else if (v < 0.0) {
                    ++negative;
                } else {
                    ++zero;
                }
            }
        }
    }
    if (zero > 0 || (positive > 0 && negative > 0)) {
        throw Error(ErrorKind::Geometry, "zero set touches bbox boundary");
    }
    // Orient so that the outside (boundary side) is positive.
    const double sign = positive > 0 ? 1.0 : -1.0;
    if (sign < 0.0) {
        for (double& v : value) v = -v;
    }
    auto field = [&](const Vec3& p) { return sign * poly.eval(p); };
    auto field_gradient = [&](const Vec3& p) -> Vec3 { return sign * poly.gradient(p); };

    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::unordered_map<std::int64_t, int> edge_vertex;

    // Surface vertex on the grid edge starting at node (i,j,k) along `axis`.
    auto crossing = [&](int i, int j, int k, int axis) {
        const std::int64_t a = grid.node(i, j, k);
        const std::int64_t key = a * 3 + axis;
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        std::array<int, 3> b_idx{i, j, k};
        ++b_idx[axis];
        const double va = value[a];
        const double vb = value[grid.node(b_idx[0], b_idx[1], b_idx[2])];
        double t = va / (va - vb);
        t = std::clamp(t, k_corner_margin, 1.0 - k_corner_margin);
        Vec3 p = grid.position(i, j, k);
        p[axis] += t * grid.h;
        const int id = static_cast<int>(vertices.size());
        vertices.push_back(p);
        edge_vertex.emplace(key, id);
        return id;
    };

    const auto face_corners = cube_faces();

    std::vector<std::pair<int, int>> segments;
    std::vector<int> loop;
    for (int k = 0; k < grid.cells[2]; ++k) {
        for (int j = 0; j < grid.cells[1]; ++j) {
            for (int i = 0; i < grid.cells[0]; ++i) {
                std::array<double, 8> cv{};
                int mask = 0;
                for (int c = 0; c < 8; ++c) {
                    cv[c] = value[grid.node(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))];
                    if (cv[c] < 0.0) mask |= 1 << c;
                }
                if (mask == 0 || mask == 0xff) continue;

                auto cube_edge_vertex = [&](int c0, int c1) {
                    const int lo = std::min(c0, c1);
                    const int axis = (c0 ^ c1) == 1 ? 0 : ((c0 ^ c1) == 2 ? 1 : 2);
                    return crossing(i + (lo & 1), j + ((lo >> 1) & 1), k + ((lo >> 2) & 1), axis);
                };

                segments.clear();
                for (const auto& fc : face_corners) {
                    std::array<bool, 4> neg{};
                    for (int q = 0; q < 4; ++q) neg[q] = cv[fc[q]] < 0.0;
                    // Edge q runs from corner q to corner q+1.
                    std::array<int, 4> exits{};
                    std::array<int, 4> entries{};
                    int n_exit = 0;
                    int n_entry = 0;
                    for (int q = 0; q < 4; ++q) {
                        const int r = (q + 1) % 4;
                        if (neg[q] && !neg[r]) exits[n_exit++] = q;
                        if (!neg[q] && neg[r]) entries[n_entry++] = q;
                    }
                    if (n_exit == 0) continue;
                    auto edge_id = [&](int q) { return cube_edge_vertex(fc[q], fc[(q + 1) % 4]); };
                    if (n_exit == 1) {
                        segments.emplace_back(edge_id(exits[0]), edge_id(entries[0]));
                        continue;
                    }
                    // Ambiguous face. The bilinear saddle is negative iff the
                    // product along the negative diagonal dominates; products
                    // are order independent so neighbouring cubes agree.
                    const int n0 = neg[0] ? 0 : 1;
                    const double neg_product = cv[fc[n0]] * cv[fc[n0 + 2]];
                    const double pos_product = cv[fc[1 - n0]] * cv[fc[3 - n0]];
                    const bool negatives_connected = neg_product > pos_product;
                    for (int e = 0; e < 2; ++e) {
                        const int q = exits[e];
                        const int partner = negatives_connected ? (q + 1) % 4 : (q + 3) % 4;
                        segments.emplace_back(edge_id(q), edge_id(partner));
                    }
                }

                // Chain segments into closed loops and triangulate each one.
                std::vector<bool> used(segments.size(), false);
                for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
                    if (used[s0]) continue;
                    loop.clear();
                    std::size_t s = s0;
                    for (;;) {
                        used[s] = true;
                        loop.push_back(segments[s].first);
                        const int tail = segments[s].second;
                        if (tail == segments[s0].first) break;
                        std::size_t next = segments.size();
                        for (std::size_t t = 0; t < segments.size(); ++t) {
                            if (!used[t] && segments[t].first == tail) {
                                next = t;
                                break;
                            }
                        }
                        if (next == segments.size()) {
                            throw Error(ErrorKind::Topology, "marching cubes produced an open contour");
                        }
                        s = next;
                    }
                    if (loop.size() == 3) {
                        faces.push_back({loop[0], loop[2], loop[1]});
                        continue;
                    }
                    Vec3 c = Vec3::Zero();
                    for (int id : loop) c += vertices[id];
                    c /= static_cast<double>(loop.size());
                    for (int step = 0; step < 2; ++step) {
                        const Vec3 g = field_gradient(c);
                        const double g2 = g.squaredNorm();
                        if (!(g2 > 0.0)) break;
                        const Vec3 moved = c - field(c) / g2 * g;
                        if ((moved - c).norm() > 0.5 * grid.h) break;
                        c = moved;
                    }
                    const int centre = static_cast<int>(vertices.size());
                    vertices.push_back(c);
                    for (std::size_t q = 0; q < loop.size(); ++q) {
                        faces.push_back({centre, loop[(q + 1) % loop.size()], loop[q]});
                    }
                }
            }
        }
    }
    if (faces.empty()) throw Error(ErrorKind::Geometry, "empty zero set inside bbox");

    try {
        return {TriMesh::create(std::move(vertices), std::move(faces)), poly.degree()};
    } catch (const MeshValidationError& e) {
        throw Error(e.kind(), std::string("marching cubes output rejected: ") + e.what());
    }
}

} // namespace specbounds
