#include <specbounds/bounds.hpp>
#include <specbounds/error.hpp>
#include <specbounds/geometry.hpp>
#include <specbounds/packing.hpp>
#include <specbounds/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace specbounds {

namespace {

double pow8(int e) { return std::exp2(3.0 * e); }

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Largest distance from a face centroid to its corners.
std::vector<double> face_reach(const TriMesh& mesh)
{
    std::vector<double> reach(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Vec3 c = mesh.face_centroid(f);
        double r = 0.0;
        for (int v : mesh.faces()[f]) r = std::max(r, (mesh.vertices()[v] - c).norm());
        reach[f] = r;
    }
    return reach;
}

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2)
{
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0) return r.norm();
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

// Exact for triangles that do not cross each other.
double triangle_distance(const TriMesh& mesh, int f, int g)
{
    const auto& v = mesh.vertices();
    const auto& a = mesh.faces()[f];
    const auto& b = mesh.faces()[g];
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        best = std::min(best, point_triangle_distance(v[a[i]], v[b[0]], v[b[1]], v[b[2]]));
        best = std::min(best, point_triangle_distance(v[b[i]], v[a[0]], v[a[1]], v[a[2]]));
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            best = std::min(best,
                segment_segment_distance(v[a[i]], v[a[(i + 1) % 3]], v[b[j]], v[b[(j + 1) % 3]]));
        }
    }
    return best;
}

// Distance d(v, A) for every vertex with d < r.
std::map<int, double> near_vertices(
    const TriMesh& mesh, const TriangleBvh& bvh, const std::vector<int>& set, const std::vector<double>& reach, double r)
{
    std::map<int, double> dist;
    const auto& verts = mesh.vertices();
    for (int a : set) {
        const auto& ta = mesh.faces()[a];
        bvh.visit_ball(mesh.face_centroid(a), r + reach[a], [&](int g) {
            for (int v : mesh.faces()[g]) {
                const double d = point_triangle_distance(verts[v], verts[ta[0]], verts[ta[1]], verts[ta[2]]);
                if (d >= r) continue;
                auto [it, inserted] = dist.emplace(v, d);
                if (!inserted) it->second = std::min(it->second, d);
            }
        });
    }
    return dist;
}

std::vector<std::vector<int>> vertex_neighbours(const TriMesh& mesh)
{
    std::vector<std::vector<int>> adj(mesh.vertex_count());
    for (const auto& e : mesh.edges()) {
        adj[e.v[0]].push_back(e.v[1]);
        adj[e.v[1]].push_back(e.v[0]);
    }
    return adj;
}

} // namespace

DiscreteMeasure build_measure(const TriMesh& mesh)
{
    DiscreteMeasure mu;
    mu.atoms.reserve(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) mu.atoms.push_back(mesh.face_centroid(f));
    mu.weights = mesh.face_areas();
    mu.total = mesh.total_area();
    return mu;
}

AdmissibleR admissible_r(const TriMesh& mesh, double alpha, int ambient_exp)
{
    if (!(alpha > 0.0)) throw_precondition("alpha must be positive");
    if (ambient_exp < 1) throw_precondition("ambient exponent must be >= 1");
    constexpr int steps = 64;
    const double r_hi = 2.0 * bounding_radius(mesh);
    const double factor = 2.0 * pow8(ambient_exp);
    const TriangleBvh bvh(mesh);

    std::vector<Vec3> probes;
    probes.reserve(mesh.face_count() + mesh.vertex_count());
    for (int f = 0; f < mesh.face_count(); ++f) probes.push_back(mesh.face_centroid(f));
    probes.insert(probes.end(), mesh.vertices().begin(), mesh.vertices().end());

    auto grid_r = [&](int i) { return r_hi * std::pow(1e-6, static_cast<double>(i) / (steps - 1)); };

    struct Peak {
        double value = -1.0;
        Vec3 at = Vec3::Zero();
    };
    auto sup_measure = [&](double r) {
        const int n = static_cast<int>(probes.size());
        const int n_chunks = (n + k_chunk_size - 1) / k_chunk_size;
        std::vector<Peak> peaks(n_chunks);
        parallel_for(n_chunks, [&](int chunk) {
            Peak local;
            const int end = std::min(n, (chunk + 1) * k_chunk_size);
            for (int i = chunk * k_chunk_size; i < end; ++i) {
                const double v = bvh.ball_area(probes[i], r);
                if (v > local.value) local = {v, probes[i]};
            }
            peaks[chunk] = local;
        });
        Peak best;
        for (const auto& p : peaks) {
            if (p.value > best.value) best = p;
        }
        return best;
    };
    auto admissible = [&](const Peak& p) { return factor * p.value <= alpha; };

    Peak smallest = sup_measure(grid_r(steps - 1));
    if (!admissible(smallest)) {
        throw Error(ErrorKind::Precondition,
            "no admissible r on grid: even r = " + fmt(grid_r(steps - 1)) + " gives 2*8^" +
                std::to_string(ambient_exp) + "*mu(B) = " + fmt(factor * smallest.value) + " > alpha = " + fmt(alpha));
    }
    // Admissibility is monotone along the grid; find the first admissible index.
    int lo = 0;
    int hi = steps - 1;
    Peak at_hi = smallest;
    Peak first = sup_measure(grid_r(0));
    if (admissible(first)) {
        hi = 0;
        at_hi = first;
    }
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        const Peak p = sup_measure(grid_r(mid));
        if (admissible(p)) {
            hi = mid;
            at_hi = p;
        } else {
            lo = mid;
        }
    }
    AdmissibleR out;
    out.r = grid_r(hi);
    out.max_ball_measure = at_hi.value;
    out.witness = at_hi.at;
    out.grid_index = hi;
    return out;
}

PackingResult construct_sets(
    const TriMesh& mesh, const DiscreteMeasure& measure, int K, double alpha, double r, const PackingOptions& options)
{
    if (K < 1) throw_precondition("K must be >= 1");
    if (!(alpha > 0.0) || !(r > 0.0)) throw_precondition("alpha and r must be positive");
    if (static_cast<int>(measure.weights.size()) != mesh.face_count()) {
        throw_precondition("measure does not belong to this mesh");
    }
    const double alpha_max = measure.total / (2.0 * pow8(options.ambient_exp) * K);
    if (options.enforce_hypotheses && alpha > alpha_max * (1.0 + 1e-12)) {
        throw_precondition("alpha = " + fmt(alpha) + " violates alpha <= omega/(2*8^" +
            std::to_string(options.ambient_exp) + "*K) = " + fmt(alpha_max));
    }

    const int nf = mesh.face_count();
    const TriangleBvh bvh(mesh);
    const std::vector<double> reach = face_reach(mesh);
    const double max_reach = *std::max_element(reach.begin(), reach.end());
    const auto adjacency = vertex_neighbours(mesh);
    std::vector<std::vector<int>> incident(mesh.vertex_count());
    for (int f = 0; f < nf; ++f) {
        for (int v : mesh.faces()[f]) incident[v].push_back(f);
    }

    PackingResult result;
    result.r = r;
    result.alpha = alpha;
    result.K = K;
    result.ambient_exp = options.ambient_exp;

    std::vector<char> available(nf, 1);
    const double rho = std::sqrt(alpha / std::numbers::pi);

    for (int iter = 0; iter < K; ++iter) {
        // Seed: the available atom with the most available measure nearby.
        int seed = -1;
        double seed_value = -1.0;
        for (int f = 0; f < nf; ++f) {
            if (!available[f]) continue;
            const Vec3& c = measure.atoms[f];
            double local = 0.0;
            bvh.visit_ball(c, rho, [&](int g) {
                if (available[g] && (measure.atoms[g] - c).norm() <= rho) local += measure.weights[g];
            });
            if (local > seed_value) {
                seed_value = local;
                seed = f;
            }
        }
        if (seed < 0) {
            result.failure = "greedy exhausted: no atoms left at iteration " + std::to_string(iter + 1) + " of " +
                std::to_string(K);
            return result;
        }

        std::vector<std::pair<double, int>> order;
        for (int f = 0; f < nf; ++f) {
            if (available[f]) order.emplace_back((measure.atoms[f] - measure.atoms[seed]).norm(), f);
        }
        std::sort(order.begin(), order.end());
        std::vector<int> set;
        double mass = 0.0;
        for (const auto& [d, f] : order) {
            set.push_back(f);
            mass += measure.weights[f];
            if (mass >= alpha) break;
        }
        if (mass < alpha) {
            result.failure = "greedy exhausted: remaining measure " + fmt(mass) + " < alpha at iteration " +
                std::to_string(iter + 1) + " of " + std::to_string(K);
            return result;
        }
        std::sort(set.begin(), set.end());
        for (int f : set) available[f] = 0;

        // Remove everything that could come within 3r of the new set.
        for (int a : set) {
            const Vec3& ca = measure.atoms[a];
            bvh.visit_ball(ca, 3.0 * r + reach[a] + max_reach, [&](int g) {
                if (available[g] && (measure.atoms[g] - ca).norm() < 3.0 * r + reach[a] + reach[g]) available[g] = 0;
            });
        }
        // Keep a graph buffer around the test-function support.
        std::vector<char> in_ring(mesh.vertex_count(), 0);
        std::vector<int> frontier;
        for (const auto& [v, d] : near_vertices(mesh, bvh, set, reach, r)) {
            in_ring[v] = 1;
            frontier.push_back(v);
        }
        for (int ring = 0; ring < options.buffer_rings; ++ring) {
            std::vector<int> next;
            for (int v : frontier) {
                for (int w : adjacency[v]) {
                    if (!in_ring[w]) {
                        in_ring[w] = 1;
                        next.push_back(w);
                    }
                }
            }
            frontier = std::move(next);
        }
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            if (!in_ring[v]) continue;
            for (int f : incident[v]) available[f] = 0;
        }

        result.sets.push_back(std::move(set));
        result.measures.push_back(mass);
        result.sets_built = iter + 1;
    }

    // Post-hoc verification of the packing properties.
    std::vector<int> owner(nf, -1);
    for (int i = 0; i < K; ++i) {
        for (int f : result.sets[i]) {
            if (owner[f] >= 0) {
                result.failure = "sets " + std::to_string(owner[f]) + " and " + std::to_string(i) + " overlap";
                return result;
            }
            owner[f] = i;
        }
        if (result.measures[i] < alpha) {
            result.failure = "set " + std::to_string(i) + " has measure below alpha";
            return result;
        }
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i) {
        for (int j = i + 1; j < K; ++j) {
            for (int a : result.sets[i]) {
                for (int b : result.sets[j]) {
                    const double lower = (measure.atoms[a] - measure.atoms[b]).norm() - reach[a] - reach[b];
                    if (lower >= min_dist) continue;
                    min_dist = std::min(min_dist, triangle_distance(mesh, a, b));
                }
            }
        }
    }
    result.min_pairwise_distance = min_dist;
    if (K > 1 && !(min_dist >= 3.0 * r)) {
        result.failure = "pairwise set distance " + fmt(min_dist) + " < 3r = " + fmt(3.0 * r);
        return result;
    }
    result.success = true;
    return result;
}

TestFunctionReport test_functions(
    const TriMesh& mesh, const SpectralPair& pair, const PackingResult& packing, const Spectrum& spectrum, double tol)
{
    if (!packing.success) throw_precondition("test functions need a successful packing");
    if (pair.vertex_count != mesh.vertex_count()) throw_precondition("spectral pair does not belong to this mesh");
    const int K = static_cast<int>(packing.sets.size());
    if (static_cast<int>(spectrum.eigenvalues.size()) < K) {
        throw_precondition("min-max check needs " + std::to_string(K) + " eigenvalues");
    }
    const double r = packing.r;
    const TriangleBvh bvh(mesh);
    const std::vector<double> reach = face_reach(mesh);

    TestFunctionReport report;
    std::vector<int> owner(mesh.vertex_count(), -1);
    report.supports_disjoint = true;
    const double global_bound = 6.0 * pow8(packing.ambient_exp) / (r * r);
    bool rows_pass = true;
    for (int i = 0; i < K; ++i) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(mesh.vertex_count());
        RayleighRow row;
        row.set = i;
        row.measure = packing.measures[i];
        for (const auto& [v, d] : near_vertices(mesh, bvh, packing.sets[i], reach, r)) {
            phi[v] = std::clamp(1.0 - d / r, 0.0, 1.0);
            if (phi[v] <= 0.0) continue;
            row.support_mass += pair.mass[v];
            ++row.support_size;
            if (owner[v] >= 0 && owner[v] != i) report.supports_disjoint = false;
            owner[v] = i;
        }
        row.rayleigh = rayleigh(pair, phi);
        row.local_bound = row.support_mass / (row.measure * r * r) * 1.1;
        row.global_bound = global_bound;
        row.local_pass = row.rayleigh <= row.local_bound;
        row.global_pass = row.rayleigh <= row.global_bound;
        rows_pass = rows_pass && row.local_pass && row.global_pass;
        report.max_rayleigh = std::max(report.max_rayleigh, row.rayleigh);
        report.functions.push_back(std::move(phi));
        report.rows.push_back(row);
    }
    report.supports_separated = report.supports_disjoint;
    for (const auto& e : mesh.edges()) {
        const int a = owner[e.v[0]];
        const int b = owner[e.v[1]];
        if (a >= 0 && b >= 0 && a != b) report.supports_separated = false;
    }
    report.lambda_K_minus_1 = spectrum.eigenvalues[K - 1];
    report.minmax_pass =
        report.lambda_K_minus_1 <= report.max_rayleigh + tol * std::max(1.0, std::abs(report.lambda_K_minus_1));
    report.all_pass = report.supports_disjoint && report.supports_separated && rows_pass && report.minmax_pass;
    return report;
}

ReplayResult replay_packing_bound(
    const TriMesh& mesh, const SpectralPair& pair, const Spectrum& spectrum, int k, double L_hat, int ambient_exp)
{
    if (k < 1) throw_precondition("replay needs k >= 1");
    if (!(L_hat > 0.0)) throw_precondition("replay needs a positive concentration estimate");
    constexpr int m = 2;
    ReplayResult out;
    out.k = k;
    out.K = 2 * k + 1;
    const double vol = mesh.total_area();
    out.alpha = vol / (6.0 * pow8(ambient_exp) * k);
    out.radius = admissible_r(mesh, out.alpha, ambient_exp);
    const DiscreteMeasure measure = build_measure(mesh);
    out.packing = construct_sets(mesh, measure, out.K, out.alpha, out.radius.r, {ambient_exp, true, 2});
    out.log2_thm3_rhs = (2.0 / m) * (std::log2(k / vol) + std::log2(L_hat)) + log2_packing_constant(m, ambient_exp);
    out.thm3_rhs = std::exp2(out.log2_thm3_rhs);
    if (!out.packing.success) return out;

    out.functions = test_functions(mesh, pair, out.packing, spectrum);
    for (const auto& row : out.functions.rows) {
        if (row.support_mass < vol / k) {
            out.kept.push_back(row.set);
            out.max_kept_rayleigh = std::max(out.max_kept_rayleigh, row.rayleigh);
        }
    }
    out.filter_triggered = static_cast<int>(out.kept.size()) < out.K;
    out.lambda_k = spectrum.eigenvalues[k];
    out.minmax_pass = static_cast<int>(out.kept.size()) >= k + 1 &&
        out.lambda_k <= out.max_kept_rayleigh + 1e-6 * std::max(1.0, out.lambda_k);
    out.thm3_pass = out.functions.max_rayleigh <= out.thm3_rhs;
    out.pass = out.functions.all_pass && out.minmax_pass && out.thm3_pass;
    return out;
}

} // namespace specbounds
