#include <specbounds/bounds.hpp>
#include <specbounds/error.hpp>
#include <specbounds/implicit.hpp>
#include <specbounds/invariants.hpp>
#include <specbounds/laplace.hpp>
#include <specbounds/packing.hpp>
#include <specbounds/report.hpp>
#include <specbounds/sources.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace specbounds;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
    // mesh source
    std::string mesh;
    bool allow_disconnected = false;
    int degree = 0;  // 0: take it from the source when known

    // gen
    std::string kind;
    int subdiv = 3;
    double radius = 1.0;
    double R = 2.0;
    double r = 0.0;  // torus minor radius for gen, fixed packing radius for pack
    int nu = 64;
    int nv = 32;
    double a = 2.0, b = 1.0, c = 1.0;
    std::string poly;
    int res = 64;
    std::string bbox;
    double sep = 100.0;

    // pipeline
    int k = 10;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    int lines = 10000;
    int centers = 200;
    int radii = 24;
    int grid = 1024;
    int planes = 200;
    std::string select;
    int replay_k = 2;

    // packing
    int K = 0;
    std::string alpha_policy = "replay";
    double alpha = 0.0;
    bool no_enforce = false;

    std::string out;
};

// Tags errors with the pipeline stage that raised them.
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error(what)
        , stage(stage)
    {
    }
    std::string stage;
};

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::string seed_line(const RunConfig& cfg) { return "# seed=" + std::to_string(cfg.seed) + "\n"; }

Json config_json(const RunConfig& cfg)
{
    return Json{
        {"mesh", cfg.mesh},
        {"k", cfg.k},
        {"tol", cfg.tol},
        {"seed", cfg.seed},
        {"lines", cfg.lines},
        {"centers", cfg.centers},
        {"radii", cfg.radii},
        {"grid", cfg.grid},
        {"planes", cfg.planes},
        {"degree", cfg.degree},
        {"select", cfg.select},
    };
}

fs::path out_dir(const RunConfig& cfg)
{
    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    fs::create_directories(dir);
    return dir;
}

MeshSource load_source(const RunConfig& cfg)
{
    return stage("mesh", [&] {
        if (cfg.mesh.empty()) throw_precondition("--mesh is required");
        ValidationOptions opts;
        opts.allow_disconnected = cfg.allow_disconnected;
        return mesh_from_source(cfg.mesh, opts);
    });
}

std::optional<int> degree_of(const RunConfig& cfg, const MeshSource& src)
{
    if (cfg.degree > 0) return cfg.degree;
    return src.degree;
}

Aabb parse_bbox(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    if (v.size() != 6) throw Error(ErrorKind::Parse, "--bbox needs six comma-separated numbers");
    Aabb box;
    box.extend(Vec3(v[0], v[1], v[2]));
    box.extend(Vec3(v[3], v[4], v[5]));
    return box;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_gen(const RunConfig& cfg)
{
    TriMesh mesh = stage("gen", [&]() -> TriMesh {
        if (cfg.kind == "icosphere") return gen_icosphere(cfg.subdiv, cfg.radius);
        if (cfg.kind == "torus") return gen_torus(cfg.R, cfg.r > 0.0 ? cfg.r : 1.0, cfg.nu, cfg.nv);
        if (cfg.kind == "ellipsoid") return scaled(gen_icosphere(cfg.subdiv, 1.0), Vec3(cfg.a, cfg.b, cfg.c));
        if (cfg.kind == "two-spheres") {
            const TriMesh unit = gen_icosphere(cfg.subdiv, 1.0);
            return merged({unit, translated(unit, Vec3(0.0, 0.0, cfg.sep))});
        }
        if (cfg.kind == "implicit") {
            if (cfg.poly.empty()) throw_precondition("implicit needs --poly");
            const std::string text = fs::exists(cfg.poly) ? read_file(cfg.poly) : cfg.poly;
            const Polynomial p = Polynomial::parse(text);
            Aabb box;
            if (cfg.bbox.empty()) {
                box.extend(Vec3::Constant(-2.0));
                box.extend(Vec3::Constant(2.0));
            } else {
                box = parse_bbox(cfg.bbox);
            }
            return gen_implicit(p, box, cfg.res).mesh;
        }
        throw_precondition("unknown generator '" + cfg.kind + "'");
    });
    const fs::path path = cfg.out.empty() ? fs::path(cfg.kind + ".off") : fs::path(cfg.out);
    stage("io", [&] {
        save_off(mesh, path);
        return 0;
    });
    const MeshStats st = mesh_stats(mesh);
    std::printf("wrote %s: V=%d F=%d genus=%d components=%d\n", path.string().c_str(), mesh.vertex_count(),
        mesh.face_count(), st.genus, st.components);
    return 0;
}

Spectrum run_spectrum(const RunConfig& cfg, const SpectralPair& pair)
{
    return stage("laplace", [&] { return eigs(pair, cfg.k, cfg.tol); });
}

int cmd_spectrum(const RunConfig& cfg)
{
    const MeshSource src = load_source(cfg);
    const SpectralPair pair = stage("laplace", [&] { return assemble(src.mesh); });
    const Spectrum sp = run_spectrum(cfg, pair);
    const fs::path dir = out_dir(cfg);
    write_text(dir / "spectrum.csv", seed_line(cfg) + spectrum_csv(sp));
    for (std::size_t j = 0; j < sp.eigenvalues.size(); ++j) {
        std::printf("%zu %s %s\n", j, format_double(sp.eigenvalues[j]).c_str(), format_double(sp.normalized[j]).c_str());
    }
    return 0;
}

int cmd_index(const RunConfig& cfg)
{
    const MeshSource src = load_source(cfg);
    const auto idx = stage("invariants", [&] { return intersection_index(src.mesh, cfg.lines, cfg.seed); });
    Json j = to_json(idx);
    const auto degree = degree_of(cfg, src);
    bool pass = idx.odd_lines == 0;
    if (degree) {
        j["degree_bound"] = *degree;
        j["milnor_pass"] = idx.i_hat <= *degree;
        pass = pass && idx.i_hat <= *degree;
    }
    write_text(out_dir(cfg) / "index.json", dump_json(j));
    std::printf("i_hat=%d odd_lines=%lld rejected=%lld\n", idx.i_hat, static_cast<long long>(idx.odd_lines),
        static_cast<long long>(idx.rejected));
    return pass ? 0 : 1;
}

int cmd_concentration(const RunConfig& cfg)
{
    const MeshSource src = load_source(cfg);
    const auto conc = stage("invariants", [&] { return concentration(src.mesh, cfg.centers, cfg.radii, cfg.seed); });
    write_text(out_dir(cfg) / "concentration.json", dump_json(to_json(conc)));
    std::printf("L_hat=%s witness_radius=%s\n", format_double(conc.L_hat).c_str(),
        format_double(conc.witness_radius).c_str());
    return 0;
}

int cmd_shadow(const RunConfig& cfg)
{
    const MeshSource src = load_source(cfg);
    const auto idx = stage("invariants", [&] { return intersection_index(src.mesh, cfg.lines, cfg.seed); });
    const auto avg =
        stage("invariants", [&] { return grassmann_average(src.mesh, cfg.planes, cfg.seed, cfg.grid, idx.i_hat); });
    write_text(out_dir(cfg) / "shadow.json", dump_json(to_json(avg)));
    std::printf("avg_shadow=%s rhs=%s mc_error=%s %s\n", format_double(avg.avg_shadow).c_str(),
        format_double(avg.lemma_rhs).c_str(), format_double(avg.mc_error).c_str(), avg.pass ? "pass" : "fail");
    return avg.pass ? 0 : 1;
}

std::set<std::string> parse_select(const std::string& text)
{
    std::set<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.insert(item);
    }
    return out;
}

int cmd_check(const RunConfig& cfg)
{
    const MeshSource src = load_source(cfg);
    const TriMesh& mesh = src.mesh;
    const MeshStats stats = mesh_stats(mesh);
    const SpectralPair pair = stage("laplace", [&] { return assemble(mesh); });
    const Spectrum sp = run_spectrum(cfg, pair);

    GeometricInvariants inv;
    inv.index = stage("invariants", [&] { return intersection_index(mesh, cfg.lines, cfg.seed); });
    inv.concentration = stage("invariants", [&] { return concentration(mesh, cfg.centers, cfg.radii, cfg.seed); });
    double h2 = 0.0;
    stage("invariants", [&] {
        const TriMesh centred = translated(mesh, -barycenter(mesh));
        inv.moment_of_inertia = moment_of_inertia(centred);
        h2 = mean_curvature_energy(mesh);
        return 0;
    });
    const auto avg =
        stage("invariants", [&] { return grassmann_average(mesh, cfg.planes, cfg.seed, cfg.grid, inv.i_hat()); });

    const DimensionConstants consts = constants(2);
    BoundOptions bopts;
    bopts.degree_bound = degree_of(cfg, src);
    bopts.mean_curvature_energy = h2;
    bopts.select = parse_select(cfg.select);
    const BoundReport report = stage("bounds", [&] { return check_bounds(sp, inv, stats, consts, bopts); });
    const WeylTable weyl = stage("bounds", [&] { return weyl_scan(sp, inv, consts); });

    std::optional<ReplayResult> replay;
    if (cfg.replay_k > 0 && 2 * cfg.replay_k + 1 <= static_cast<int>(sp.eigenvalues.size()) && stats.components == 1) {
        replay = stage("packing", [&] { return replay_packing_bound(mesh, pair, sp, cfg.replay_k, inv.L_hat()); });
    }

    const bool pass = report.all_pass() && weyl.pass && avg.pass && (!replay || replay->pass);

    Json j;
    j["config"] = config_json(cfg);
    j["mesh"] = to_json(stats);
    j["mesh"]["vertices"] = mesh.vertex_count();
    j["mesh"]["faces"] = mesh.face_count();
    j["spectrum"] = to_json(sp);
    j["invariants"] = to_json(inv);
    j["mean_curvature_energy"] = h2;
    j["grassmann"] = to_json(avg);
    j["constants"] = to_json(consts);
    j["bounds"] = to_json(report);
    j["weyl"] = to_json(weyl);
    j["packing_replay"] = replay ? to_json(*replay) : Json(nullptr);
    j["pass"] = pass;

    const fs::path dir = out_dir(cfg);
    write_text(dir / "report.json", dump_json(j));
    write_text(dir / "bounds.csv", seed_line(cfg) + bounds_csv(report));
    write_text(dir / "spectrum.csv", seed_line(cfg) + spectrum_csv(sp));
    write_text(dir / "weyl.svg", weyl_svg(weyl));

    for (const auto& r : report.records) {
        std::printf("%-24s %s <= %s  %s\n", r.name.c_str(), format_double(r.lhs).c_str(), format_double(r.rhs).c_str(),
            r.pass ? "pass" : "FAIL");
    }
    std::printf("%-24s sup %s <= 2^%s  %s\n", "Weyl", format_double(weyl.sup_ratio).c_str(),
        format_double(weyl.log2_bound).c_str(), weyl.pass ? "pass" : "FAIL");
    std::printf("%-24s %s >= %s  %s\n", "Grassmann", format_double(avg.avg_shadow).c_str(),
        format_double(avg.lemma_rhs).c_str(), avg.pass ? "pass" : "FAIL");
    if (replay) {
        std::printf("%-24s lambda_%d %s <= %s  %s\n", "PackingReplay", replay->k, format_double(replay->lambda_k).c_str(),
            format_double(replay->max_kept_rayleigh).c_str(), replay->pass ? "pass" : "FAIL");
    }
    std::printf("%s\n", pass ? "ALL PASS" : "SOME CHECKS FAILED");
    return pass ? 0 : 1;
}

int cmd_pack(const RunConfig& cfg)
{
    const MeshSource src = load_source(cfg);
    const TriMesh& mesh = src.mesh;
    const double omega = mesh.total_area();
    const int p3 = 3;
    const double cover = std::pow(8.0, p3);
    const SpectralPair pair = stage("laplace", [&] { return assemble(mesh); });

    Json j;
    j["config"] = config_json(cfg);
    j["config"]["alpha_policy"] = cfg.alpha_policy;
    fs::path dir = out_dir(cfg);

    if (cfg.alpha_policy == "replay") {
        // Replay: K = 2k+1 sets with alpha = omega / (6 8^3 k).
        const int k = cfg.K > 0 ? (cfg.K - 1) / 2 : cfg.replay_k;
        const Spectrum sp = stage("laplace", [&] { return eigs(pair, 2 * k, cfg.tol); });
        const auto conc = stage("invariants", [&] { return concentration(mesh, cfg.centers, cfg.radii, cfg.seed); });
        const ReplayResult rep = stage("packing", [&] { return replay_packing_bound(mesh, pair, sp, k, conc.L_hat, p3); });
        j["replay"] = to_json(rep);
        write_text(dir / "packing.json", dump_json(j));
        write_text(dir / "rayleigh.csv", seed_line(cfg) + rayleigh_csv(rep.functions, rep.packing));
        std::printf("K=%d alpha=%s r=%s success=%d max_R=%s lambda_k=%s %s\n", rep.K, format_double(rep.alpha).c_str(),
            format_double(rep.radius.r).c_str(), rep.packing.success ? 1 : 0,
            format_double(rep.max_kept_rayleigh).c_str(), format_double(rep.lambda_k).c_str(),
            rep.pass ? "pass" : "FAIL");
        if (!rep.packing.success) std::printf("packing failure: %s\n", rep.packing.failure.c_str());
        return rep.pass ? 0 : 1;
    }

    const int K = cfg.K;
    if (K < 1) throw StageError("packing", "--K is required for alpha policy '" + cfg.alpha_policy + "'");
    double alpha = 0.0;
    if (cfg.alpha_policy == "hypothesis") {
        alpha = omega / (2.0 * cover * K);
    } else if (cfg.alpha_policy == "fixed") {
        if (!(cfg.alpha > 0.0)) throw StageError("packing", "--alpha is required for alpha policy 'fixed'");
        alpha = cfg.alpha;
    } else {
        throw StageError("packing", "unknown alpha policy '" + cfg.alpha_policy + "'");
    }

    PackingOptions popts;
    popts.ambient_exp = p3;
    popts.enforce_hypotheses = !cfg.no_enforce;
    double r = cfg.r;
    if (!(r > 0.0)) r = stage("packing", [&] { return admissible_r(mesh, alpha, p3).r; });
    const DiscreteMeasure measure = build_measure(mesh);
    const PackingResult packing = stage("packing", [&] { return construct_sets(mesh, measure, K, alpha, r, popts); });
    j["packing"] = to_json(packing);
    bool pass = packing.success;
    std::string csv = "set,measure,support_mass,support_size,rayleigh,local_bound,global_bound,r,local_pass,global_pass\n";
    if (packing.success) {
        const Spectrum sp = stage("laplace", [&] { return eigs(pair, std::max(1, K - 1), cfg.tol); });
        const TestFunctionReport tf = stage("packing", [&] { return test_functions(mesh, pair, packing, sp); });
        j["test_functions"] = to_json(tf);
        csv = rayleigh_csv(tf, packing);
        pass = tf.all_pass;
        for (const auto& row : tf.rows) {
            std::printf("set %d: mu=%s R=%s local_bound=%s %s\n", row.set, format_double(row.measure).c_str(),
                format_double(row.rayleigh).c_str(), format_double(row.local_bound).c_str(),
                row.local_pass ? "pass" : "FAIL");
        }
    } else {
        std::printf("packing failure: %s\n", packing.failure.c_str());
    }
    j["pass"] = pass;
    write_text(dir / "packing.json", dump_json(j));
    write_text(dir / "rayleigh.csv", seed_line(cfg) + csv);
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Eigenvalue bounds on triangle meshes"};
    app.set_config("--config", "", "flat key = value file; flags on the command line win");
    app.require_subcommand(1);
    RunConfig cfg;

    app.add_option("--mesh", cfg.mesh, "mesh file (.off/.obj) or generator spec");
    app.add_flag("--allow-disconnected", cfg.allow_disconnected, "accept meshes with several components");
    app.add_option("--degree", cfg.degree, "degree of a defining polynomial");
    app.add_option("--subdiv", cfg.subdiv);
    app.add_option("--radius", cfg.radius);
    app.add_option("--R", cfg.R, "torus major radius");
    app.add_option("--r", cfg.r, "torus minor radius (gen) or fixed packing radius (pack)");
    app.add_option("--nu", cfg.nu);
    app.add_option("--nv", cfg.nv);
    app.add_option("--a", cfg.a);
    app.add_option("--b", cfg.b);
    app.add_option("--c", cfg.c);
    app.add_option("--poly", cfg.poly, "polynomial text or a file holding it");
    app.add_option("--res", cfg.res, "marching cubes cells along the longest box side");
    app.add_option("--bbox", cfg.bbox, "x0,y0,z0,x1,y1,z1");
    app.add_option("--sep", cfg.sep, "two-spheres centre separation");
    app.add_option("--k", cfg.k, "highest eigenvalue index")->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "eigen residual tolerance");
    app.add_option("--seed", cfg.seed);
    app.add_option("--lines", cfg.lines)->check(CLI::PositiveNumber);
    app.add_option("--centers", cfg.centers)->check(CLI::NonNegativeNumber);
    app.add_option("--radii", cfg.radii)->check(CLI::PositiveNumber);
    app.add_option("--grid", cfg.grid, "shadow raster resolution")->check(CLI::PositiveNumber);
    app.add_option("--planes", cfg.planes, "random planes for the shadow average")->check(CLI::PositiveNumber);
    app.add_option("--select", cfg.select, "comma-separated bound families");
    app.add_option("--replay-k", cfg.replay_k, "k for the packing replay in check (0 disables)");
    app.add_option("--K", cfg.K, "number of packing sets");
    app.add_option("--alpha-policy", cfg.alpha_policy)->check(CLI::IsMember({"replay", "hypothesis", "fixed"}));
    app.add_option("--alpha", cfg.alpha);
    app.add_flag("--no-enforce", cfg.no_enforce, "skip the alpha hypothesis check");
    app.add_option("--out", cfg.out, "output directory (gen: output file)");

    auto* gen = app.add_subcommand("gen", "write a generated mesh as OFF");
    gen->add_option("kind", cfg.kind, "icosphere | torus | ellipsoid | implicit | two-spheres")->required();
    auto* spectrum = app.add_subcommand("spectrum", "first k+1 eigenvalues");
    auto* index = app.add_subcommand("index", "intersection index estimate");
    auto* conc = app.add_subcommand("concentration", "volume concentration estimate");
    auto* shadow = app.add_subcommand("shadow", "average shadow over random planes");
    auto* check = app.add_subcommand("check", "full pipeline with every bound");
    auto* pack = app.add_subcommand("pack", "packing sets and test functions");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (index->parsed()) return cmd_index(cfg);
        if (conc->parsed()) return cmd_concentration(cfg);
        if (shadow->parsed()) return cmd_shadow(cfg);
        if (check->parsed()) return cmd_check(cfg);
        if (pack->parsed()) return cmd_pack(cfg);
    } catch (const StageError& e) {
        std::fprintf(stderr, "error [%s]: %s\n", e.stage.c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [io]: %s\n", e.what());
        return 2;
    }
    return 2;
}
