#include <specbounds/error.hpp>
#include <specbounds/report.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specbounds {

namespace {

void dump_into(const Json& value, int indent, int depth, std::string& out)
{
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
    switch (value.type()) {
    case Json::value_t::object: {
        if (value.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            out += Json(it.key()).dump();
            out += ": ";
            dump_into(it.value(), indent, depth + 1, out);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (value.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& item : value) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            dump_into(item, indent, depth + 1, out);
        }
        out += "\n" + close_pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = value.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    default:
        out += value.dump();
    }
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json doubles(const std::vector<double>& values)
{
    Json a = Json::array();
    for (double v : values) a.push_back(v);
    return a;
}

} // namespace

std::string format_double(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string dump_json(const Json& value, int indent)
{
    std::string out;
    dump_into(value, indent, 0, out);
    out += "\n";
    return out;
}

Json to_json(const MeshStats& stats)
{
    return Json{
        {"area", stats.area},
        {"genus", stats.genus},
        {"euler_char", stats.euler_char},
        {"components", stats.components},
        {"barycenter", vec_json(stats.barycenter)},
        {"bounding_box", {{"lo", vec_json(stats.bounding_box.lo)}, {"hi", vec_json(stats.bounding_box.hi)}}},
    };
}

Json to_json(const Spectrum& spectrum)
{
    Json clusters = Json::array();
    for (const auto& c : spectrum.clusters) {
        clusters.push_back({{"value", c.value}, {"first", c.first}, {"multiplicity", c.multiplicity}});
    }
    return Json{
        {"k_requested", spectrum.k_requested},
        {"area", spectrum.area},
        {"eigenvalues", doubles(spectrum.eigenvalues)},
        {"normalized", doubles(spectrum.normalized)},
        {"residuals", doubles(spectrum.residuals)},
        {"clusters", clusters},
        {"restarts", spectrum.restarts},
    };
}

Json to_json(const IntersectionIndexResult& index)
{
    Json hist = Json::object();
    for (const auto& [count, freq] : index.histogram) hist[std::to_string(count)] = freq;
    return Json{
        {"i_hat", index.i_hat},
        {"histogram", hist},
        {"odd_lines", index.odd_lines},
        {"rejected", index.rejected},
        {"n_lines", index.n_lines},
        {"seed", index.seed},
        {"eps", index.eps},
    };
}

Json to_json(const ConcentrationResult& conc)
{
    return Json{
        {"L_hat", conc.L_hat},
        {"witness", {{"center", vec_json(conc.witness_center)}, {"radius", conc.witness_radius}}},
        {"probe_centers", conc.probe_centers},
        {"n_centers", conc.n_centers},
        {"n_radii", conc.n_radii},
        {"seed", conc.seed},
    };
}

Json to_json(const GeometricInvariants& inv)
{
    Json j{{"index", to_json(inv.index)}, {"concentration", to_json(inv.concentration)}};
    j["moment_of_inertia"] = inv.moment_of_inertia ? Json(*inv.moment_of_inertia) : Json(nullptr);
    return j;
}

Json to_json(const ShadowResult& shadow)
{
    return Json{
        {"direction", vec_json(shadow.direction)},
        {"shadow_area", shadow.shadow_area},
        {"signed_mass", shadow.signed_mass},
        {"error_bound", shadow.error_bound},
        {"grid_resolution", shadow.grid_resolution},
        {"cell_size", shadow.cell_size},
    };
}

Json to_json(const GrassmannResult& avg)
{
    return Json{
        {"avg_shadow", avg.avg_shadow},
        {"std_error", avg.std_error},
        {"mean_error_bound", avg.mean_error_bound},
        {"mc_error", avg.mc_error},
        {"lemma_rhs", avg.lemma_rhs},
        {"pass", avg.pass},
        {"n_planes", avg.n_planes},
        {"i_hat", avg.i_hat},
        {"grid_resolution", avg.grid_resolution},
        {"seed", avg.seed},
    };
}

Json to_json(const DimensionConstants& c)
{
    return Json{
        {"m", c.m},
        {"vol_sphere_m", c.vol_sphere_m},
        {"vol_ball_m", c.vol_ball_m},
        {"vol_sphere_m_minus_1", c.vol_sphere_m_minus_1},
        {"A_m", c.A_m},
        {"log2_C_m", c.log2_C_m},
        {"log2_c_m", c.log2_c_m},
        {"C_m", c.C_m ? Json(*c.C_m) : Json(nullptr)},
        {"c_m", c.c_m ? Json(*c.c_m) : Json(nullptr)},
        {"nash_p", c.nash_p},
    };
}

Json to_json(const BoundReport& report)
{
    Json records = Json::array();
    for (const auto& r : report.records) {
        Json inputs = Json::array();
        for (const auto& in : r.inputs) {
            inputs.push_back({{"name", in.name}, {"value", in.value}, {"provenance", in.provenance}});
        }
        records.push_back({
            {"name", r.name},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"slack", r.slack},
            {"pass", r.pass},
            {"tolerance", r.tolerance},
            {"inputs", inputs},
        });
    }
    return Json{{"all_pass", report.all_pass()}, {"records", records}};
}

Json to_json(const WeylTable& table)
{
    Json rows = Json::array();
    for (const auto& row : table.rows) rows.push_back({{"k", row.k}, {"ratio", row.ratio}});
    return Json{
        {"rows", rows},
        {"sup_ratio", table.sup_ratio},
        {"sup_k", table.sup_k},
        {"bound", table.bound},
        {"log2_bound", table.log2_bound},
        {"pass", table.pass},
    };
}

Json to_json(const PackingResult& packing)
{
    Json sets = Json::array();
    for (const auto& s : packing.sets) sets.push_back(s);
    return Json{
        {"success", packing.success},
        {"failure", packing.failure},
        {"K", packing.K},
        {"sets_built", packing.sets_built},
        {"r", packing.r},
        {"alpha", packing.alpha},
        {"ambient_exp", packing.ambient_exp},
        {"measures", doubles(packing.measures)},
        {"min_pairwise_distance", packing.min_pairwise_distance},
        {"sets", sets},
    };
}

Json to_json(const TestFunctionReport& functions)
{
    Json rows = Json::array();
    for (const auto& row : functions.rows) {
        rows.push_back({
            {"set", row.set},
            {"measure", row.measure},
            {"support_mass", row.support_mass},
            {"support_size", row.support_size},
            {"rayleigh", row.rayleigh},
            {"local_bound", row.local_bound},
            {"global_bound", row.global_bound},
            {"local_pass", row.local_pass},
            {"global_pass", row.global_pass},
        });
    }
    return Json{
        {"rows", rows},
        {"supports_disjoint", functions.supports_disjoint},
        {"supports_separated", functions.supports_separated},
        {"max_rayleigh", functions.max_rayleigh},
        {"lambda_K_minus_1", functions.lambda_K_minus_1},
        {"minmax_pass", functions.minmax_pass},
        {"all_pass", functions.all_pass},
    };
}

Json to_json(const ReplayResult& replay)
{
    return Json{
        {"k", replay.k},
        {"K", replay.K},
        {"alpha", replay.alpha},
        {"r", replay.radius.r},
        {"r_witness", vec_json(replay.radius.witness)},
        {"r_max_ball_measure", replay.radius.max_ball_measure},
        {"packing", to_json(replay.packing)},
        {"functions", to_json(replay.functions)},
        {"kept", replay.kept},
        {"filter_triggered", replay.filter_triggered},
        {"max_kept_rayleigh", replay.max_kept_rayleigh},
        {"lambda_k", replay.lambda_k},
        {"minmax_pass", replay.minmax_pass},
        {"thm3_rhs", replay.thm3_rhs},
        {"log2_thm3_rhs", replay.log2_thm3_rhs},
        {"thm3_pass", replay.thm3_pass},
        {"pass", replay.pass},
    };
}

std::string bounds_csv(const BoundReport& report)
{
    std::string out = "name,lhs,rhs,slack,pass\n";
    for (const auto& r : report.records) {
        out += r.name + "," + format_double(r.lhs) + "," + format_double(r.rhs) + "," + format_double(r.slack) + "," +
            (r.pass ? "pass" : "fail") + "\n";
    }
    return out;
}

std::string spectrum_csv(const Spectrum& spectrum)
{
    std::string out = "j,eigenvalue,normalized,residual\n";
    for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j) {
        out += std::to_string(j) + "," + format_double(spectrum.eigenvalues[j]) + "," +
            format_double(spectrum.normalized[j]) + "," + format_double(spectrum.residuals[j]) + "\n";
    }
    return out;
}

std::string rayleigh_csv(const TestFunctionReport& functions, const PackingResult& packing)
{
    std::string out = "set,measure,support_mass,support_size,rayleigh,local_bound,global_bound,r,local_pass,global_pass\n";
    for (const auto& row : functions.rows) {
        out += std::to_string(row.set) + "," + format_double(row.measure) + "," + format_double(row.support_mass) +
            "," + std::to_string(row.support_size) + "," + format_double(row.rayleigh) + "," +
            format_double(row.local_bound) + "," + format_double(row.global_bound) + "," + format_double(packing.r) +
            "," + (row.local_pass ? "pass" : "fail") + "," + (row.global_pass ? "pass" : "fail") + "\n";
    }
    return out;
}

std::string weyl_svg(const WeylTable& table)
{
    constexpr double width = 640.0;
    constexpr double height = 400.0;
    constexpr double margin = 50.0;
    const double k_max = table.rows.empty() ? 1.0 : std::max(1, table.rows.back().k);
    double y_max = 0.0;
    for (const auto& row : table.rows) y_max = std::max(y_max, row.ratio);
    if (!(y_max > 0.0)) y_max = 1.0;
    y_max *= 1.1;
    auto px = [&](double k) { return margin + (width - 2 * margin) * (k - 1.0) / std::max(1.0, k_max - 1.0); };
    auto py = [&](double v) { return height - margin - (height - 2 * margin) * v / y_max; };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = y_max * t / 4.0;
        svg << "<text x=\"" << margin - 6 << "\" y=\"" << num(py(v) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
            << num(v) << "</text>\n";
    }
    svg << "<text x=\"" << margin << "\" y=\"" << height - margin + 18 << "\" font-size=\"11\">1</text>\n";
    svg << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
        << "\" font-size=\"11\" text-anchor=\"end\">" << static_cast<int>(k_max) << "</text>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" font-size=\"13\" text-anchor=\"middle\">k</text>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" font-size=\"13\" text-anchor=\"middle\">"
        << "lambda_k Vol / k (sup " << num(table.sup_ratio) << ", bound 2^" << num(table.log2_bound) << ")</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : table.rows) svg << num(px(row.k)) << "," << num(py(row.ratio)) << " ";
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace specbounds
