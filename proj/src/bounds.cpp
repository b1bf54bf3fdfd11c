#include <specbounds/bounds.hpp>
#include <specbounds/error.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace specbounds {

namespace {

constexpr double k_log2_max = 1023.0;

double materialize(double log2_value)
{
    return log2_value < k_log2_max ? std::exp2(log2_value) : std::numeric_limits<double>::infinity();
}

std::string family_of(const std::string& name)
{
    const auto cut = name.find_first_of("([");
    return cut == std::string::npos ? name : name.substr(0, cut);
}

class ReportBuilder {
public:
    ReportBuilder(const BoundOptions& options)
        : m_options(options)
    {
    }

    bool wanted(const std::string& family) const
    {
        return m_options.select.empty() || m_options.select.count(family) > 0;
    }

    // A family the caller named explicitly must have its inputs.
    bool available(const std::string& family, bool have_inputs, const std::string& missing) const
    {
        if (have_inputs) return true;
        if (!m_options.select.empty() && m_options.select.count(family) > 0) {
            throw_precondition("bound " + family + " requested but " + missing + " is missing");
        }
        return false;
    }

    // lhs <= rhs with rhs given as log2 (may be astronomically large).
    void add(const std::string& name, double lhs, double log2_rhs, double tolerance, std::vector<BoundInput> inputs)
    {
        BoundRecord rec;
        rec.name = name;
        rec.lhs = lhs;
        rec.rhs = materialize(log2_rhs);
        rec.slack = rec.rhs - rec.lhs;
        rec.tolerance = tolerance;
        rec.pass = lhs <= 0.0 || std::log2(lhs) <= log2_rhs + std::log2(1.0 + tolerance);
        rec.inputs = std::move(inputs);
        m_report.records.push_back(std::move(rec));
    }

    void add_plain(const std::string& name, double lhs, double rhs, double tolerance, std::vector<BoundInput> inputs)
    {
        BoundRecord rec;
        rec.name = name;
        rec.lhs = lhs;
        rec.rhs = rhs;
        rec.slack = rhs - lhs;
        rec.tolerance = tolerance;
        rec.pass = lhs <= rhs * (1.0 + tolerance) || lhs <= rhs;
        rec.inputs = std::move(inputs);
        m_report.records.push_back(std::move(rec));
    }

    BoundReport take() { return std::move(m_report); }

private:
    const BoundOptions& m_options;
    BoundReport m_report;
};

} // namespace

double vol_sphere(int n)
{
    if (n < 0) throw_precondition("sphere dimension must be >= 0");
    const double h = 0.5 * (n + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double vol_ball(int n)
{
    if (n < 0) throw_precondition("ball dimension must be >= 0");
    const double h = 0.5 * n;
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

DimensionConstants constants(int m)
{
    if (m < 2 || m > 50) throw_precondition("dimension m must lie in [2, 50], got " + std::to_string(m));
    DimensionConstants c;
    c.m = m;
    c.vol_sphere_m = vol_sphere(m);
    c.vol_ball_m = vol_ball(m);
    c.vol_sphere_m_minus_1 = vol_sphere(m - 1);
    c.A_m = 0.5 * (m + 2) * c.vol_sphere_m / c.vol_sphere_m_minus_1;
    const double two_over_m = 2.0 / m;
    const int exponent = 2 * m * m + 14 * m + 24;
    c.log2_C_m = std::log2(6.0) + two_over_m * std::log2(12.0) + 3.0 * exponent;
    c.log2_c_m = c.log2_C_m + two_over_m * std::log2(0.5 * c.vol_sphere_m);
    if (c.log2_C_m < k_log2_max) c.C_m = std::exp2(c.log2_C_m);
    if (c.log2_c_m < k_log2_max) c.c_m = std::exp2(c.log2_c_m);
    c.nash_p = 2 * m * m + 5 * m;
    return c;
}

double log2_packing_constant(int m, int ambient_exp)
{
    const double n = ambient_exp;
    return std::log2(6.0) + 3.0 * n + (2.0 / m) * (std::log2(12.0) + 6.0 * n);
}

bool BoundReport::all_pass() const
{
    for (const auto& r : records) {
        if (!r.pass) return false;
    }
    return true;
}

const BoundRecord* BoundReport::find(const std::string& name) const
{
    for (const auto& r : records) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

BoundReport check_bounds(
    const Spectrum& spectrum,
    const GeometricInvariants& inv,
    const MeshStats& stats,
    const DimensionConstants& consts,
    const BoundOptions& options)
{
    if (consts.m != 2) throw_precondition("eigenvalue checks are implemented for surfaces (m = 2) only");
    if (spectrum.eigenvalues.size() < 2) throw_precondition("bound checks need lambda_0 and lambda_1");
    ReportBuilder out(options);
    const int m = consts.m;
    const double two_over_m = 2.0 / m;
    const double vol = stats.area;
    const double lambda1 = spectrum.eigenvalues[1];
    const double lhs1 = lambda1 * std::pow(vol, two_over_m);
    const int i_hat = inv.i_hat();
    const double eq_tol = options.equality_tolerance;

    const BoundInput in_lambda1{"lambda_1", lambda1, "measured"};
    const BoundInput in_vol{"Vol", vol, "measured"};
    const BoundInput in_i{"i_hat", static_cast<double>(i_hat), "measured"};

    if (out.wanted("Hersch") && stats.genus == 0) {
        out.add_plain("Hersch", lhs1, 2.0 * consts.vol_sphere_m, eq_tol,
            {in_lambda1, in_vol, {"lambda_1(S^2) Vol(S^2)", 2.0 * consts.vol_sphere_m, "constant"}});
    }
    if (out.wanted("ElSoufiIlias_genus")) {
        const double rhs = 8.0 * std::numbers::pi * std::floor((stats.genus + 3) / 2.0);
        out.add_plain("ElSoufiIlias_genus", lhs1, rhs, stats.genus == 0 ? eq_tol : options.tolerance,
            {in_lambda1, in_vol, {"genus", static_cast<double>(stats.genus), "measured"}});
    }
    if (out.wanted("Reilly") &&
        out.available("Reilly", options.mean_curvature_energy.has_value(), "the mean-curvature energy")) {
        const double energy = *options.mean_curvature_energy;
        // lambda_1 <= m / Vol |H|^2, multiplied through by Vol.
        out.add_plain("Reilly", lambda1 * vol, m * energy, eq_tol,
            {in_lambda1, in_vol, {"|H|_2^2", energy, "measured"}});
    }

    struct IndexSource {
        std::string suffix;
        int value;
        std::string provenance;
    };
    std::vector<IndexSource> indices{{"", i_hat, "measured"}};
    if (options.degree_bound) indices.push_back({"[degree]", *options.degree_bound, "degree bound"});

    if (out.wanted("Thm1") && out.available("Thm1", i_hat > 0, "the intersection index")) {
        for (const auto& idx : indices) {
            const double log2_rhs = std::log2(consts.A_m) + (1.0 + two_over_m) * std::log2(idx.value / 2.0) +
                std::log2(static_cast<double>(m)) + two_over_m * std::log2(consts.vol_sphere_m);
            out.add("Thm1" + idx.suffix, lhs1, log2_rhs, options.tolerance,
                {in_lambda1, in_vol, {"i", static_cast<double>(idx.value), idx.provenance},
                    {"A(m)", consts.A_m, "constant"}});
        }
    }

    const int k_max = std::min<int>(options.max_k, static_cast<int>(spectrum.eigenvalues.size()) - 1);
    if (out.wanted("Thm2") && out.available("Thm2", i_hat > 0, "the intersection index")) {
        for (int k = 1; k <= k_max; ++k) {
            const double lhs = spectrum.eigenvalues[k] * std::pow(vol, two_over_m);
            for (const auto& idx : indices) {
                const double log2_rhs =
                    consts.log2_c_m + two_over_m * std::log2(static_cast<double>(idx.value)) + two_over_m * std::log2(k);
                out.add("Thm2(k=" + std::to_string(k) + ")" + idx.suffix, lhs, log2_rhs, options.tolerance,
                    {{"lambda_k", spectrum.eigenvalues[k], "measured"}, in_vol,
                        {"i", static_cast<double>(idx.value), idx.provenance},
                        {"log2 c(m)", consts.log2_c_m, "constant"}});
            }
        }
    }
    if (out.wanted("Thm3") && out.available("Thm3", inv.L_hat() > 0.0 && i_hat > 0, "L_hat or i_hat")) {
        const double surrogate = 0.5 * i_hat * consts.vol_sphere_m;
        for (int k = 1; k <= k_max; ++k) {
            const double lhs = spectrum.eigenvalues[k] * std::pow(vol, two_over_m);
            const std::string base = "Thm3(k=" + std::to_string(k) + ")";
            const std::vector<std::pair<std::string, BoundInput>> sources{
                {"[L_hat]", {"L", inv.L_hat(), "measured"}},
                {"[fundprop]", {"L", surrogate, "surrogate"}},
            };
            for (const auto& [suffix, input] : sources) {
                const double log2_rhs = consts.log2_C_m + two_over_m * std::log2(input.value) + two_over_m * std::log2(k);
                out.add(base + suffix, lhs, log2_rhs, options.tolerance,
                    {{"lambda_k", spectrum.eigenvalues[k], "measured"}, in_vol, input,
                        {"log2 C(m)", consts.log2_C_m, "constant"}});
            }
        }
    }
    if (out.wanted("Milnor_degree") && options.degree_bound) {
        out.add_plain("Milnor_degree", i_hat, *options.degree_bound, 0.0,
            {in_i, {"N", static_cast<double>(*options.degree_bound), "degree bound"}});
    } else if (!options.select.empty() && options.select.count("Milnor_degree") && !options.degree_bound) {
        throw_precondition("bound Milnor_degree requested but the degree bound is missing");
    }

    const bool have_moment = inv.moment_of_inertia.has_value();
    if (out.wanted("eqlambda") && out.available("eqlambda", have_moment, "the moment of inertia")) {
        const double moment = *inv.moment_of_inertia;
        // lambda_1 * moment <= m Vol, divided by Vol.
        out.add_plain("eqlambda", lambda1 * moment / vol, m, options.tolerance,
            {in_lambda1, in_vol, {"moment", moment, "measured"}});
    }
    if (out.wanted("eqint") && out.available("eqint", have_moment && i_hat > 0, "the moment of inertia")) {
        const double moment = *inv.moment_of_inertia;
        const double ball_second_moment = consts.vol_sphere_m_minus_1 / (m + 2);
        const double lower =
            2.0 * std::pow(2.0 * vol / (i_hat * consts.vol_sphere_m), 1.0 + two_over_m) * ball_second_moment;
        out.add_plain("eqint", lower / (vol * vol), moment / (vol * vol), options.tolerance,
            {in_vol, in_i, {"moment", moment, "measured"}});
    }
    for (const auto& name : options.select) {
        static const std::set<std::string> known{"Hersch", "ElSoufiIlias_genus", "Reilly", "Thm1", "Thm2", "Thm3",
            "Milnor_degree", "eqlambda", "eqint"};
        if (!known.count(family_of(name))) throw_precondition("unknown inequality '" + name + "'");
    }
    return out.take();
}

WeylTable weyl_scan(const Spectrum& spectrum, const GeometricInvariants& inv, const DimensionConstants& consts)
{
    if (spectrum.eigenvalues.size() < 2) throw_precondition("weyl_scan needs at least lambda_0 and lambda_1");
    if (inv.i_hat() < 1) throw_precondition("weyl_scan needs an intersection index");
    const double two_over_m = 2.0 / consts.m;
    WeylTable table;
    for (std::size_t k = 1; k < spectrum.eigenvalues.size(); ++k) {
        const double ratio = spectrum.eigenvalues[k] * std::pow(spectrum.area, two_over_m) /
            std::pow(static_cast<double>(k), two_over_m);
        table.rows.push_back({static_cast<int>(k), ratio});
        if (ratio > table.sup_ratio) {
            table.sup_ratio = ratio;
            table.sup_k = static_cast<int>(k);
        }
    }
    table.log2_bound = consts.log2_c_m + two_over_m * std::log2(static_cast<double>(inv.i_hat()));
    table.bound = materialize(table.log2_bound);
    table.pass = table.sup_ratio <= 0.0 || std::log2(table.sup_ratio) <= table.log2_bound;
    return table;
}

} // namespace specbounds
