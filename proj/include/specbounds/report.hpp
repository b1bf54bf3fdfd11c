#pragma once

#include <specbounds/bounds.hpp>
#include <specbounds/invariants.hpp>
#include <specbounds/laplace.hpp>
#include <specbounds/mesh.hpp>
#include <specbounds/packing.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>

namespace specbounds {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values become "inf", "-inf" or "nan".
std::string format_double(double value);

/// Deterministic JSON text with every float at 17 significant digits.
/// Non-finite floats are written as null.
std::string dump_json(const Json& value, int indent = 2);

Json to_json(const MeshStats& stats);
Json to_json(const Spectrum& spectrum);
Json to_json(const IntersectionIndexResult& index);
Json to_json(const ConcentrationResult& conc);
Json to_json(const GeometricInvariants& inv);
Json to_json(const ShadowResult& shadow);
Json to_json(const GrassmannResult& avg);
Json to_json(const DimensionConstants& consts);
Json to_json(const BoundReport& report);
Json to_json(const WeylTable& table);
Json to_json(const PackingResult& packing);
Json to_json(const TestFunctionReport& functions);
Json to_json(const ReplayResult& replay);

std::string bounds_csv(const BoundReport& report);
std::string spectrum_csv(const Spectrum& spectrum);
std::string rayleigh_csv(const TestFunctionReport& functions, const PackingResult& packing);

/// Line plot of lambda_k Vol / k^{2/m} against k.
std::string weyl_svg(const WeylTable& table);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace specbounds
