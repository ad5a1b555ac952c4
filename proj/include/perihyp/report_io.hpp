#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "perihyp/diagnostics.hpp"
#include "perihyp/nonresonance.hpp"
#include "perihyp/problem.hpp"
#include "perihyp/solver.hpp"

namespace perihyp {

using Json = nlohmann::ordered_json;

Json to_json(const Problem& p);
Json to_json(const NonresonanceReport& r);
Json to_json(const std::array<NonresonanceReport, 2>& r);
Json to_json(const SecondOrderNonresonance& r);
Json to_json(const ValidationReport& r);
/// Everything but the solution field (written separately as CSV).
Json to_json(const SolveReport& r);
/// Exponents and flags; the magnitudes go to the Fourier CSV.
Json to_json(const RegularityEstimate& r);
Json to_json(const std::vector<std::complex<double>>& values);

/// Two-space indentation, keys in insertion order, doubles as %.17g,
/// non-finite numbers as null. Identical input gives identical bytes.
std::string dump_json(const Json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
void write_field_csv(const std::filesystem::path& path, const PeriodicField& field);

}  // namespace perihyp
