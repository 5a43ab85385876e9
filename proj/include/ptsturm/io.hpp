// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ptsturm/coeff.hpp"
#include "ptsturm/spectrum.hpp"

namespace ptsturm {

/// Shortest decimal that round-trips to the same double (at most 17 significant digits).
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated, newline-terminated, no quoting (fields never contain commas).
std::string write_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Builds a profile from a coefficient descriptor:
/// {"kind": "sine"|"piecewise_linear"|"custom", "eps": number,
///  "samples": [[x, fx], ...], "fprime0", "fprimePi", "fsecond0", "fsecondPi"}.
/// eps_override, when given, replaces the descriptor's eps.
CoefficientProfile profile_from_json(const nlohmann::json& descriptor, std::optional<double> eps_override = {});

/// "sine" and "piecewise_linear" name the built-ins; anything else is a
/// path to a descriptor file.
CoefficientProfile load_profile(std::string_view coeff, std::optional<double> eps);

nlohmann::json to_json(const CoefficientProfile& profile);
nlohmann::json to_json(const RealEigsResult& result);
nlohmann::json to_json(const AlphaResult& result);
nlohmann::json to_json(const CertifyResult& result);
nlohmann::json to_json(const DeltaTable& table);

/// Polar heat map of log10 |ρ| with the rays arg z = ±pi/4, ±3pi/4 overlaid.
/// Flagged cells are drawn grey, violating cells outlined.
std::string rho_svg(const RhoMap& map, std::string_view title);

}  // namespace ptsturm
