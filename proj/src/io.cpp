// SPDX-License-Identifier: Apache-2.0

#include "ptsturm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace ptsturm {
namespace {

using nlohmann::json;

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw_invalid(fmt::format("descriptor field '{}' must be a number", key));
  return j[key].get<double>();
}

// Diverging blue-white-red ramp over t in [-1, 1].
std::string ramp(double t) {
  t = std::clamp(t, -1.0, 1.0);
  const auto mix = [](double a, double b, double s) { return static_cast<int>(std::lround(a + (b - a) * s)); };
  int r, g, b;
  if (t < 0.0) {
    r = mix(255, 33, -t);
    g = mix(255, 102, -t);
    b = mix(255, 172, -t);
  } else {
    r = mix(255, 178, t);
    g = mix(255, 24, t);
    b = mix(255, 43, t);
  }
  return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view row = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    std::vector<std::string> fields;
    for (;;) {
      const auto comma = row.find(',');
      fields.emplace_back(row.substr(0, comma));
      if (comma == std::string_view::npos) break;
      row.remove_prefix(comma + 1);
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) throw_invalid("CSV row width differs from header");
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_invalid(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) throw_invalid(fmt::format("write to {} failed", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CoefficientProfile profile_from_json(const json& d, std::optional<double> eps_override) {
  if (!d.is_object()) throw_invalid("coefficient descriptor must be a JSON object");
  if (!d.contains("kind") || !d["kind"].is_string()) throw_invalid("descriptor needs a string 'kind'");
  const std::string kind = d["kind"].get<std::string>();
  const std::optional<double> eps = eps_override ? eps_override : optional_number(d, "eps");
  if (!eps) throw_invalid("descriptor has no 'eps' and none was given");
  if (kind == "sine") return make_sine(*eps);
  if (kind == "piecewise_linear") return make_piecewise_linear(*eps);
  if (kind != "custom") throw_invalid(fmt::format("unknown coefficient kind '{}'", kind));

  if (!d.contains("samples") || !d["samples"].is_array()) throw_invalid("custom descriptor needs 'samples'");
  std::vector<std::pair<double, double>> samples;
  for (const auto& s : d["samples"]) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number()) {
      throw_invalid("each sample must be [x, fx]");
    }
    samples.emplace_back(s[0].get<double>(), s[1].get<double>());
  }
  EndpointDerivatives ends;
  ends.fprime0 = optional_number(d, "fprime0").value_or(kFPrimeZero);
  ends.fprime_pi = optional_number(d, "fprimePi").value_or(-kFPrimeZero);
  ends.fsecond0 = optional_number(d, "fsecond0");
  ends.fsecond_pi = optional_number(d, "fsecondPi");
  return make_custom(samples, *eps, ends);
}

CoefficientProfile load_profile(std::string_view coeff, std::optional<double> eps) {
  if (coeff == "sine" || coeff == "piecewise_linear") {
    if (!eps) throw_invalid("--eps is required for built-in coefficients");
    return coeff == "sine" ? make_sine(*eps) : make_piecewise_linear(*eps);
  }
  json d;
  try {
    d = json::parse(read_file(std::string(coeff)));
  } catch (const json::exception& e) {
    throw_invalid(fmt::format("descriptor {}: {}", coeff, e.what()));
  }
  return profile_from_json(d, eps);
}

json to_json(const CoefficientProfile& p) {
  json j{{"id", p.id()}, {"kind", to_string(p.kind())}, {"eps", p.eps()}, {"fprime0", p.fprime0()},
         {"fprimePi", p.fprime_pi()}};
  if (p.fsecond0()) j["fsecond0"] = *p.fsecond0();
  if (p.fsecond_pi()) j["fsecondPi"] = *p.fsecond_pi();
  j["breakpoints"] = std::vector<double>(p.breakpoints().begin(), p.breakpoints().end());
  return j;
}

json to_json(const RealEigsResult& r) {
  json eigs = json::array();
  for (const auto& e : r.eigs) eigs.push_back({{"lambda", e.lambda}, {"residual", e.residual}});
  return {{"real_eigs", eigs},
          {"trivial_root", {{"lambda", 0.0}, {"residual", r.trivial_root_residual}, {"eigenfunction", "constant"}}},
          {"refinements", r.refinements}};
}

json to_json(const AlphaResult& r) {
  return {{"r", r.r}, {"alphas", r.alphas}, {"residuals", r.residuals}, {"refinements", r.refinements}};
}

json to_json(const CertifyResult& c) {
  return {{"box", {c.box.re0, c.box.re1, c.box.im0, c.box.im1}},
          {"winding", c.winding},
          {"count", c.count},
          {"expected", c.expected},
          {"ok", c.ok},
          {"samples", c.samples},
          {"nudges", c.nudges}};
}

json to_json(const DeltaTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"delta", r.delta}, {"fprime0", r.fprime0}, {"lambdas", r.lambdas}, {"differences", r.differences}});
  }
  return {{"reference", t.reference}, {"rows", rows}};
}

std::string rho_svg(const RhoMap& map, std::string_view title) {
  constexpr double kSize = 640.0;
  constexpr double kMargin = 40.0;
  const double centre = kSize / 2.0;
  double r_max = 0.0;
  double r_min = std::numeric_limits<double>::infinity();
  double span = 0.0;  // colour scale: max |log10 |ρ|| over unflagged cells
  for (const auto& c : map.cells) {
    r_max = std::max(r_max, c.radius);
    r_min = std::min(r_min, c.radius);
    if (!c.pole_proximity && c.modulus > 0.0 && std::isfinite(c.modulus)) {
      span = std::max(span, std::abs(std::log10(c.modulus)));
    }
  }
  if (span == 0.0) span = 1.0;
  const double scale = (centre - kMargin) / r_max;
  const double dr = map.radii > 1 ? (r_max - r_min) / (map.radii - 1) : r_max;
  const double da = 2.0 * kPi / map.angles;
  auto px = [&](double r, double a) { return fmt::format("{:.2f},{:.2f}", centre + scale * r * std::cos(a), centre - scale * r * std::sin(a)); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{2}</text>\n",
      kSize, kMargin, title);
  for (const auto& c : map.cells) {
    const double r0 = std::max(0.0, c.radius - dr / 2.0);
    const double r1 = c.radius + dr / 2.0;
    const double a0 = c.angle - da / 2.0;
    const double a1 = c.angle + da / 2.0;
    const std::string fill = c.pole_proximity ? "#999999" : ramp(std::log10(c.modulus) / span);
    const std::string stroke = c.violates_claim ? " stroke=\"black\" stroke-width=\"1.5\"" : "";
    svg += fmt::format("<path d=\"M{} L{} A{:.2f},{:.2f} 0 0 0 {} L{} A{:.2f},{:.2f} 0 0 1 {} Z\" fill=\"{}\"{}/>\n",
                       px(r0, a0), px(r1, a0), scale * r1, scale * r1, px(r1, a1), px(r0, a1), scale * r0,
                       scale * r0, px(r0, a0), fill, stroke);
  }
  for (int k = 0; k < 4; ++k) {
    const double a = kPi / 4.0 + k * kPi / 2.0;
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" "
                       "stroke-dasharray=\"6,4\"/>\n",
                       centre, centre, centre + scale * (r_max + dr) * std::cos(a),
                       centre - scale * (r_max + dr) * std::sin(a));
  }
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">blue |rho| &lt; 1, red |rho| &gt; 1, "
      "grey: pole/zero proximity; colour range log10|rho| in [-{:.3g}, {:.3g}]</text>\n</svg>\n",
      kMargin, kSize - 12.0, span, span);
  return svg;
}

}  // namespace ptsturm
