// SPDX-License-Identifier: Apache-2.0
//
// ptsturm: command-line front end. Every run writes manifest.json into --out;
// failures also write error.json there (and print it to stderr).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptsturm/io.hpp"
#include "ptsturm/parallel.hpp"
#include "ptsturm/shoot.hpp"
#include "ptsturm/spectrum.hpp"
#include "ptsturm/verify.hpp"

#ifndef PTSTURM_VERSION
#define PTSTURM_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ptsturm;

namespace {

enum Exit { kOk = 0, kUsage = 1, kVerifyFailed = 2, kNumeric = 3 };

struct Config {
  std::string command;
  std::string coeff = "sine";
  std::optional<double> eps;
  int count = 8;
  std::string grid = "16x64";
  double r_min = 0.25;
  double r_max = 4.0;
  std::string box;
  std::string out = "ptsturm_out";
  std::optional<double> tol_ode;
  std::optional<double> tol_root;
  std::string oracle = "none";
  std::vector<std::string> only;
  std::vector<double> deltas{0.3, 0.15, 0.075};
};

// Thrown for bad flag values that CLI11 cannot see (format of --grid, --box ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SpectrumOptions spectrum_options(const Config& c) {
  SpectrumOptions o;
  if (c.tol_ode) {
    if (!(*c.tol_ode > 0.0)) throw UsageError("--tol-ode must be positive");
    o.shoot.tol_rel = *c.tol_ode;
    o.shoot.tol_abs = *c.tol_ode * 1e-2;
  }
  if (c.tol_root) {
    if (!(*c.tol_root > 0.0)) throw UsageError("--tol-root must be positive");
    o.tol_root = *c.tol_root;
  }
  return o;
}

std::pair<int, int> parse_grid(const std::string& text) {
  int r = 0, a = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> r >> x >> a) || x != 'x' || !in.eof() || r < 2 || a < 2) {
    throw UsageError(fmt::format("--grid expects <R>x<A> with both sizes >= 2, got '{}'", text));
  }
  return {r, a};
}

Box parse_box(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--box: '{}' is not a number", item));
    }
  }
  if (v.size() != 4) throw UsageError("--box expects re0,re1,im0,im1");
  Box b{v[0], v[1], v[2], v[3]};
  if (!(b.re0 < b.re1 && b.im0 < b.im1)) throw UsageError("--box needs re0 < re1 and im0 < im1");
  return b;
}

std::string box_field(const Box& b) {
  // CSV fields never contain commas.
  return fmt::format("{};{};{};{}", format_number(b.re0), format_number(b.re1), format_number(b.im0),
                     format_number(b.im1));
}

json options_json(const SpectrumOptions& o) {
  return {{"tol_ode_rel", o.shoot.tol_rel}, {"tol_ode_abs", o.shoot.tol_abs}, {"tol_root", o.tol_root},
          {"polish_tol_rel", o.polish_tol_rel}, {"scan_step", o.scan_step}, {"max_refinements", o.max_refinements}};
}

json config_json(const Config& c) {
  json j = {{"command", c.command}, {"coeff", c.coeff}, {"count", c.count}, {"grid", c.grid},
            {"r_min", c.r_min},     {"r_max", c.r_max}, {"box", c.box},     {"out", c.out},
            {"oracle", c.oracle},   {"only", c.only},   {"deltas", c.deltas}};
  j["eps"] = c.eps ? json(*c.eps) : json(nullptr);
  j["tol_ode"] = c.tol_ode ? json(*c.tol_ode) : json(nullptr);
  j["tol_root"] = c.tol_root ? json(*c.tol_root) : json(nullptr);
  return j;
}

struct Run {
  Config config;
  json result = json::object();
  std::vector<std::string> outputs;

  void write(const std::string& name, const std::string& content) {
    write_file(fs::path(config.out) / name, content);
    outputs.push_back(name);
  }
};

// All real roots of d with |λ| <= bound (count grows until the last exceeds it).
RealEigsResult eigs_below(const CoefficientProfile& p, double bound, const SpectrumOptions& o) {
  for (int count = 4;; count *= 2) {
    RealEigsResult r = find_real_eigs(p, count, o.shoot.lam_max, o);
    if (r.positive().back() > bound) {
      std::erase_if(r.eigs, [&](const RealEig& e) { return std::abs(e.lambda) > bound; });
      return r;
    }
    if (count > 4096) throw_numeric("too many real roots below the box edge");
  }
}

int cmd_eigs(Run& run) {
  const Config& c = run.config;
  if (c.count < 1) throw UsageError("--count must be positive");
  const SpectrumOptions o = spectrum_options(c);
  const CoefficientProfile p = load_profile(c.coeff, c.eps);
  if (c.oracle != "none" && c.oracle != "bessel" && c.oracle != "galerkin")
    throw UsageError("--oracle must be bessel, galerkin or none");
  if (c.oracle == "bessel" && p.kind() != ProfileKind::PiecewiseLinear)
    throw UsageError("--oracle bessel needs the piecewise_linear profile");
  if (c.oracle == "galerkin" && p.kind() != ProfileKind::Sine)
    throw UsageError("--oracle galerkin needs the sine profile");

  // One extra root places the box edge halfway to the next eigenvalue.
  const RealEigsResult found = find_real_eigs(p, c.count + 1, o.shoot.lam_max, o);
  const std::vector<double> pos = found.positive();
  Box box;
  if (!c.box.empty()) {
    box = parse_box(c.box);
  } else {
    const double edge = 0.5 * (pos[c.count - 1] + pos[c.count]);
    box = {-edge, edge, -2.0, 2.0};
  }
  const std::vector<double> roots = found.all_roots();
  const CertifyResult cert = certify_box(p, box, roots, o);

  CsvTable t;
  t.header = {"n", "lambda", "residual", "certified_box", "box_count"};
  std::vector<Complex> galerkin;
  if (c.oracle == "bessel") t.header.push_back("bessel_residual");
  if (c.oracle == "galerkin") {
    t.header.push_back("galerkin_rel_diff");
    galerkin = galerkin_eigs(galerkin_matrix(galerkin_eps_tilde(p.eps()), 64));
  }
  json rows = json::array();
  for (int n = 1; n <= c.count; ++n) {
    const double lam = pos[n - 1];
    const auto it = std::find_if(found.eigs.begin(), found.eigs.end(), [&](const RealEig& e) { return e.lambda == lam; });
    std::vector<std::string> row{std::to_string(n), format_number(lam), format_number(it->residual), box_field(cert.box),
                                 std::to_string(cert.count)};
    json jr = {{"n", n}, {"lambda", lam}, {"residual", it->residual}};
    if (c.oracle == "bessel") {
      const double res = std::abs(bessel_phi_at_pi(p.eps(), lam) - bessel_phi_at_pi(p.eps(), -lam));
      row.push_back(format_number(res));
      jr["bessel_residual"] = res;
    } else if (c.oracle == "galerkin") {
      double best = std::numeric_limits<double>::infinity();
      for (Complex g : galerkin) best = std::min(best, std::abs(g - lam) / std::abs(lam));
      row.push_back(format_number(best));
      jr["galerkin_rel_diff"] = best;
    }
    t.rows.push_back(std::move(row));
    rows.push_back(jr);
  }
  run.write("eigs.csv", write_csv(t));

  json j = {{"eps", p.eps()},
            {"profile", p.id()},
            {"real_eigs", rows},
            {"all_roots", to_json(found)},
            {"alphas", json::array()},
            {"contour_counts", json::array({to_json(cert)})},
            {"method", {{"shooting", "dopri5 + Frobenius endpoint bases"}, {"oracle", c.oracle}}}};
  if (c.oracle == "galerkin") j["trivial_root"] = {{"lambda", 0.0}, {"galerkin_has_zero", true}};
  run.write("eigs.json", j.dump(2) + "\n");
  run.result = {{"certified", cert.ok}, {"box_count", cert.count}, {"expected", cert.expected}};
  fmt::print("{} eigenvalues of {}; box {} count {} (expected {}) {}\n", c.count, p.id(), box_field(cert.box),
             cert.count, cert.expected, cert.ok ? "certified" : "MISMATCH");
  return cert.ok ? kOk : kVerifyFailed;
}

int cmd_alphas(Run& run) {
  const Config& c = run.config;
  const SpectrumOptions o = spectrum_options(c);
  const CoefficientProfile p = load_profile(c.coeff, c.eps);
  const AlphaResult a = find_alphas(p, c.count, o);
  CsvTable t;
  t.header = {"n", "r", "alpha", "residual"};
  for (std::size_t i = 0; i < a.alphas.size(); ++i) {
    t.rows.push_back({std::to_string(i + 1), format_number(a.r[i]), format_number(a.alphas[i]),
                      format_number(a.residuals[i])});
  }
  run.write("alphas.csv", write_csv(t));
  json j = to_json(a);
  j["profile"] = p.id();
  j["eps"] = p.eps();
  if (a.alphas.size() >= 2) {
    std::vector<double> n(a.alphas.size());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = i + 1.0;
    const LinearFit fit = linear_fit(n, a.alphas);
    j["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
    fmt::print("{} zeros, alpha_1 = {}, fit slope {:.6f}, R2 {:.6f}\n", a.alphas.size(), format_number(a.alphas[0]),
               fit.slope, fit.r_squared);
  }
  run.write("alphas.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_rho_map(Run& run) {
  const Config& c = run.config;
  const auto [radii, angles] = parse_grid(c.grid);
  if (!(c.r_min > 0.0 && c.r_max > c.r_min)) throw UsageError("need 0 < --r-min < --r-max");
  const SpectrumOptions o = spectrum_options(c);
  const CoefficientProfile p = load_profile(c.coeff, c.eps);
  const RhoMap map = rho_map(p, radii, angles, c.r_min, c.r_max, 1e-4, o.shoot);
  CsvTable t;
  t.header = {"re_z", "im_z", "abs_rho", "sector", "violates_claim", "pole_proximity"};
  for (const auto& cell : map.cells) {
    t.rows.push_back({format_number(cell.z.real()), format_number(cell.z.imag()), format_number(cell.modulus),
                      to_string(cell.sector), cell.violates_claim ? "1" : "0", cell.pole_proximity ? "1" : "0"});
  }
  run.write("rho.csv", write_csv(t));
  run.write("rho.svg", rho_svg(map, fmt::format("|rho| for {}", p.id())));
  run.result = {{"max_inner", map.max_inner},         {"min_outer", map.min_outer},
                {"max_ray_deviation", map.max_ray_deviation}, {"violations", map.violations},
                {"flagged", map.flagged}};
  fmt::print("max |rho| inner {:.6f}  min |rho| outer {:.6f}  ray dev {:.1e}  violations {}  flagged {}\n",
             map.max_inner, map.min_outer, map.max_ray_deviation, map.violations, map.flagged);
  return map.violations == 0 ? kOk : kVerifyFailed;
}

int cmd_certify(Run& run) {
  const Config& c = run.config;
  if (c.box.empty()) throw UsageError("certify needs --box re0,re1,im0,im1");
  const Box box = parse_box(c.box);
  const SpectrumOptions o = spectrum_options(c);
  const CoefficientProfile p = load_profile(c.coeff, c.eps);
  const double bound = std::max(std::abs(box.re0), std::abs(box.re1));
  const RealEigsResult found = eigs_below(p, bound, o);
  const std::vector<double> roots = found.all_roots();
  const CertifyResult cert = certify_box(p, box, roots, o);
  json j = to_json(cert);
  j["profile"] = p.id();
  j["eps"] = p.eps();
  j["real_roots"] = roots;
  run.write("certify.json", j.dump(2) + "\n");
  run.result = {{"ok", cert.ok}, {"count", cert.count}, {"expected", cert.expected}};
  fmt::print("winding {:.6f} count {} expected {} {}\n", cert.winding, cert.count, cert.expected,
             cert.ok ? "ok" : "MISMATCH");
  return cert.ok ? kOk : kVerifyFailed;
}

int cmd_delta_sweep(Run& run) {
  const Config& c = run.config;
  const SpectrumOptions o = spectrum_options(c);
  const CoefficientProfile p = load_profile(c.coeff, c.eps);
  const DeltaTable table = delta_family_experiment(p, c.deltas, c.count, o);
  CsvTable t;
  t.header = {"delta", "n", "lambda", "reference", "difference"};
  bool decreasing = true;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const DeltaRow& row = table.rows[r];
    for (int n = 0; n < c.count; ++n) {
      t.rows.push_back({format_number(row.delta), std::to_string(n + 1), format_number(row.lambdas[n]),
                        format_number(table.reference[n]), format_number(row.differences[n])});
      if (r > 0 && !(row.differences[n] < table.rows[r - 1].differences[n])) decreasing = false;
    }
  }
  run.write("delta.csv", write_csv(t));
  json j = to_json(table);
  j["profile"] = p.id();
  j["strictly_decreasing"] = decreasing;
  run.write("delta.json", j.dump(2) + "\n");
  run.result = {{"strictly_decreasing", decreasing}};
  fmt::print("{} deltas, differences {}\n", table.rows.size(), decreasing ? "strictly decreasing" : "NOT decreasing");
  return decreasing ? kOk : kVerifyFailed;
}

int cmd_verify(Run& run) {
  const Config& c = run.config;
  VerifyOptions v;
  v.spectrum = spectrum_options(c);
  for (const auto& name : c.only) {
    const auto& names = check_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw UsageError(fmt::format("--only: unknown check '{}'", name));
  }
  v.only = c.only;
  const std::vector<CheckResult> results = run_verify(v);
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    fmt::print("{}\n", format_check(r));
    std::fflush(stdout);
    all = all && r.passed;
    checks.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  run.write("verify.json", json{{"checks", checks}, {"all_passed", all}}.dump(2) + "\n");
  run.result = {{"all_passed", all}};
  return all ? kOk : kVerifyFailed;
}

void write_manifest(const Run& run, const SpectrumOptions& o, double seconds, int code) {
  json m = {{"tool", "ptsturm"},
            {"version", PTSTURM_VERSION},
            {"config", config_json(run.config)},
            {"tolerances", options_json(o)},
            {"threads", thread_count()},
            {"wall_seconds", seconds},
            {"exit_code", code},
            {"outputs", run.outputs},
            {"result", run.result}};
  write_file(fs::path(run.config.out) / "manifest.json", m.dump(2) + "\n");
}

int fail(const Run& run, const std::string& kind, const std::string& message, int code) {
  const json diag = {{"error", kind}, {"message", message}, {"command", run.config.command}, {"exit_code", code}};
  std::cerr << diag.dump() << "\n";
  std::error_code ec;
  fs::create_directories(run.config.out, ec);
  if (!ec) {
    try {
      write_file(fs::path(run.config.out) / "error.json", diag.dump(2) + "\n");
    } catch (const std::exception&) {
      // The diagnostic already went to stderr.
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver and verification toolkit for i eps (f u')' + i u' = lambda u"};
  app.set_version_flag("--version", PTSTURM_VERSION);
  app.require_subcommand(1);
  Run run;
  Config& c = run.config;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--coeff", c.coeff, "builtin name (sine, piecewise_linear) or descriptor JSON path");
    sub->add_option("--eps", c.eps, "eps in (0, pi/2); overrides the descriptor");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--tol-ode", c.tol_ode, "relative ODE tolerance (absolute is 1e-2 of it)");
    sub->add_option("--tol-root", c.tol_root, "relative root bracket width");
  };
  CLI::App* eigs = app.add_subcommand("eigs", "lowest real eigenvalues with contour certification");
  common(eigs);
  eigs->add_option("--count", c.count, "number of positive eigenvalues")->capture_default_str();
  eigs->add_option("--box", c.box, "certification box re0,re1,im0,im1 (default [-L,L]x[-2,2])");
  eigs->add_option("--oracle", c.oracle, "bessel, galerkin or none")->capture_default_str();

  CLI::App* alphas = app.add_subcommand("alphas", "zeros alpha_n of g on the imaginary axis");
  common(alphas);
  alphas->add_option("--count", c.count, "number of zeros (at most 20)")->capture_default_str();

  CLI::App* rho = app.add_subcommand("rho-map", "|rho| on a polar grid, with CSV and SVG output");
  common(rho);
  rho->add_option("--grid", c.grid, "<radii>x<angles>")->capture_default_str();
  rho->add_option("--r-min", c.r_min, "smallest radius")->capture_default_str();
  rho->add_option("--r-max", c.r_max, "largest radius")->capture_default_str();

  CLI::App* certify = app.add_subcommand("certify", "argument-principle count of d in a box");
  common(certify);
  certify->add_option("--box", c.box, "re0,re1,im0,im1")->required();

  CLI::App* delta = app.add_subcommand("delta-sweep", "eigenvalues of the endpoint-linearised profiles");
  common(delta);
  delta->add_option("--count", c.count, "eigenvalues per delta");
  delta->add_option("--deltas", c.deltas, "strictly decreasing offsets")->delimiter(',')->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance checks");
  common(verify);
  verify->add_option("--only", c.only, "restrict to these checks")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.command == "delta-sweep" && delta->count("--count") == 0) c.count = 4;
  if (c.command == "alphas" && alphas->count("--count") == 0) c.count = 12;

  const auto t0 = std::chrono::steady_clock::now();
  SpectrumOptions effective;
  int code = kOk;
  try {
    effective = spectrum_options(c);
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw UsageError(fmt::format("cannot create output directory {}: {}", c.out, ec.message()));
    if (c.command == "eigs") code = cmd_eigs(run);
    else if (c.command == "alphas") code = cmd_alphas(run);
    else if (c.command == "rho-map") code = cmd_rho_map(run);
    else if (c.command == "certify") code = cmd_certify(run);
    else if (c.command == "delta-sweep") code = cmd_delta_sweep(run);
    else code = cmd_verify(run);
  } catch (const UsageError& e) {
    return fail(run, "usage", e.what(), kUsage);
  } catch (const Error& e) {
    const bool invalid = e.kind() == ErrorKind::InvalidArgument;
    return fail(run, invalid ? "invalid_argument" : "numeric", e.what(), invalid ? kUsage : kNumeric);
  } catch (const std::exception& e) {
    return fail(run, "internal", e.what(), kNumeric);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_manifest(run, effective, seconds, code);
  } catch (const std::exception& e) {
    return fail(run, "io", e.what(), kUsage);
  }
  return code;
}
