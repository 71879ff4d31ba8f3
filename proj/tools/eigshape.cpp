#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eigshape/eigshape.hpp"

#ifndef EIGSHAPE_VERSION
#define EIGSHAPE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace eigshape;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Domain domain_arg(const std::string& s) {
  try {
    return parse_domain(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

BoundaryCondition bc_arg(const std::string& s) {
  try {
    return parse_bc(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Known continuous eigenvalues, ascending, or empty.
std::vector<double> exact_spectrum(Domain d, BoundaryCondition bc, int k) {
  std::vector<double> out;
  if (d == Domain::UnitSquare) {
    const int lo = bc == BoundaryCondition::Dirichlet ? 1 : 0;
    const int top = lo + k + 1;
    for (int m = lo; m <= top; ++m)
      for (int n = lo; n <= top; ++n) out.push_back((m * m + n * n) * std::numbers::pi * std::numbers::pi);
    std::sort(out.begin(), out.end());
    out.resize(static_cast<std::size_t>(k));
  } else if (d == Domain::UnitDisk && bc == BoundaryCondition::Dirichlet) {
    const double j = bessel::j0_zero();
    out.push_back(j * j);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json rate_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"residual", f->residual},
          {"window", f->window}};
}

int cmd_solve(Domain d, BoundaryCondition bc, int level, int k, double tol) {
  auto mesh = std::make_shared<const Mesh>(generate(d, level));
  const FemSpace space(mesh, bc);
  SolverOptions opts;
  opts.tol = tol;
  const auto pairs = solve_lowest(assemble_stiffness(space), assemble_mass(space),
                                  std::min(k, space.dof_count()), bc, opts);
  const auto exact = exact_spectrum(d, bc, k);
  std::cout << "# domain=" << to_string(d) << " bc=" << to_string(bc) << " level=" << level
            << " h=" << format_number(mesh->h()) << " dof=" << space.dof_count() << '\n';
  std::cout << "index,lambda_h,residual,exact,rel_error\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::cout << i + 1 << ',' << format_number(pairs[i].lambda, 15) << ','
              << format_number(pairs[i].residual, 3);
    if (i < exact.size()) {
      const double e = exact[i];
      std::cout << ',' << format_number(e, 15) << ','
                << (e == 0.0 ? "nan" : format_number(std::abs(pairs[i].lambda - e) / e, 6));
    } else {
      std::cout << ",nan,nan";
    }
    std::cout << (pairs[i].zero_mode ? " # zero mode" : "") << '\n';
  }
  return 0;
}

int cmd_gradient(Domain d, BoundaryCondition bc, int level, const std::string& field_spec,
                 const std::string& formula, const std::string& target_spec) {
  VelocityField field;
  Target target;
  try {
    field = parse_field(field_spec);
    target = parse_target(target_spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (formula != "volume" && formula != "boundary")
    throw UsageError("formula must be 'volume' or 'boundary'");
  std::unique_ptr<const ExactEigenpair> exact;
  if (target.kind == Target::Kind::MatchExact) {
    if (d == Domain::LShape) throw UsageError("match_exact target needs square or disk");
    exact = std::make_unique<const ExactEigenpair>(exact_eigenpair(d, bc));
  }
  auto mesh = std::make_shared<const Mesh>(generate(d, level));
  const LevelSolution sol = solve_level(mesh, bc, target, exact.get());
  const auto s = gradient_sample(*sol.space, sol.target.pair(), field,
                                 formula == "volume" ? Formula::Volume : Formula::Boundary);
  std::cout << "field = " << field_spec << '\n'
            << "formula = " << formula << '\n'
            << "level = " << level << '\n'
            << "lambda_h = " << format_number(sol.target.pair().lambda, 15) << '\n'
            << "multiplicity = " << sol.target.multiplicity << '\n'
            << "value = " << format_number(s.value, 15) << '\n';
  return 0;
}

int cmd_study(const std::string& path, const std::string& out_dir) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  StudyConfig cfg;
  try {
    cfg = parse_config(in);
  } catch (const ConfigError& e) {
    throw UsageError(path + ": " + e.what());
  }
  const std::string stem = fs::path(path).stem().string();
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  if (cfg.csv_path.empty()) cfg.csv_path = (dir / (stem + ".csv")).string();
  if (cfg.svg_path.empty()) cfg.svg_path = (dir / (stem + ".svg")).string();
  if (cfg.manifest_path.empty()) cfg.manifest_path = (dir / (stem + ".json")).string();

  const StudyResult r = run_study(cfg);

  const auto open = [](const std::string& p) {
    const fs::path parent = fs::path(p).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write '" + p + "'");
    return os;
  };
  {
    auto os = open(cfg.csv_path);
    write_csv(os, r);
  }
  {
    auto os = open(cfg.svg_path);
    write_svg(os, r);
  }
  nlohmann::json m;
  m["tool"] = "eigshape";
  m["version"] = EIGSHAPE_VERSION;
  m["timestamp"] = utc_timestamp();
  m["command"] = "study";
  m["config_file"] = path;
  m["config"] = to_config_text(cfg);
  m["outputs"] = {cfg.csv_path, cfg.svg_path, cfg.manifest_path};
  m["rates"] = {{"volume", rate_json(r.volume_rate)}, {"boundary", rate_json(r.boundary_rate)}};
  if (!r.rate_note.empty()) m["rate_note"] = r.rate_note;
  m["reference"] = {
      {"kind", r.reference.provenance == Provenance::Analytic ? "analytic" : "finemesh"},
      {"lambda", r.reference.lambda}};
  if (r.reference.provenance == Provenance::FineMesh) {
    m["reference"]["level"] = r.reference.reference_level;
    m["reference"]["extrapolation_rate"] =
        std::isfinite(r.reference.extrapolation_rate) ? nlohmann::json(r.reference.extrapolation_rate)
                                                      : nlohmann::json(nullptr);
  }
  {
    auto os = open(cfg.manifest_path);
    os << std::setw(2) << m << '\n';
  }
  write_csv(std::cout, r);
  return 0;
}

int cmd_golden(int level, const std::string& out) {
  const auto values = golden_values(level);
  if (out.empty() || out == "-") {
    write_golden(std::cout, values);
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write '" + out + "'");
    write_golden(os, values);
  }
  return 0;
}

int cmd_mesh_export(Domain d, int level, const std::string& out) {
  const Mesh m = generate(d, level);
  if (out.empty() || out == "-") {
    write_mesh(std::cout, m);
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write '" + out + "'");
    write_mesh(os, m);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P1 eigenvalue shape-gradient lab"};
  app.set_version_flag("--version", EIGSHAPE_VERSION);
  app.require_subcommand(1);

  std::string domain = "square", bc = "dirichlet", field, formula = "volume", target = "first";
  std::string config, out, out_dir;
  int level = 4, k = 1;
  double tol = 1e-10;

  auto* solve = app.add_subcommand("solve", "lowest eigenpairs with residuals");
  solve->add_option("--domain", domain, "square | disk | lshape");
  solve->add_option("--bc", bc, "dirichlet | neumann");
  solve->add_option("--level", level)->check(CLI::Range(0, 12));
  solve->add_option("--k", k, "number of eigenpairs")->check(CLI::PositiveNumber);
  solve->add_option("--tol", tol)->check(CLI::PositiveNumber);

  auto* gradient = app.add_subcommand("gradient", "one Eulerian derivative");
  gradient->add_option("--domain", domain);
  gradient->add_option("--bc", bc);
  gradient->add_option("--level", level)->check(CLI::Range(0, 12));
  gradient->add_option("--field", field, "const:a,b | identity | rot | mono:b1,b2,comp")
      ->required();
  gradient->add_option("--formula", formula, "volume | boundary");
  gradient->add_option("--target", target, "first | match_exact[:N] | index:N");

  auto* study = app.add_subcommand("study", "refinement study from a config file");
  study->add_option("config", config)->required();
  study->add_option("--out-dir", out_dir, "directory for outputs not named in the config");

  auto* golden = app.add_subcommand("golden", "emit regression values");
  golden->add_option("--level", level)->check(CLI::Range(0, 8));
  golden->add_option("-o,--output", out);

  auto* mesh_export = app.add_subcommand("mesh-export", "write a mesh");
  mesh_export->add_option("--domain", domain);
  mesh_export->add_option("--level", level)->check(CLI::Range(0, 12));
  mesh_export->add_option("-o,--output", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve(domain_arg(domain), bc_arg(bc), level, k, tol);
    if (*gradient) return cmd_gradient(domain_arg(domain), bc_arg(bc), level, field, formula, target);
    if (*study) return cmd_study(config, out_dir);
    if (*golden) return cmd_golden(level, out);
    if (*mesh_export) return cmd_mesh_export(domain_arg(domain), level, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
