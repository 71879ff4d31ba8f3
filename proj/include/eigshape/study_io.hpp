#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eigshape/convergence.hpp"

namespace eigshape {

inline std::string format_number(double v, int digits = 12) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// Shortest text that parses back to the same double.
inline std::string format_exact(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// CSV

/// `level,h,dof,lambda_h,E_volume,E_boundary` rows followed by a `# rates`
/// section with one line per fitted formula.
inline void write_csv(std::ostream& os, const StudyResult& r) {
  os << "level,h,dof,lambda_h,E_volume,E_boundary\n";
  for (const auto& rec : r.records) {
    os << rec.level << ',' << format_number(rec.h, 17) << ',' << rec.dof << ','
       << format_number(rec.lambda_h, 17) << ',' << format_number(rec.E_volume, 17) << ','
       << format_number(rec.E_boundary, 17) << '\n';
  }
  os << "# rates\n";
  os << "formula,slope,intercept,residual,window\n";
  const auto row = [&os](const char* name, const std::optional<RateFit>& f) {
    if (f) {
      os << name << ',' << format_number(f->slope) << ',' << format_number(f->intercept) << ','
         << format_number(f->residual) << ',' << f->window << '\n';
    } else {
      os << name << ",nan,nan,nan,0\n";
    }
  };
  row("volume", r.volume_rate);
  row("boundary", r.boundary_rate);
  if (!r.rate_note.empty()) os << "# note: " << r.rate_note << '\n';
}

// ---------------------------------------------------------------------------
// SVG log-log plot

inline void write_svg(std::ostream& os, const StudyResult& r) {
  constexpr double W = 640, H = 480, L = 80, R = 30, T = 40, B = 60;
  double hmin = std::numeric_limits<double>::infinity(), hmax = 0;
  double emin = std::numeric_limits<double>::infinity(), emax = 0;
  for (const auto& rec : r.records) {
    hmin = std::min(hmin, rec.h);
    hmax = std::max(hmax, rec.h);
    for (double e : {rec.E_volume, rec.E_boundary})
      if (e > 0) {
        emin = std::min(emin, e);
        emax = std::max(emax, e);
      }
  }
  if (!(emax > 0)) emin = 1e-16, emax = 1.0;
  if (!(hmax > 0)) hmin = 0.1, hmax = 1.0;
  const double lx0 = std::floor(std::log10(hmin)), lx1 = std::ceil(std::log10(hmax));
  const double ly0 = std::floor(std::log10(emin)), ly1 = std::ceil(std::log10(emax));
  const auto sx = [&](double h) {
    return L + (std::log10(h) - lx0) / std::max(lx1 - lx0, 1.0) * (W - L - R);
  };
  const auto sy = [&](double e) {
    return H - B - (std::log10(e) - ly0) / std::max(ly1 - ly0, 1.0) * (H - T - B);
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << to_string(r.config.domain) << ", " << to_string(r.config.bc)
     << ", gamma=" << r.config.gamma << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = lx0; d <= lx1; d += 1.0) {
    const double x = sx(std::pow(10.0, d));
    os << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5
       << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << H - B + 20
       << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (double d = ly0; d <= ly1; d += 1.0) {
    const double y = sy(std::pow(10.0, d));
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
       << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">h</text>\n";
  os << "<text x=\"20\" y=\"" << H / 2 << "\" transform=\"rotate(-90 20 " << H / 2
     << ")\" text-anchor=\"middle\">error (dual norm)</text>\n";

  const auto series = [&](bool volume, const char* color, const char* name,
                          const std::optional<RateFit>& fit, double ly) {
    std::ostringstream path;
    bool first = true;
    for (const auto& rec : r.records) {
      const double e = volume ? rec.E_volume : rec.E_boundary;
      if (!(e > 0)) continue;
      path << (first ? "M" : " L") << sx(rec.h) << ',' << sy(e);
      first = false;
      os << "<circle cx=\"" << sx(rec.h) << "\" cy=\"" << sy(e) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    if (!first)
      os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << L + 10 << "\" y=\"" << ly << "\" fill=\"" << color << "\">" << name;
    if (fit) os << " slope " << format_number(fit->slope, 3);
    os << "</text>\n";
  };
  series(true, "#1f77b4", "E_volume", r.volume_rate, T + 18);
  series(false, "#d62728", "E_boundary", r.boundary_rate, T + 34);
  os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Plain-text study configuration

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& key, const std::string& msg)
      : std::runtime_error("config line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") +
                           ": " + msg),
        line_(line),
        key_(key) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(line, key, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(line, key, "expected an integer, got '" + v + "'");
  return out;
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(line, key, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(line, key, "expected a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(line, key, "expected true or false, got '" + v + "'");
}

}  // namespace detail

/// Sections `[study]`, `[solver]` and `[output]` of `key = value` lines;
/// `#` starts a comment.
inline StudyConfig parse_config(std::istream& in) {
  StudyConfig cfg;
  std::string section, raw;
  int line = 0;
  bool richardson = true;
  int ref_level = -1;
  bool finemesh = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(line, "", "malformed section header");
      section = detail::trim(text.substr(1, text.size() - 2));
      if (section != "study" && section != "solver" && section != "output")
        throw ConfigError(line, "", "unknown section '" + section + "'");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, text, "expected 'key = value'");
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (section.empty()) throw ConfigError(line, key, "key outside of any section");
    if (value.empty()) throw ConfigError(line, key, "missing value");
    try {
      if (section == "study") {
        if (key == "domain") {
          cfg.domain = parse_domain(value);
        } else if (key == "bc") {
          cfg.bc = parse_bc(value);
        } else if (key == "gamma") {
          cfg.gamma = detail::parse_int(value, line, key);
        } else if (key == "min_level") {
          cfg.min_level = detail::parse_int(value, line, key);
        } else if (key == "max_level") {
          cfg.max_level = detail::parse_int(value, line, key);
        } else if (key == "target") {
          cfg.target = parse_target(value);
        } else if (key == "reference") {
          if (value == "analytic") {
            finemesh = false;
          } else if (value.rfind("finemesh:", 0) == 0) {
            finemesh = true;
            ref_level = detail::parse_int(value.substr(9), line, key);
          } else {
            throw ConfigError(line, key, "expected 'analytic' or 'finemesh:<level>'");
          }
        } else if (key == "richardson") {
          richardson = detail::parse_bool(value, line, key);
        } else if (key == "cluster_rel_gap") {
          cfg.cluster_rel_gap = detail::parse_double(value, line, key);
        } else if (key == "window") {
          cfg.window = detail::parse_int(value, line, key);
        } else if (key == "max_reference_dofs") {
          cfg.max_reference_dofs = detail::parse_int(value, line, key);
        } else {
          throw ConfigError(line, key, "unknown key in [study]");
        }
      } else if (section == "solver") {
        if (key == "tol") {
          cfg.solver.tol = detail::parse_double(value, line, key);
        } else if (key == "max_basis") {
          cfg.solver.max_basis = detail::parse_int(value, line, key);
        } else if (key == "seed") {
          cfg.solver.seed = static_cast<std::uint64_t>(detail::parse_double(value, line, key));
        } else {
          throw ConfigError(line, key, "unknown key in [solver]");
        }
      } else {
        if (key == "csv") {
          cfg.csv_path = value;
        } else if (key == "svg") {
          cfg.svg_path = value;
        } else if (key == "manifest") {
          cfg.manifest_path = value;
        } else {
          throw ConfigError(line, key, "unknown key in [output]");
        }
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line, key, e.what());
    }
  }
  cfg.reference = finemesh ? ReferenceSpec::finemesh(ref_level, richardson)
                           : ReferenceSpec::analytic();
  cfg.reference.richardson = richardson;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, "", e.what());
  }
  return cfg;
}

inline StudyConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
inline std::string to_config_text(const StudyConfig& c) {
  std::ostringstream os;
  os << "[study]\n";
  os << "domain = " << to_string(c.domain) << '\n';
  os << "bc = " << to_string(c.bc) << '\n';
  os << "gamma = " << c.gamma << '\n';
  os << "min_level = " << c.min_level << '\n';
  os << "max_level = " << c.max_level << '\n';
  os << "target = " << to_string(c.target) << '\n';
  if (c.reference.kind == ReferenceSpec::Kind::Analytic) {
    os << "reference = analytic\n";
  } else {
    os << "reference = finemesh:" << c.reference.level << '\n';
  }
  os << "richardson = " << (c.reference.richardson ? "true" : "false") << '\n';
  os << "cluster_rel_gap = " << format_exact(c.cluster_rel_gap) << '\n';
  os << "window = " << c.window << '\n';
  os << "max_reference_dofs = " << c.max_reference_dofs << '\n';
  os << "\n[solver]\n";
  os << "tol = " << format_exact(c.solver.tol) << '\n';
  os << "max_basis = " << c.solver.max_basis << '\n';
  os << "seed = " << c.solver.seed << '\n';
  if (!c.csv_path.empty() || !c.svg_path.empty() || !c.manifest_path.empty()) {
    os << "\n[output]\n";
    if (!c.csv_path.empty()) os << "csv = " << c.csv_path << '\n';
    if (!c.svg_path.empty()) os << "svg = " << c.svg_path << '\n';
    if (!c.manifest_path.empty()) os << "manifest = " << c.manifest_path << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Field specs

/// `const:a,b`, `identity`, `rot` or `mono:b1,b2,comp`.
inline VelocityField parse_field(const std::string& spec) {
  const auto bad = [&spec](const std::string& why) {
    return std::invalid_argument("bad field spec '" + spec + "': " + why);
  };
  if (spec == "identity") return VelocityField::identity();
  if (spec == "rot") return VelocityField::rotation();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw bad("expected const:, mono:, identity or rot");
  const std::string head = spec.substr(0, colon);
  std::vector<std::string> parts;
  std::stringstream ss(spec.substr(colon + 1));
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(detail::trim(item));
  if (head == "const") {
    if (parts.size() != 2) throw bad("const needs two values");
    double a = 0, b = 0;
    try {
      a = detail::parse_double(parts[0], 0, "field");
      b = detail::parse_double(parts[1], 0, "field");
    } catch (const ConfigError&) {
      throw bad("non-numeric constant");
    }
    VelocityField f = VelocityField::constant(a, b);
    return {f.component(0), f.component(1), "const:" + format_number(a) + "," + format_number(b)};
  }
  if (head == "mono") {
    if (parts.size() != 3) throw bad("mono needs b1,b2,comp");
    int v[3];
    for (int i = 0; i < 3; ++i) {
      try {
        v[i] = detail::parse_int(parts[static_cast<std::size_t>(i)], 0, "field");
      } catch (const ConfigError&) {
        throw bad("non-integer entry");
      }
    }
    if (v[0] < 0 || v[1] < 0 || v[0] + v[1] > 6) throw bad("exponents must be >= 0 with sum <= 6");
    if (v[2] != 0 && v[2] != 1) throw bad("component must be 0 or 1");
    return VelocityField::monomial(v[0], v[1], v[2]);
  }
  throw bad("unknown kind '" + head + "'");
}

// ---------------------------------------------------------------------------
// Golden values

/// Small fixed cases pinned for regression: eigenvalues and both gradient
/// forms for a handful of fields on coarse meshes.
inline std::vector<std::pair<std::string, double>> golden_values(int level = 3) {
  std::vector<std::pair<std::string, double>> out;
  const char* fields[] = {"identity", "rot", "mono:1,0,0", "mono:0,2,1", "mono:1,1,0"};
  for (Domain d : {Domain::UnitSquare, Domain::UnitDisk, Domain::LShape})
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      auto mesh = std::make_shared<const Mesh>(generate(d, level));
      // match the closed-form mode where one exists so the pair is simple
      std::unique_ptr<const ExactEigenpair> exact;
      if (d != Domain::LShape)
        exact = std::make_unique<const ExactEigenpair>(exact_eigenpair(d, bc));
      const LevelSolution sol =
          solve_level(mesh, bc, exact ? Target::match_exact() : Target::first(), exact.get());
      const EigenPair& p = sol.target.pair();
      const std::string prefix = std::string(to_string(d)) + "." + std::string(to_string(bc)) +
                                 ".level" + std::to_string(level) + ".";
      out.emplace_back(prefix + "lambda", p.lambda);
      for (const char* f : fields) {
        const VelocityField v = parse_field(f);
        out.emplace_back(prefix + "volume." + f, volume_gradient(*sol.space, p, v));
        const std::vector<VelocityField> one{v};
        out.emplace_back(prefix + "boundary." + f, boundary_gradients(*sol.space, p, one)[0]);
      }
    }
  return out;
}

inline void write_golden(std::ostream& os, const std::vector<std::pair<std::string, double>>& v) {
  for (const auto& [k, x] : v) os << k << " = " << format_number(x, 15) << '\n';
}

}  // namespace eigshape
