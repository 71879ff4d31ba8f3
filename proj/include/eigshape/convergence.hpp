#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigshape/exact.hpp"
#include "eigshape/reference.hpp"
#include "eigshape/shapegrad.hpp"
#include "eigshape/target.hpp"
#include "eigshape/velocity.hpp"

namespace eigshape {

struct ReferenceSpec {
  enum class Kind { Analytic, FineMesh };
  Kind kind = Kind::Analytic;
  int level = -1;
  bool richardson = true;

  static ReferenceSpec analytic() { return {}; }
  static ReferenceSpec finemesh(int level, bool richardson = true) {
    return {Kind::FineMesh, level, richardson};
  }
};

struct StudyConfig {
  Domain domain = Domain::UnitSquare;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int gamma = 3;
  int min_level = 3;
  int max_level = 7;
  Target target = Target::first();
  ReferenceSpec reference = ReferenceSpec::analytic();
  double cluster_rel_gap = 1e-6;
  /// Number of finest levels used by the rate fits.
  int window = 4;
  SolverOptions solver{};
  int max_reference_dofs = 1'500'000;

  std::string csv_path;
  std::string svg_path;
  std::string manifest_path;

  void validate() const {
    if (min_level < 0 || min_level > max_level)
      throw std::invalid_argument("StudyConfig: need 0 <= min_level <= max_level");
    if (gamma < 0 || gamma > 6) throw std::invalid_argument("StudyConfig: gamma must be in [0, 6]");
    if (window < 2) throw std::invalid_argument("StudyConfig: window must be >= 2");
    if (reference.kind == ReferenceSpec::Kind::Analytic && domain == Domain::LShape)
      throw std::invalid_argument("StudyConfig: analytic reference unavailable on the L-shape");
    if (reference.kind == ReferenceSpec::Kind::FineMesh && reference.level < max_level + 2)
      throw std::invalid_argument(
          "StudyConfig: fine-mesh reference level must be at least max_level + 2");
    if (target.kind == Target::Kind::MatchExact && domain == Domain::LShape)
      throw std::invalid_argument("StudyConfig: match_exact target needs an exact eigenpair");
  }
};

struct StudyRecord {
  int level = 0;
  double h = 0.0;
  int dof = 0;
  double lambda_h = 0.0;
  double E_volume = 0.0;
  double E_boundary = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the fit in log space.
  double residual = 0.0;
  int window = 0;
};

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyRecord> records;
  std::optional<RateFit> volume_rate;
  std::optional<RateFit> boundary_rate;
  /// Why a rate is missing, if one is.
  std::string rate_note;
  ReferenceDerivatives reference;
  /// Per level: discrete derivative values for each basis field.
  std::vector<std::vector<double>> volume_values;
  std::vector<std::vector<double>> boundary_values;
};

/// Ordinary least squares of log E against log h.
inline RateFit fit_loglog(std::span<const double> h, std::span<const double> e) {
  if (h.size() != e.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (h.size() < 3) throw std::invalid_argument("fit_loglog: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(e[i] > 0.0) || !std::isfinite(e[i]))
      throw DegenerateFit("fit_loglog: error value " + std::to_string(e[i]) +
                          " cannot be fitted on a log scale");
    if (!(h[i] > 0.0)) throw std::invalid_argument("fit_loglog: h must be positive");
    X(i, 0) = std::log(h[i]);
    X(i, 1) = 1.0;
    y[i] = std::log(e[i]);
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  RateFit f;
  f.slope = beta[0];
  f.intercept = beta[1];
  f.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(n));
  f.window = static_cast<int>(n);
  return f;
}

/// Observed order of E_volume or E_boundary over the last `window` records.
inline RateFit fit_rate(std::span<const StudyRecord> records, Formula formula, int window = 4) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), records.size());
  if (w < 3) throw std::invalid_argument("fit_rate: need at least 3 records in the window");
  std::vector<double> h, e;
  for (std::size_t i = records.size() - w; i < records.size(); ++i) {
    h.push_back(records[i].h);
    e.push_back(formula == Formula::Volume ? records[i].E_volume : records[i].E_boundary);
  }
  return fit_loglog(h, e);
}

namespace detail {

inline std::vector<double> head(const std::vector<double>& v, std::size_t n) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)};
}

inline void annotate_and_rethrow(int level) {
  const std::string where = "level " + std::to_string(level) + ": ";
  try {
    throw;
  } catch (const NonConvergence& e) {
    throw NonConvergence(where + e.what(), e.best_residual());
  } catch (const FactorizationFailure& e) {
    throw FactorizationFailure(where + e.what());
  } catch (const ResourceError& e) {
    throw ResourceError(where + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + e.what());
  }
}

}  // namespace detail

/// Run one refinement study for each gamma in `gammas`, sharing meshes,
/// eigensolves and the reference between them.
inline std::vector<StudyResult> run_study_gammas(const StudyConfig& cfg,
                                                 std::span<const int> gammas) {
  if (gammas.empty()) throw std::invalid_argument("run_study_gammas: no gamma given");
  int gmax = 0;
  for (int g : gammas) {
    StudyConfig c = cfg;
    c.gamma = g;
    c.validate();
    gmax = std::max(gmax, g);
  }
  const VelocityBasis full = build_basis(gmax);

  std::unique_ptr<const ExactEigenpair> exact;
  if (cfg.domain != Domain::LShape)
    exact = std::make_unique<const ExactEigenpair>(exact_eigenpair(cfg.domain, cfg.bc));

  ReferenceDerivatives ref;
  if (cfg.reference.kind == ReferenceSpec::Kind::Analytic) {
    ref = continuous_derivatives(*exact, full);
  } else {
    FineMeshOptions fo;
    fo.richardson = cfg.reference.richardson;
    fo.max_dofs = cfg.max_reference_dofs;
    fo.target = cfg.target;
    fo.solver = cfg.solver;
    fo.cluster_rel_gap = cfg.cluster_rel_gap;
    try {
      ref = finemesh_reference(cfg.domain, cfg.bc, full, cfg.reference.level, fo);
    } catch (...) {
      detail::annotate_and_rethrow(cfg.reference.level);
    }
  }

  std::vector<StudyResult> results(gammas.size());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    results[gi].config = cfg;
    results[gi].config.gamma = gammas[gi];
    results[gi].reference = ref;
    results[gi].reference.values = detail::head(ref.values, build_basis(gammas[gi]).size());
  }

  Mesh mesh = generate(cfg.domain, cfg.min_level);
  for (int level = cfg.min_level; level <= cfg.max_level; ++level) {
    try {
      if (level > cfg.min_level) mesh = refine(mesh);
      auto shared = std::make_shared<const Mesh>(mesh);
      const LevelSolution sol =
          solve_level(shared, cfg.bc, cfg.target, exact.get(), cfg.solver, cfg.cluster_rel_gap);
      const EigenPair& pair = sol.target.pair();
      const std::vector<double> vol = volume_gradients(*sol.space, pair, full.fields);
      const std::vector<double> bnd = boundary_gradients(*sol.space, pair, full.fields);
      for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const VelocityBasis basis = build_basis(gammas[gi]);
        const std::size_t q = basis.size();
        const Gramian K = gramian(basis, mesh);
        Eigen::VectorXd wv(static_cast<Eigen::Index>(q)), wb(static_cast<Eigen::Index>(q));
        for (std::size_t i = 0; i < q; ++i) {
          wv[static_cast<Eigen::Index>(i)] = ref.values[i] - vol[i];
          wb[static_cast<Eigen::Index>(i)] = ref.values[i] - bnd[i];
        }
        StudyRecord rec;
        rec.level = level;
        rec.h = mesh.h();
        rec.dof = sol.space->dof_count();
        rec.lambda_h = pair.lambda;
        rec.E_volume = dual_norm(wv, K);
        rec.E_boundary = dual_norm(wb, K);
        results[gi].records.push_back(rec);
        results[gi].volume_values.push_back(detail::head(vol, q));
        results[gi].boundary_values.push_back(detail::head(bnd, q));
      }
    } catch (...) {
      detail::annotate_and_rethrow(level);
    }
  }

  for (auto& r : results) {
    if (r.records.size() < 3) {
      r.rate_note = "fewer than 3 levels; no rate fitted";
      continue;
    }
    try {
      r.volume_rate = fit_rate(r.records, Formula::Volume, cfg.window);
    } catch (const DegenerateFit& e) {
      r.rate_note += std::string("volume: ") + e.what() + "; ";
    }
    try {
      r.boundary_rate = fit_rate(r.records, Formula::Boundary, cfg.window);
    } catch (const DegenerateFit& e) {
      r.rate_note += std::string("boundary: ") + e.what() + "; ";
    }
  }
  return results;
}

inline StudyResult run_study(const StudyConfig& cfg) {
  const int g[1] = {cfg.gamma};
  return std::move(run_study_gammas(cfg, g).front());
}

struct GammaRow {
  int gamma = 0;
  std::optional<RateFit> volume;
  std::optional<RateFit> boundary;
  std::string note;
};

/// Side-by-side fitted slopes for each gamma.
inline std::vector<GammaRow> gamma_sensitivity(const StudyConfig& cfg, std::span<const int> gammas,
                                               std::vector<StudyResult>* studies = nullptr) {
  auto results = run_study_gammas(cfg, gammas);
  std::vector<GammaRow> rows;
  for (const auto& r : results)
    rows.push_back({r.config.gamma, r.volume_rate, r.boundary_rate, r.rate_note});
  if (studies) *studies = std::move(results);
  return rows;
}

}  // namespace eigshape
