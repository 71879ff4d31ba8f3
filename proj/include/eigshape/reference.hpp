#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigshape/exact.hpp"
#include "eigshape/mesh.hpp"
#include "eigshape/shapegrad.hpp"
#include "eigshape/target.hpp"
#include "eigshape/velocity.hpp"

namespace eigshape {

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FineMeshOptions {
  /// Extrapolate from the three finest levels (R-2, R-1, R).
  bool richardson = true;
  /// Refuse to factorize meshes with more dofs than this.
  int max_dofs = 1'500'000;
  Target target = Target::first();
  SolverOptions solver{};
  double cluster_rel_gap = 1e-6;
};

/// Fine-mesh values of one level: eigenvalue and volume-form derivatives.
struct FineLevel {
  int level = 0;
  double lambda = 0.0;
  std::vector<double> values;
};

/// Richardson rate p from three successive values on meshes halved in h,
/// or NaN if the sequence is not in its asymptotic regime.
inline double richardson_rate(double coarse, double mid, double fine) {
  const double d1 = coarse - mid, d2 = mid - fine;
  if (d2 == 0.0 || d1 / d2 <= 1.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(d1 / d2);
}

inline double richardson_extrapolate(double mid, double fine, double rate) {
  return fine + (fine - mid) / (std::pow(2.0, rate) - 1.0);
}

/// Reference derivatives from the discrete volume formula on a fine mesh,
/// optionally Richardson-extrapolated using the rate observed in the
/// eigenvalue sequence of the three finest levels.
inline ReferenceDerivatives finemesh_reference(Domain domain, BoundaryCondition bc,
                                               const VelocityBasis& basis, int reference_level,
                                               const FineMeshOptions& opts = {},
                                               std::vector<FineLevel>* levels_out = nullptr) {
  if (reference_level < 0) throw std::invalid_argument("finemesh_reference: bad level");
  const int first = opts.richardson ? std::max(0, reference_level - 2) : reference_level;
  std::unique_ptr<const ExactEigenpair> exact;
  if (opts.target.kind == Target::Kind::MatchExact)
    exact = std::make_unique<const ExactEigenpair>(exact_eigenpair(domain, bc));

  std::vector<FineLevel> levels;
  Mesh mesh = generate(domain, first);
  for (int level = first; level <= reference_level; ++level) {
    if (level > first) mesh = refine(mesh);
    auto shared = std::make_shared<const Mesh>(mesh);
    const FemSpace probe(shared, bc);
    if (probe.dof_count() > opts.max_dofs)
      throw ResourceError("finemesh_reference: level " + std::to_string(level) + " needs " +
                          std::to_string(probe.dof_count()) + " dofs, budget is " +
                          std::to_string(opts.max_dofs));
    const LevelSolution sol =
        solve_level(shared, bc, opts.target, exact.get(), opts.solver, opts.cluster_rel_gap);
    FineLevel fl;
    fl.level = level;
    fl.lambda = sol.target.pair().lambda;
    fl.values = volume_gradients(*sol.space, sol.target.pair(), basis.fields);
    levels.push_back(std::move(fl));
  }

  ReferenceDerivatives ref;
  ref.provenance = Provenance::FineMesh;
  ref.reference_level = reference_level;
  const FineLevel& fine = levels.back();
  ref.values = fine.values;
  ref.lambda = fine.lambda;
  if (opts.richardson && levels.size() == 3) {
    const double p = richardson_rate(levels[0].lambda, levels[1].lambda, levels[2].lambda);
    if (std::isfinite(p)) {
      ref.extrapolation_rate = p;
      ref.lambda = richardson_extrapolate(levels[1].lambda, fine.lambda, p);
      for (std::size_t i = 0; i < ref.values.size(); ++i)
        ref.values[i] = richardson_extrapolate(levels[1].values[i], fine.values[i], p);
    }
  }
  if (levels_out) *levels_out = std::move(levels);
  return ref;
}

}  // namespace eigshape
