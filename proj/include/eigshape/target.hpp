#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigshape/eig.hpp"
#include "eigshape/exact.hpp"
#include "eigshape/fem.hpp"

namespace eigshape {

/// Which discrete eigenpair a study follows. Zero modes never qualify.
struct Target {
  enum class Kind { First, MatchExact, Nth };
  Kind kind = Kind::First;
  /// Nth: 0-based position among the nonzero eigenpairs. MatchExact:
  /// number of eigenpairs searched.
  int index = 0;

  static Target first() { return {Kind::First, 0}; }
  static Target match_exact(int search = 8) { return {Kind::MatchExact, search}; }
  static Target nth(int n) { return {Kind::Nth, n}; }
};

inline std::string to_string(const Target& t) {
  switch (t.kind) {
    case Target::Kind::First: return "first";
    case Target::Kind::MatchExact: return "match_exact:" + std::to_string(t.index);
    case Target::Kind::Nth: return "index:" + std::to_string(t.index);
  }
  return "first";
}

inline Target parse_target(const std::string& s) {
  if (s == "first") return Target::first();
  if (s == "match_exact") return Target::match_exact();
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const std::string head = s.substr(0, colon);
    const int n = std::stoi(s.substr(colon + 1));
    if (head == "match_exact" && n >= 1) return Target::match_exact(n);
    if (head == "index" && n >= 0) return Target::nth(n);
  }
  throw std::invalid_argument("unknown target selector '" + s + "'");
}

struct TargetSolution {
  std::vector<EigenPair> pairs;
  int index = -1;
  /// Size of the eigenvalue cluster containing the target.
  int multiplicity = 1;
  const EigenPair& pair() const { return pairs.at(static_cast<std::size_t>(index)); }
};

/// Solve for the lowest eigenpairs and pick the target.
inline TargetSolution solve_target(const FemSpace& space, const SparseSymMatrix& A,
                                   const SparseSymMatrix& M, const Target& target,
                                   const ExactEigenpair* exact, const SolverOptions& opts = {},
                                   double cluster_rel_gap = 1e-6) {
  const int zero_modes = space.bc() == BoundaryCondition::Neumann ? 1 : 0;
  int k = 1 + zero_modes;
  if (target.kind == Target::Kind::Nth) k = target.index + 1 + zero_modes;
  if (target.kind == Target::Kind::MatchExact) {
    if (!exact) throw std::invalid_argument("solve_target: match_exact needs an exact eigenpair");
    k = std::max(target.index, 1 + zero_modes);
  }
  k = std::min(k, space.dof_count());

  TargetSolution sol;
  // one pair beyond the request so the target's cluster is seen whole
  int extra = 1;
  for (;;) {
    const int want = std::min(k + extra, space.dof_count());
    sol.pairs = solve_lowest(A, M, want, space.bc(), opts);
    const std::size_t n = sol.pairs.size();
    if (want >= space.dof_count() || n < 2 || sol.pairs[n - 1].zero_mode) break;
    const double a = sol.pairs[n - 2].lambda, b = sol.pairs[n - 1].lambda;
    if (std::abs(b - a) > cluster_rel_gap * std::abs(a)) break;
    extra *= 2;
  }
  std::vector<int> nonzero;
  for (int i = 0; i < static_cast<int>(sol.pairs.size()); ++i)
    if (!sol.pairs[i].zero_mode) nonzero.push_back(i);
  if (nonzero.empty()) throw std::runtime_error("solve_target: no nonzero eigenpair computed");

  std::optional<Vector> interp;
  if (exact) interp = space.interpolate(exact->u);
  switch (target.kind) {
    case Target::Kind::First: sol.index = nonzero.front(); break;
    case Target::Kind::Nth:
      if (target.index >= static_cast<int>(nonzero.size()))
        throw std::runtime_error("solve_target: requested eigenpair index not computed");
      sol.index = nonzero[static_cast<std::size_t>(target.index)];
      break;
    case Target::Kind::MatchExact: {
      const Vector mi = M * *interp;
      double best = -1.0;
      for (int i : nonzero) {
        const double c = std::abs(sol.pairs[i].coeffs.dot(mi));
        if (c > best) {
          best = c;
          sol.index = i;
        }
      }
      break;
    }
  }
  if (interp) {
    sol.pairs[sol.index] = align_sign(sol.pairs[sol.index], *interp, M);
  } else {
    sol.pairs[sol.index] = align_sign(sol.pairs[sol.index], Vector::Ones(space.dof_count()), M);
  }
  for (const auto& c : cluster(sol.pairs, cluster_rel_gap, M))
    if (sol.index >= c.first_index && sol.index < c.first_index + c.multiplicity())
      sol.multiplicity = c.multiplicity();
  return sol;
}

/// Discrete problem and target eigenpair on one mesh.
struct LevelSolution {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FemSpace> space;
  SparseSymMatrix A;
  SparseSymMatrix M;
  TargetSolution target;
};

inline LevelSolution solve_level(std::shared_ptr<const Mesh> mesh, BoundaryCondition bc,
                                 const Target& target, const ExactEigenpair* exact,
                                 const SolverOptions& opts = {}, double cluster_rel_gap = 1e-6) {
  LevelSolution s;
  s.mesh = std::move(mesh);
  s.space = std::make_shared<const FemSpace>(s.mesh, bc);
  s.A = assemble_stiffness(*s.space);
  s.M = assemble_mass(*s.space);
  s.target = solve_target(*s.space, s.A, s.M, target, exact, opts, cluster_rel_gap);
  return s;
}

}  // namespace eigshape
