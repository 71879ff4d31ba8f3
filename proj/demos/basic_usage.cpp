#include <iostream>
#include <memory>

#include "eigshape/eigshape.hpp"

using namespace eigshape;

int main() {
  auto mesh = std::make_shared<const Mesh>(generate(Domain::UnitSquare, 4));
  const FemSpace space(mesh, BoundaryCondition::Dirichlet);
  const auto pairs = solve_lowest(assemble_stiffness(space), assemble_mass(space), 1,
                                  BoundaryCondition::Dirichlet);
  const EigenPair& p = pairs.front();
  std::cout << "lambda_h = " << p.lambda << " (residual " << p.residual << ")\n";

  const VelocityField v = VelocityField::monomial(1, 0, 0);
  std::cout << "volume   dJ[x1 e1] = " << volume_gradient(space, p, v) << '\n';
  std::cout << "boundary dJ[x1 e1] = " << boundary_gradient_dirichlet(space, p, v) << '\n';

  StudyConfig cfg;
  cfg.min_level = 2;
  cfg.max_level = 5;
  const StudyResult r = run_study(cfg);
  write_csv(std::cout, r);
}
