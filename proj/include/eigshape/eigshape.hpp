#pragma once

#include "eigshape/bessel.hpp"
#include "eigshape/convergence.hpp"
#include "eigshape/eig.hpp"
#include "eigshape/exact.hpp"
#include "eigshape/fem.hpp"
#include "eigshape/mesh.hpp"
#include "eigshape/quadrature.hpp"
#include "eigshape/reference.hpp"
#include "eigshape/shapegrad.hpp"
#include "eigshape/study_io.hpp"
#include "eigshape/target.hpp"
#include "eigshape/velocity.hpp"
