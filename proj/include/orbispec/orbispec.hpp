#pragma once

#include "orbispec/rational.hpp"
#include "orbispec/exact_linalg.hpp"
#include "orbispec/group.hpp"
#include "orbispec/transforms.hpp"
#include "orbispec/witness.hpp"
#include "orbispec/fixed_points.hpp"
#include "orbispec/geometry.hpp"
#include "orbispec/grid.hpp"
#include "orbispec/sparse.hpp"
#include "orbispec/operator.hpp"
#include "orbispec/dense_eigen.hpp"
#include "orbispec/lobpcg.hpp"
#include "orbispec/cache.hpp"
#include "orbispec/spectrum.hpp"
#include "orbispec/compare.hpp"
#include "orbispec/report.hpp"
#include "orbispec/suites.hpp"
