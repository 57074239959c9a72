#pragma once

// Meshfree unsymmetric (Kansa-type) collocation for second-order elliptic
// Dirichlet problems on the unit square, with one-level and multilevel
// residual-corrected solvers over scaled compactly supported Wendland kernels.

#include "kansa/collocate.hpp"
#include "kansa/elliptic.hpp"
#include "kansa/geometry.hpp"
#include "kansa/linalg.hpp"
#include "kansa/metrics.hpp"
#include "kansa/multilevel.hpp"
#include "kansa/parallel.hpp"
#include "kansa/point.hpp"
#include "kansa/problem.hpp"
#include "kansa/wendland.hpp"
