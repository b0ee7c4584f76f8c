#pragma once

#include "fcl/error.hpp"
#include "fcl/geometry.hpp"
#include "fcl/ifs_core.hpp"
#include "fcl/grid_geometry.hpp"
#include "fcl/quadrature.hpp"
#include "fcl/piecewise.hpp"
#include "fcl/renewal.hpp"
#include "fcl/exact_gasket.hpp"
#include "fcl/montecarlo.hpp"
#include "fcl/io.hpp"
