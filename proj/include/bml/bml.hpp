#pragma once

#include "bml/core/errors.hpp"
#include "bml/core/grid_path.hpp"
#include "bml/core/parallel.hpp"
#include "bml/core/rng.hpp"
#include "bml/core/stats.hpp"
#include "bml/csbp.hpp"
#include "bml/geodesic.hpp"
#include "bml/gff.hpp"
#include "bml/planar_map.hpp"
#include "bml/snake_map.hpp"
#include "bml/stochastic.hpp"
