#pragma once

#include "coefficients.hpp"
#include "core.hpp"
#include "extremal.hpp"
#include "geometry.hpp"
#include "inequality.hpp"
#include "meanvalue.hpp"
#include "mesh.hpp"
#include "norms.hpp"
#include "solver.hpp"
#include "harness/compare.hpp"
#include "harness/config.hpp"
#include "harness/csv.hpp"
#include "harness/runner.hpp"
#include "harness/svg.hpp"
