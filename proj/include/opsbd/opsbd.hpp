#pragma once

#include "opsbd/bench.hpp"
#include "opsbd/budget.hpp"
#include "opsbd/coverage.hpp"
#include "opsbd/geometry.hpp"
#include "opsbd/instgen.hpp"
#include "opsbd/objective.hpp"
#include "opsbd/oracle.hpp"
#include "opsbd/paths.hpp"
#include "opsbd/rng.hpp"
#include "opsbd/scenario.hpp"
#include "opsbd/solution_io.hpp"
#include "opsbd/solvers.hpp"
