#pragma once

#include "checklist/baselines.hpp"
#include "checklist/bits.hpp"
#include "checklist/constraints.hpp"
#include "checklist/core.hpp"
#include "checklist/cover.hpp"
#include "checklist/dataset.hpp"
#include "checklist/error.hpp"
#include "checklist/harness.hpp"
#include "checklist/io.hpp"
#include "checklist/path.hpp"
#include "checklist/pool.hpp"
#include "checklist/solver.hpp"
