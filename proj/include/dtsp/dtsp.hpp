#pragma once

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"
#include "dtsp/generators.hpp"
#include "dtsp/tsplib.hpp"
#include "dtsp/tour.hpp"
#include "dtsp/spanning_tree.hpp"
#include "dtsp/upsweep.hpp"
#include "dtsp/downsweep.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/held_karp.hpp"
#include "dtsp/bench.hpp"
