#pragma once

// Umbrella header for the voxguide toolkit: volumetric click-guidance
// encoding, distance transforms, simulated refinement sessions, and the
// five-metric evaluation of guidance signals.

#include "voxguide/bench.hpp"
#include "voxguide/components.hpp"
#include "voxguide/core.hpp"
#include "voxguide/distance.hpp"
#include "voxguide/evaluate.hpp"
#include "voxguide/guidance.hpp"
#include "voxguide/io.hpp"
#include "voxguide/metrics.hpp"
#include "voxguide/oracle.hpp"
#include "voxguide/parallel.hpp"
#include "voxguide/phantom.hpp"
#include "voxguide/rng.hpp"
#include "voxguide/simulate.hpp"
#include "voxguide/sweep.hpp"
