#pragma once

// Umbrella header.

#include "gtmc/analytics.hpp"
#include "gtmc/bits.hpp"
#include "gtmc/decoders.hpp"
#include "gtmc/erased_system.hpp"
#include "gtmc/erasure.hpp"
#include "gtmc/error.hpp"
#include "gtmc/gt_core.hpp"
#include "gtmc/io.hpp"
#include "gtmc/psi_solver.hpp"
#include "gtmc/rng.hpp"
#include "gtmc/sim.hpp"
