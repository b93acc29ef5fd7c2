#pragma once

// Umbrella header: dielectric-loss modeling for CPW resonators with airbridge
// crossovers, notch-trace Q extraction, loss-vs-count regression, and the
// gmon T1 frequency model.

#include "constants.hpp"
#include "cpw.hpp"
#include "errors.hpp"
#include "levmar.hpp"
#include "loss.hpp"
#include "qubit.hpp"
#include "reference.hpp"
#include "regression.hpp"
#include "resonance.hpp"
#include "rng.hpp"

#include "io/config.hpp"
#include "io/csv.hpp"
#include "io/report.hpp"
#include "io/svg.hpp"
#include "io/touchstone.hpp"
