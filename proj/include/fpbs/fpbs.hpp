#pragma once

// Umbrella header for the FPBS-QAP solver library.

#include "fpbs/bench.hpp"
#include "fpbs/bls.hpp"
#include "fpbs/construct.hpp"
#include "fpbs/driver.hpp"
#include "fpbs/elite_pool.hpp"
#include "fpbs/fpmine.hpp"
#include "fpbs/instance.hpp"
#include "fpbs/matrix.hpp"
#include "fpbs/qap_core.hpp"
#include "fpbs/qaplib_io.hpp"
#include "fpbs/rng.hpp"
