#pragma once

// Umbrella header for the SPMC library: circular-statistics primitives, the
// LO-free correlation front-end, manifold-domain estimation and detection,
// CRLB sensing analysis, and bearing-only localization. The Monte Carlo
// harness lives separately under spmc/harness/.

#include "spmc/alphabet.hpp"
#include "spmc/angles.hpp"
#include "spmc/bessel.hpp"
#include "spmc/calibration.hpp"
#include "spmc/channel.hpp"
#include "spmc/detection.hpp"
#include "spmc/errors.hpp"
#include "spmc/fusion.hpp"
#include "spmc/geometry.hpp"
#include "spmc/localization.hpp"
#include "spmc/observation.hpp"
#include "spmc/qfunc.hpp"
#include "spmc/rng.hpp"
#include "spmc/sensing.hpp"
#include "spmc/von_mises.hpp"
#include "spmc/waveform.hpp"
