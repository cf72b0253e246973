#pragma once

#include "covdepth/analytic.hpp"
#include "covdepth/bounds.hpp"
#include "covdepth/channel.hpp"
#include "covdepth/errors.hpp"
#include "covdepth/ingest.hpp"
#include "covdepth/montecarlo.hpp"
#include "covdepth/presets.hpp"
#include "covdepth/rng.hpp"
#include "covdepth/special.hpp"
