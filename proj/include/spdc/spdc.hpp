#pragma once

#include "spdc/analysis.hpp"
#include "spdc/biphoton.hpp"
#include "spdc/config.hpp"
#include "spdc/crystal.hpp"
#include "spdc/fft.hpp"
#include "spdc/grid.hpp"
#include "spdc/holography.hpp"
#include "spdc/io.hpp"
#include "spdc/modes.hpp"
#include "spdc/presets.hpp"
#include "spdc/propagation.hpp"
