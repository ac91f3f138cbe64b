#pragma once

#include "undulate/analysis.hpp"
#include "undulate/calibration.hpp"
#include "undulate/config.hpp"
#include "undulate/dynamics.hpp"
#include "undulate/error.hpp"
#include "undulate/geometry.hpp"
#include "undulate/io.hpp"
#include "undulate/nelder_mead.hpp"
#include "undulate/optimize.hpp"
#include "undulate/shapespace.hpp"
#include "undulate/svg.hpp"
