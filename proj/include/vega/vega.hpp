#pragma once

#include "vega/balgebra.hpp"
#include "vega/darboux.hpp"
#include "vega/galois_k2.hpp"
#include "vega/io.hpp"
#include "vega/km2.hpp"
#include "vega/numeric.hpp"
#include "vega/pipelines.hpp"
#include "vega/trig.hpp"
#include "vega/vebuild.hpp"
