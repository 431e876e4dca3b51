#pragma once

#include "lakeice/classify.hpp"
#include "lakeice/climate.hpp"
#include "lakeice/core.hpp"
#include "lakeice/csv.hpp"
#include "lakeice/grid.hpp"
#include "lakeice/io.hpp"
#include "lakeice/phenology.hpp"
#include "lakeice/pipeline.hpp"
#include "lakeice/random.hpp"
#include "lakeice/svg.hpp"
#include "lakeice/synth.hpp"
#include "lakeice/timeline.hpp"
