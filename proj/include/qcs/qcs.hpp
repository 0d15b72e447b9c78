#pragma once

#include "qcs/analysis.hpp"
#include "qcs/harness.hpp"
#include "qcs/models.hpp"
#include "qcs/pbp.hpp"
#include "qcs/properties.hpp"
#include "qcs/quantize.hpp"
#include "qcs/rng.hpp"
#include "qcs/sensing.hpp"
#include "qcs/svg_plot.hpp"
