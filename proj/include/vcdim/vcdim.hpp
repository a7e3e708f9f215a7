#pragma once

#include "vcdim/dataset.hpp"
#include "vcdim/discretize.hpp"
#include "vcdim/error.hpp"
#include "vcdim/experiment.hpp"
#include "vcdim/io.hpp"
#include "vcdim/linear_model.hpp"
#include "vcdim/parallel.hpp"
#include "vcdim/risk.hpp"
#include "vcdim/rng.hpp"
#include "vcdim/select.hpp"
#include "vcdim/vcbound.hpp"
#include "vcdim/xi.hpp"
