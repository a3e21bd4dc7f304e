#pragma once

#include "dmfsim/config.hpp"
#include "dmfsim/coupling.hpp"
#include "dmfsim/environment.hpp"
#include "dmfsim/generators.hpp"
#include "dmfsim/harness.hpp"
#include "dmfsim/limit.hpp"
#include "dmfsim/metrics.hpp"
#include "dmfsim/model.hpp"
#include "dmfsim/parallel.hpp"
#include "dmfsim/pdmp.hpp"
#include "dmfsim/report.hpp"
#include "dmfsim/rng.hpp"
#include "dmfsim/stats.hpp"
#include "dmfsim/test_functions.hpp"
