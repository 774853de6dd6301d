// Umbrella header.
#pragma once

#include "seisid/cli.hpp"
#include "seisid/dataio.hpp"
#include "seisid/dataset.hpp"
#include "seisid/errors.hpp"
#include "seisid/metrics.hpp"
#include "seisid/model.hpp"
#include "seisid/rls.hpp"
#include "seisid/scenarios.hpp"
