#pragma once

#include "hsflow/analysis.hpp"
#include "hsflow/asymptotics.hpp"
#include "hsflow/config.hpp"
#include "hsflow/csv.hpp"
#include "hsflow/errors.hpp"
#include "hsflow/experiment.hpp"
#include "hsflow/kernel.hpp"
#include "hsflow/model.hpp"
#include "hsflow/presets.hpp"
#include "hsflow/quadrature.hpp"
#include "hsflow/reference_solver.hpp"
#include "hsflow/spectral.hpp"
#include "hsflow/wellposedness.hpp"
