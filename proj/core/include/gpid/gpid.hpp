#pragma once

#include "gpid/bias.hpp"
#include "gpid/canonical.hpp"
#include "gpid/error.hpp"
#include "gpid/estimate.hpp"
#include "gpid/linalg.hpp"
#include "gpid/model.hpp"
#include "gpid/pid.hpp"
#include "gpid/solver.hpp"
