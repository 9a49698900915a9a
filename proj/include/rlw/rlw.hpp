#pragma once

#include "rlw/errors.hpp"
#include "rlw/grid.hpp"
#include "rlw/stencil.hpp"
#include "rlw/norms.hpp"
#include "rlw/pentasolve.hpp"
#include "rlw/problems.hpp"
#include "rlw/scheme.hpp"
#include "rlw/harness.hpp"
#include "rlw/settings.hpp"
