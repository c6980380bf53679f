#pragma once

#include "blochwalk/special_functions.hpp"
#include "blochwalk/lattice.hpp"
#include "blochwalk/walk.hpp"
#include "blochwalk/observables.hpp"
#include "blochwalk/analytic.hpp"
#include "blochwalk/experiment.hpp"
