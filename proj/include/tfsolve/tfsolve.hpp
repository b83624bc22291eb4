#pragma once

#include "tfsolve/acceptance.hpp"
#include "tfsolve/cheb.hpp"
#include "tfsolve/local_models.hpp"
#include "tfsolve/phm.hpp"
#include "tfsolve/precision.hpp"
#include "tfsolve/reference.hpp"
#include "tfsolve/resummation.hpp"
#include "tfsolve/series.hpp"
#include "tfsolve/shooting.hpp"
