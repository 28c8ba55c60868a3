#pragma once

#include "errors.hpp"
#include "fbrwa.hpp"
#include "floquet.hpp"
#include "fockspace.hpp"
#include "fullmodel.hpp"
#include "harness/emit.hpp"
#include "harness/run.hpp"
#include "harness/scenario.hpp"
#include "ode.hpp"
