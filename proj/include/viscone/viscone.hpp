#pragma once

#include "rational.hpp"
#include "matcone.hpp"
#include "operators.hpp"
#include "radial.hpp"
#include "grid.hpp"
#include "envelopes.hpp"
#include "viscosity.hpp"
#include "perron.hpp"
