#pragma once

// Umbrella header for the spinmeter library.

#include "spinmeter/errors.hpp"
#include "spinmeter/geometry.hpp"
#include "spinmeter/linalg.hpp"
#include "spinmeter/measurement.hpp"
#include "spinmeter/serialization.hpp"
#include "spinmeter/sphere_grid.hpp"
#include "spinmeter/spin_system.hpp"
#include "spinmeter/states.hpp"
#include "spinmeter/symbols.hpp"
#include "spinmeter/tomography.hpp"
#include "spinmeter/type2.hpp"
#include "spinmeter/version.hpp"
