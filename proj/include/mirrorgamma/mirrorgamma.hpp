#pragma once

// Everything in one include.

#include "mirrorgamma/rational.hpp"
#include "mirrorgamma/toric/fan.hpp"
#include "mirrorgamma/toric/curves.hpp"
#include "mirrorgamma/toric/cohomology.hpp"
#include "mirrorgamma/toric/polytope.hpp"
#include "mirrorgamma/classes/graded_class.hpp"
#include "mirrorgamma/classes/divisor.hpp"
#include "mirrorgamma/classes/characteristic.hpp"
#include "mirrorgamma/gw/j_function.hpp"
#include "mirrorgamma/gw/rhs.hpp"
#include "mirrorgamma/mirror/laurent.hpp"
#include "mirrorgamma/mirror/assumptions.hpp"
#include "mirrorgamma/mirror/minimize.hpp"
#include "mirrorgamma/mirror/montecarlo.hpp"
#include "mirrorgamma/mirror/region.hpp"
#include "mirrorgamma/mirror/integrals.hpp"
#include "mirrorgamma/harness/report.hpp"
#include "mirrorgamma/harness/checks.hpp"
