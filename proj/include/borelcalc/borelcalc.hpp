#pragma once

// Convenience include for the whole library.

#include "borelcalc/common.hpp"
#include "borelcalc/contour.hpp"
#include "borelcalc/exptype.hpp"
#include "borelcalc/symbols.hpp"
#include "borelcalc/zerofinder.hpp"
#include "borelcalc/operator_calculus.hpp"
#include "borelcalc/solver.hpp"
#include "borelcalc/zetasolver.hpp"
#include "borelcalc/cli.hpp"
