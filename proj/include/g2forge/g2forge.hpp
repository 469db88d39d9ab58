#pragma once
#include "config.hpp"
#include "exterior.hpp"
#include "expr.hpp"
#include "linalg.hpp"
#include "liealg.hpp"
#include "catalog.hpp"
#include "curvature.hpp"
#include "optimize.hpp"
#include "g2.hpp"
#include "solver.hpp"
#include "reductions.hpp"
#include "report.hpp"
#include "suites.hpp"
