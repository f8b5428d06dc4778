#pragma once

#include "graphdamp/checker.hpp"
#include "graphdamp/delay_ops.hpp"
#include "graphdamp/errors.hpp"
#include "graphdamp/function.hpp"
#include "graphdamp/mesh.hpp"
#include "graphdamp/oracle.hpp"
#include "graphdamp/problem_io.hpp"
#include "graphdamp/simulate.hpp"
#include "graphdamp/solver.hpp"
#include "graphdamp/system.hpp"
#include "graphdamp/tree.hpp"
