#pragma once

#include "mgl/errors.hpp"
#include "mgl/jets.hpp"
#include "mgl/grid.hpp"
#include "mgl/grid_io.hpp"
#include "mgl/field.hpp"
#include "mgl/geometry.hpp"
#include "mgl/isothermal.hpp"
#include "mgl/solvers.hpp"
#include "mgl/builtins.hpp"
#include "mgl/verify.hpp"
#include "mgl/report.hpp"
