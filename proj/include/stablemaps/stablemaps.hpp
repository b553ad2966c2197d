#pragma once

#include "eulerchi.hpp"
#include "io.hpp"
#include "qfield.hpp"
#include "series.hpp"
#include "solver.hpp"
#include "target.hpp"
#include "trees.hpp"
