#pragma once

#include "cstn/core.hpp"
#include "cstn/io.hpp"
#include "cstn/qbf.hpp"
#include "cstn/reduction.hpp"
#include "cstn/solver.hpp"
#include "cstn/stn.hpp"
#include "cstn/strategy.hpp"
