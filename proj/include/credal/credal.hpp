#pragma once

#include "credal/errors.hpp"
#include "credal/numeric.hpp"
#include "credal/graph.hpp"
#include "credal/simplex.hpp"
#include "credal/polytope.hpp"
#include "credal/local_models.hpp"
#include "credal/network.hpp"
#include "credal/global_lp.hpp"
#include "credal/bracketing.hpp"
#include "credal/decompose.hpp"
#include "credal/chains.hpp"
#include "credal/conditioning.hpp"
#include "credal/oracle.hpp"
#include "credal/io.hpp"
