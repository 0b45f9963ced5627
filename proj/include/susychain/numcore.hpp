#pragma once

#include "susychain/errors.hpp"
#include "susychain/numcore/banded.hpp"
#include "susychain/numcore/calculus.hpp"
#include "susychain/numcore/grid.hpp"
#include "susychain/numcore/hermitian.hpp"
#include "susychain/numcore/parallel.hpp"
#include "susychain/numcore/roots.hpp"
#include "susychain/numcore/small_matrix.hpp"
