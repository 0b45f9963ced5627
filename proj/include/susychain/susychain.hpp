#pragma once

#include "susychain/numcore.hpp"
#include "susychain/lattice.hpp"
#include "susychain/continuum.hpp"
#include "susychain/susy.hpp"
#include "susychain/models.hpp"
