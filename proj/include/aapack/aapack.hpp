#pragma once

// Aggregating Algorithm for prediction of packs.

#include "aapack/errors.hpp"
#include "aapack/numeric.hpp"
#include "aapack/matrix.hpp"
#include "aapack/game.hpp"
#include "aapack/aggregator.hpp"
#include "aapack/aap.hpp"
#include "aapack/parallel.hpp"
#include "aapack/bounds.hpp"
#include "aapack/mixloss.hpp"
#include "aapack/dataset.hpp"
#include "aapack/synthetic.hpp"
#include "aapack/experiment.hpp"
#include "aapack/report.hpp"
