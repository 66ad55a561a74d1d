#pragma once

#include "regret/analysis.hpp"
#include "regret/audit.hpp"
#include "regret/corpus.hpp"
#include "regret/engine.hpp"
#include "regret/error.hpp"
#include "regret/functions.hpp"
#include "regret/prospect.hpp"
#include "regret/random.hpp"
#include "regret/summation.hpp"
#include "regret/text.hpp"
