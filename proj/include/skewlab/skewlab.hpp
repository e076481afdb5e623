#pragma once

#include "skewlab/config.hpp"
#include "skewlab/csv.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/fiber_map.hpp"
#include "skewlab/genericity.hpp"
#include "skewlab/hyperbolicity.hpp"
#include "skewlab/interval.hpp"
#include "skewlab/markov.hpp"
#include "skewlab/measures.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/skew.hpp"
#include "skewlab/strips.hpp"
#include "skewlab/svg.hpp"
#include "skewlab/transition.hpp"
#include "skewlab/word.hpp"
