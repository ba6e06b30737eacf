#pragma once

#include "cantorperm/bitmask.hpp"
#include "cantorperm/errors.hpp"
#include "cantorperm/exact_linalg.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/gsets.hpp"
#include "cantorperm/linmon.hpp"
#include "cantorperm/measures.hpp"
#include "cantorperm/permcat.hpp"
#include "cantorperm/rational.hpp"
#include "cantorperm/serialize.hpp"
