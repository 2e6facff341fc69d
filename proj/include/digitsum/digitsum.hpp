#pragma once

#include "digitsum/bigint.hpp"
#include "digitsum/clt.hpp"
#include "digitsum/digit_core.hpp"
#include "digitsum/enumerate.hpp"
#include "digitsum/exact_dist.hpp"
#include "digitsum/exponents.hpp"
#include "digitsum/serialize.hpp"
