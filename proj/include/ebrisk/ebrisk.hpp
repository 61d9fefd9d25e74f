#pragma once

// Umbrella header: the whole library in one include.

#include "ebrisk/errors.hpp"
#include "ebrisk/gauss_hermite.hpp"
#include "ebrisk/prior.hpp"
#include "ebrisk/random.hpp"
#include "ebrisk/posterior.hpp"
#include "ebrisk/risk.hpp"
#include "ebrisk/bounds.hpp"
#include "ebrisk/search.hpp"
#include "ebrisk/io.hpp"
