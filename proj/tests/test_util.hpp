#pragma once

#include <cmath>

// absolute-tolerance check; doctest's Approx mixes in a relative term
#define CHECK_CLOSE(x, expected, tol) CHECK(std::fabs((x) - (expected)) <= (tol))
