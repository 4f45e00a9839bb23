#pragma once

// Everything: exact rational functions, the ring S, periodic systems, the
// cyclic representation, and both decoupling pipelines.

#include "perdec/decouple_nonsquare.hpp"
#include "perdec/decouple_square.hpp"
#include "perdec/io.hpp"
