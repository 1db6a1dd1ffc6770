#pragma once

// Umbrella header.

#include "dovetail/bell.hpp"
#include "dovetail/bitstring.hpp"
#include "dovetail/corpus.hpp"
#include "dovetail/distinguisher.hpp"
#include "dovetail/harness.hpp"
#include "dovetail/io.hpp"
#include "dovetail/learner.hpp"
#include "dovetail/machine.hpp"
#include "dovetail/quantum.hpp"
#include "dovetail/rng.hpp"
#include "dovetail/sources.hpp"
