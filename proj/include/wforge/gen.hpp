#pragma once

#include "wforge/gen/edb.hpp"
#include "wforge/gen/generator.hpp"
#include "wforge/gen/rng.hpp"
#include "wforge/gen/scenario.hpp"
