#pragma once

#include "wforge/chase/chase.hpp"
#include "wforge/chase/equivalence.hpp"
#include "wforge/chase/instance.hpp"
