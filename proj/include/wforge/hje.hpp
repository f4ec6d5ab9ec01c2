#pragma once

#include "wforge/hje/grounding.hpp"
#include "wforge/hje/normalize.hpp"
#include "wforge/hje/simplify.hpp"
#include "wforge/hje/tree.hpp"
#include "wforge/hje/unfold.hpp"
