#pragma once

#include "wforge/core/compare.hpp"
#include "wforge/core/errors.hpp"
#include "wforge/core/match.hpp"
#include "wforge/core/model.hpp"
#include "wforge/core/parser.hpp"
#include "wforge/core/printer.hpp"
#include "wforge/core/subst.hpp"
