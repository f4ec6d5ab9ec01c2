#pragma once

#include "wforge/analysis/affectedness.hpp"
#include "wforge/analysis/causes.hpp"
#include "wforge/analysis/report.hpp"
