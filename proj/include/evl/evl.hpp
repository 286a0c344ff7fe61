#pragma once

#include "evl/errors.hpp"
#include "evl/bounded_value.hpp"
#include "evl/special_points.hpp"
#include "evl/transcendental.hpp"
#include "evl/interval_union.hpp"
#include "evl/tripling.hpp"
#include "evl/observables.hpp"
#include "evl/extremal_index.hpp"
#include "evl/ternary_orbit.hpp"
#include "evl/monte_carlo.hpp"
#include "evl/grid_oracle.hpp"
#include "evl/json_io.hpp"
#include "evl/config.hpp"
#include "evl/checks.hpp"
#include "evl/reproduction.hpp"
