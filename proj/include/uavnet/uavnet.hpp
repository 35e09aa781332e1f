#pragma once

// Umbrella header: the whole library in one include.

#include "uavnet/vec2.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/types.hpp"
#include "uavnet/model.hpp"
#include "uavnet/kmeans.hpp"
#include "uavnet/tour.hpp"
#include "uavnet/hungarian.hpp"
#include "uavnet/scheduling.hpp"
#include "uavnet/trajectory_opt.hpp"
#include "uavnet/power_opt.hpp"
#include "uavnet/bcd.hpp"
#include "uavnet/baselines.hpp"
#include "uavnet/io.hpp"
