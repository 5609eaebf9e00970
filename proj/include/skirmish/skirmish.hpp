#pragma once

// Umbrella include for the whole library.

#include "skirmish/arena.hpp"
#include "skirmish/btree.hpp"
#include "skirmish/config.hpp"
#include "skirmish/config_io.hpp"
#include "skirmish/controllers.hpp"
#include "skirmish/eqs.hpp"
#include "skirmish/geom.hpp"
#include "skirmish/harness.hpp"
#include "skirmish/pathfind.hpp"
#include "skirmish/policy.hpp"
#include "skirmish/ppo.hpp"
#include "skirmish/rng.hpp"
#include "skirmish/sensors.hpp"
#include "skirmish/skills.hpp"
#include "skirmish/tasks.hpp"
#include "skirmish/trace.hpp"
