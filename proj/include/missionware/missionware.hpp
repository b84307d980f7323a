#pragma once

#include "missionware/dot.hpp"
#include "missionware/error.hpp"
#include "missionware/model_io.hpp"
#include "missionware/patterns.hpp"
#include "missionware/report.hpp"
#include "missionware/risk.hpp"
#include "missionware/sgraph.hpp"
#include "missionware/sim.hpp"
#include "missionware/stamp.hpp"
#include "missionware/surface.hpp"
#include "missionware/threatdb.hpp"
