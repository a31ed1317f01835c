#pragma once

#include "swarm/comm.hpp"
#include "swarm/config.hpp"
#include "swarm/control.hpp"
#include "swarm/core.hpp"
#include "swarm/diagnostics.hpp"
#include "swarm/forces.hpp"
#include "swarm/history.hpp"
#include "swarm/io.hpp"
#include "swarm/mc.hpp"
#include "swarm/metrics.hpp"
#include "swarm/rng.hpp"
#include "swarm/sim.hpp"
#include "swarm/vec.hpp"
