#pragma once

// Umbrella header: the whole simulation stack.

#include "bearing_swarm/bearing.hpp"
#include "bearing_swarm/config.hpp"
#include "bearing_swarm/controller.hpp"
#include "bearing_swarm/errors.hpp"
#include "bearing_swarm/estimator.hpp"
#include "bearing_swarm/graph.hpp"
#include "bearing_swarm/reference.hpp"
#include "bearing_swarm/sim.hpp"
#include "bearing_swarm/svg_plot.hpp"
#include "bearing_swarm/trace_csv.hpp"
#include "bearing_swarm/unicycle.hpp"
