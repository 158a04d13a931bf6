#pragma once

#include "leaksim/batch.hpp"
#include "leaksim/circuit.hpp"
#include "leaksim/gates.hpp"
#include "leaksim/numeric_policy.hpp"
#include "leaksim/protocol.hpp"
#include "leaksim/rng.hpp"
#include "leaksim/surface.hpp"
#include "leaksim/svg_plot.hpp"
#include "leaksim/tensor.hpp"
#include "leaksim/trace_io.hpp"
