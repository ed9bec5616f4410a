#pragma once

#include "hypobgk/basis.hpp"
#include "hypobgk/config.hpp"
#include "hypobgk/core.hpp"
#include "hypobgk/discrete_models.hpp"
#include "hypobgk/entropy.hpp"
#include "hypobgk/lyapunov.hpp"
#include "hypobgk/mode_operators.hpp"
#include "hypobgk/optim.hpp"
#include "hypobgk/simulator.hpp"
#include "hypobgk/trace.hpp"
