#pragma once

#include "l0forge/bench.hpp"
#include "l0forge/certificate.hpp"
#include "l0forge/io.hpp"
#include "l0forge/linesearch.hpp"
#include "l0forge/lipschitz.hpp"
#include "l0forge/metric.hpp"
#include "l0forge/objective.hpp"
#include "l0forge/oracle.hpp"
#include "l0forge/solvers.hpp"
#include "l0forge/support.hpp"
#include "l0forge/threshold.hpp"
#include "l0forge/types.hpp"
