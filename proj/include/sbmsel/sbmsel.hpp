#pragma once

#include "sbmsel/asymptotics.hpp"
#include "sbmsel/edge_list.hpp"
#include "sbmsel/errors.hpp"
#include "sbmsel/graph.hpp"
#include "sbmsel/harness.hpp"
#include "sbmsel/labels.hpp"
#include "sbmsel/likelihood.hpp"
#include "sbmsel/parallel.hpp"
#include "sbmsel/rng.hpp"
#include "sbmsel/sampling.hpp"
#include "sbmsel/selection.hpp"
#include "sbmsel/spectral.hpp"
#include "sbmsel/variational.hpp"
