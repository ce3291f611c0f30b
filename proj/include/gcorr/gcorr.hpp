#pragma once

#include "gcorr/correlation.hpp"
#include "gcorr/graph.hpp"
#include "gcorr/graph_io.hpp"
#include "gcorr/graphgen.hpp"
#include "gcorr/kernel.hpp"
#include "gcorr/permutation.hpp"
#include "gcorr/rng.hpp"
#include "gcorr/spectral.hpp"
#include "gcorr/studies.hpp"
