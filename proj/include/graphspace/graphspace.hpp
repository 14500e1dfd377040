#ifndef GRAPHSPACE_GRAPHSPACE_HPP
#define GRAPHSPACE_GRAPHSPACE_HPP

#include "graphspace/errors.hpp"
#include "graphspace/graph.hpp"
#include "graphspace/objective.hpp"
#include "graphspace/assignment.hpp"
#include "graphspace/matching.hpp"
#include "graphspace/parallel.hpp"
#include "graphspace/stats.hpp"
#include "graphspace/generate.hpp"
#include "graphspace/io.hpp"
#include "graphspace/pipelines.hpp"

#endif
