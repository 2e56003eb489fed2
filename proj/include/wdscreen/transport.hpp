#pragma once

#include "wdscreen/transport/types.hpp"
#include "wdscreen/transport/assignment.hpp"
#include "wdscreen/transport/network_simplex.hpp"
#include "wdscreen/transport/sinkhorn.hpp"
#include "wdscreen/transport/multivariate_rank.hpp"
