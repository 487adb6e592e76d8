#pragma once

// Probability-density flow analysis for small feed-forward networks:
// finite state spaces, sparse stochastic operators, partition-based
// abstraction/concretization pairs and their abstract transformers,
// all validated against brute-force enumeration.

#include "pai/analysis.hpp"
#include "pai/distribution.hpp"
#include "pai/domain.hpp"
#include "pai/errors.hpp"
#include "pai/io.hpp"
#include "pai/lifting.hpp"
#include "pai/linear_operator.hpp"
#include "pai/mnist.hpp"
#include "pai/network.hpp"
#include "pai/network_io.hpp"
#include "pai/oracle.hpp"
#include "pai/parallel.hpp"
#include "pai/partition.hpp"
#include "pai/rng.hpp"
#include "pai/scalar.hpp"
#include "pai/transformer.hpp"
#include "pai/zonotope.hpp"
