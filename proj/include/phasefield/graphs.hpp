#pragma once

// Graph generators used by the synthetic recovery experiments.

#include <vector>

#include "phasefield/model.hpp"
#include "phasefield/rng.hpp"

namespace phasefield {

/// Uniform random labelled tree on p nodes (decoded from a random Prufer sequence).
GraphStructure random_tree(int p, Rng& rng);

/// Decodes a Prufer sequence of length p - 2 with entries in [0, p).
GraphStructure tree_from_prufer(const std::vector<int>& seq);

/// rows x cols lattice, each node linked to its four neighbours with
/// wraparound. Node index is r * cols + c. On a side of length 2 the
/// wrapped and direct neighbour coincide and the edge appears once.
GraphStructure toroidal_grid(int rows, int cols);

/// Every edge of g with the same coupling.
GraphModel uniform_coupling(const GraphStructure& g, double kappa, double mu = 0.0);

} // namespace phasefield
