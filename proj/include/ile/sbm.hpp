#pragma once

// Seeded stochastic block model generation.  Blocks are assigned
// contiguously (nodes 0..size_0-1 form block 0, and so on) and every
// unordered pair draws an independent Bernoulli edge from the block-pair
// probability.  shuffle_nodes applies a seed-derived relabeling afterwards
// so index order carries no block information.

#include <cstdint>
#include <string>
#include <vector>

#include "ile/errors.hpp"
#include "ile/graph.hpp"
#include "ile/matrix.hpp"

namespace ile {

struct SbmSpec {
  std::vector<std::int32_t> block_sizes;  // positive counts, sum = n
  Mat probabilities;                      // symmetric BxB, entries in [0,1]
  std::uint64_t seed = 0;
};

struct LabeledGraph {
  Graph graph;
  std::vector<std::int32_t> labels;  // class ids, contiguous from 0
  std::string meta;                  // provenance of the draw
};

// Draws the graph; labels are block ids.  Identical spec (seed included)
// reproduces the identical edge set.  Throws EmptyBlocks when block_sizes is
// empty or any block is empty, InvalidProbability when the matrix is not
// BxB symmetric with entries in [0,1].
LabeledGraph generate(const SbmSpec& spec);

// Two equal blocks; edge probabilities [[0.9, 0.5], [0.5, 0.1]] — a dense
// core, a sparse periphery, and intermediate coupling.  Throws OddN.
SbmSpec core_periphery_preset(std::int32_t n, std::uint64_t seed);

// Two equal blocks; edge probabilities [[0.99, 0.3], [0.3, 0.99]] — two
// assortative communities.  Throws OddN.
SbmSpec community_preset(std::int32_t n, std::uint64_t seed);

// Relabels nodes by a permutation drawn from `seed` (perm[old] = new),
// carrying labels along and recording the shuffle in meta.  The optional
// out-parameter receives the permutation used.
LabeledGraph shuffle_nodes(const LabeledGraph& in, std::uint64_t seed,
                           std::vector<std::int32_t>* perm_out = nullptr);

}  // namespace ile
