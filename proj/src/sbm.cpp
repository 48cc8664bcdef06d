#include "ile/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ile/rng.hpp"

namespace ile {

namespace {

void validate(const SbmSpec& spec) {
  if (spec.block_sizes.empty()) {
    throw EmptyBlocks("sbm: block_sizes is empty");
  }
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
    if (spec.block_sizes[b] < 1) {
      throw EmptyBlocks("sbm: block " + std::to_string(b) + " has size " +
                        std::to_string(spec.block_sizes[b]));
    }
  }
  const auto B = static_cast<std::int64_t>(spec.block_sizes.size());
  if (spec.probabilities.rows != B || spec.probabilities.cols != B) {
    throw InvalidProbability(
        "sbm: probabilities must be " + std::to_string(B) + "x" +
        std::to_string(B) + ", got " + std::to_string(spec.probabilities.rows) +
        "x" + std::to_string(spec.probabilities.cols));
  }
  for (std::int64_t i = 0; i < B; ++i) {
    for (std::int64_t j = 0; j < B; ++j) {
      double p = spec.probabilities(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidProbability("sbm: probability [" + std::to_string(i) +
                                 "][" + std::to_string(j) + "] = " +
                                 std::to_string(p) + " outside [0,1]");
      }
      if (spec.probabilities(i, j) != spec.probabilities(j, i)) {
        throw InvalidProbability("sbm: probabilities not symmetric at [" +
                                 std::to_string(i) + "][" + std::to_string(j) +
                                 "]");
      }
    }
  }
}

std::string block_string(const std::vector<std::int32_t>& sizes) {
  std::string s;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (b > 0) s += '+';
    s += std::to_string(sizes[b]);
  }
  return s;
}

}  // namespace

LabeledGraph generate(const SbmSpec& spec) {
  validate(spec);

  std::vector<std::int32_t> labels;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
    labels.insert(labels.end(),
                  static_cast<std::size_t>(spec.block_sizes[b]),
                  static_cast<std::int32_t>(b));
  }
  const auto n = static_cast<std::int32_t>(labels.size());

  // One draw per unordered pair in a fixed (u, v) order, regardless of the
  // probability value, so the edge set is a pure function of the spec.
  rng::Engine eng(spec.seed);
  std::vector<Edge> edges;
  for (std::int32_t u = 0; u < n; ++u) {
    for (std::int32_t v = u + 1; v < n; ++v) {
      double p = spec.probabilities(labels[static_cast<std::size_t>(u)],
                                    labels[static_cast<std::size_t>(v)]);
      if (rng::uniform01(eng) < p) edges.push_back({u, v, 1.0});
    }
  }

  LabeledGraph out;
  out.graph = Graph::from_edge_list(edges, n);
  out.labels = std::move(labels);
  out.meta = "sbm(blocks=" + block_string(spec.block_sizes) +
             ", seed=" + std::to_string(spec.seed) + ")";
  return out;
}

namespace {

SbmSpec two_block_preset(std::int32_t n, std::uint64_t seed, double within_0,
                         double cross, double within_1, const char* name) {
  if (n < 2 || n % 2 != 0) {
    throw OddN(std::string(name) +
               " preset needs an even n >= 2, got " + std::to_string(n));
  }
  SbmSpec spec;
  spec.block_sizes = {n / 2, n / 2};
  spec.probabilities = Mat(2, 2);
  spec.probabilities(0, 0) = within_0;
  spec.probabilities(0, 1) = cross;
  spec.probabilities(1, 0) = cross;
  spec.probabilities(1, 1) = within_1;
  spec.seed = seed;
  return spec;
}

}  // namespace

SbmSpec core_periphery_preset(std::int32_t n, std::uint64_t seed) {
  return two_block_preset(n, seed, 0.9, 0.5, 0.1, "core-periphery");
}

SbmSpec community_preset(std::int32_t n, std::uint64_t seed) {
  return two_block_preset(n, seed, 0.99, 0.3, 0.99, "community");
}

LabeledGraph shuffle_nodes(const LabeledGraph& in, std::uint64_t seed,
                           std::vector<std::int32_t>* perm_out) {
  const std::int32_t n = in.graph.num_vertices();
  rng::Engine eng(seed);
  std::vector<std::int32_t> perm = rng::permutation(n, eng);

  std::vector<Edge> edges;
  for (const Edge& e : in.graph.to_edge_list()) {
    edges.push_back({perm[static_cast<std::size_t>(e.u)],
                     perm[static_cast<std::size_t>(e.v)], e.w});
  }
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n));
  for (std::int32_t u = 0; u < n; ++u) {
    labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(u)])] =
        in.labels[static_cast<std::size_t>(u)];
  }

  LabeledGraph out;
  out.graph = Graph::from_edge_list(edges, n);
  out.labels = std::move(labels);
  out.meta = in.meta + "; shuffle(seed=" + std::to_string(seed) + ")";
  if (perm_out != nullptr) *perm_out = std::move(perm);
  return out;
}

}  // namespace ile
