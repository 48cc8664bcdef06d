#pragma once

// Dataset plumbing: file loading with largest-component compaction,
// degree-derived labels, feature corruption, and train/test splitting.
//
// File formats (all indices 0-based):
//   edge list  — "u v [w]" per line, '#' comments, as graph-core
//   features   — CSV, one row per node, d real columns, no header
//   labels     — CSV "node,label" rows; a leading "node,label" header line
//                is accepted and skipped

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ile/errors.hpp"
#include "ile/graph.hpp"
#include "ile/matrix.hpp"

namespace ile {

struct Dataset {
  Graph graph;
  std::optional<Mat> features;       // n x d, rows aligned with graph ids
  std::vector<std::int32_t> labels;  // contiguous from 0; empty if no file
  std::string name;
  // Maps each (possibly re-indexed) node back to its id in the raw files;
  // the identity when the raw graph was already connected.
  std::vector<std::int32_t> index_map;
};

struct Split {
  std::vector<std::int32_t> train_idx;
  std::vector<std::int32_t> test_idx;
  std::uint64_t seed = 0;
};

// Loads and validates a dataset.  The raw vertex count is max id + 1 from
// the edge file; when the raw graph is disconnected only the largest
// component is kept, with features/labels rows re-indexed along index_map.
// Raw label values may be arbitrary integers; they are compacted to
// contiguous ids 0..C-1 in ascending value order.  Empty feature/label
// paths skip the respective file.  `name` defaults to the edge file's stem.
// Throws IoError, ParseError (with line number), DimensionMismatch when the
// feature row count differs from the raw vertex count, MissingLabelsError
// when a kept node has no label.
Dataset load_dataset(const std::string& edge_path,
                     const std::string& feature_path = "",
                     const std::string& label_path = "",
                     const std::string& name = "");

// Label 1 for the ceil(top_fraction * n) highest weighted-degree nodes,
// label 0 otherwise; degree ties admit lower node indices first.  Throws
// InvalidFraction unless 0 < top_fraction < 1.
std::vector<std::int32_t> degree_labels(const Graph& g, double top_fraction);

// Adds independent N(0, sigma^2) noise to every entry of floor(ratio * n)
// rows, chosen uniformly from `seed`; the remaining rows are bit-identical.
// Throws InvalidRatio outside [0,1]; InvalidArgument for sigma < 0.
Mat corrupt_features(const Mat& x, double ratio, double sigma = 1.0,
                     std::uint64_t seed = 0);

// Uniform permutation split: first floor(0.7 n) indices train, rest test.
// Throws TooSmallError for n < 2.
Split split_70_30(std::int32_t n, std::uint64_t seed);

// Writers matching the loader's formats (weights in shortest round-trip
// decimal form, so load -> write -> load is bit-exact).
void write_edge_list_file(const Graph& g, const std::string& path);
void write_labels_csv(const std::vector<std::int32_t>& labels,
                      std::ostream& out);
void write_labels_csv_file(const std::vector<std::int32_t>& labels,
                           const std::string& path);

}  // namespace ile
