#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ile/eigensolver.hpp"
#include "ile/graph.hpp"
#include "ile/matrix.hpp"
#include "ile/operators.hpp"

namespace ile {

enum class Convention {
  SmallestEnd,  // eigenvectors at the small end of M(t,s)
  LargestEnd,   // eigenvectors at the large end of the adjacency matrix
};

// k-dimensional spectral node embedding: row u of `coords` is the embedding
// of node u.  Columns are sign-canonicalized unit eigenvectors.
struct Embedding {
  Mat coords;                        // n x k
  std::optional<double> t, s;        // absent for adjacency-convention
  std::int32_t k = 0;
  Convention convention = Convention::SmallestEnd;
  std::vector<std::int32_t> skipped; // indices dropped as near-zero modes
  std::vector<double> eigenvalues;   // the k retained eigenvalues
};

// Embedding from the k smallest eigenpairs of M(t,s), solved as k+1 pairs.
// When t == s the constant vector is an exact kernel direction of the
// family, so the one near-zero mode (|lambda - shift| below
// 1e-8 * max(1,|t|) * max-degree) is dropped and the next k are kept; for
// any other (t,s) the k smallest are kept unchanged.
// Throws NotConnectedError on disconnected graphs (callers route those
// through largest_connected_component first), InvalidArgument for k < 1 and
// TooLargeError for k >= n.
Embedding compute_ile(const Graph& g, double t, double s, std::int32_t k,
                      double tol = 1e-8, std::uint64_t seed = 0);

// Same, but on an explicit operator (exposes the shifted family to tests).
Embedding compute_ile(const InterpolatedOperator& op, std::int32_t k,
                      double tol = 1e-8, std::uint64_t seed = 0);

// Embedding from the k largest adjacency eigenpairs, columns ordered by
// descending eigenvalue.  Preconditions and errors as compute_ile.
Embedding compute_adjacency_embedding(const Graph& g, std::int32_t k,
                                      double tol = 1e-8,
                                      std::uint64_t seed = 0);

// [base | standardized coords].  Embedding columns are centered and scaled
// to unit population variance before concatenation (a constant column, e.g.
// the Perron vector of a regular graph, standardizes to all zeros).  With
// no base the standardized coords are returned alone.  Throws
// DimensionMismatch when base.rows != coords.rows.
Mat augment_features(const Mat* base, const Embedding& emb);

// CSV export: header `node,ev_1..ev_k`, one row per node.
void write_embedding_csv(const Embedding& emb, std::ostream& out);
void write_embedding_csv_file(const Embedding& emb, const std::string& path);

// JSON sidecar with solve metadata (t and s are omitted for the adjacency
// convention).
void write_embedding_sidecar(const Embedding& emb, double tol,
                             std::uint64_t seed, std::ostream& out);
void write_embedding_sidecar_file(const Embedding& emb, double tol,
                                  std::uint64_t seed,
                                  const std::string& path);

}  // namespace ile
