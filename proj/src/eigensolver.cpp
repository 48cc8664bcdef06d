#include "ile/eigensolver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ile/kernels.hpp"
#include "ile/rng.hpp"

namespace ile {

namespace {

// Cyclic Jacobi eigendecomposition for small symmetric matrices (the
// projected problem inside Lanczos; at most a few dozen rows).  Kept
// in-house so the iterative path shares no eigensolver code with the
// Eigen-backed dense oracle it is tested against.
void jacobi_eigh(Mat a, std::vector<double>& evals, Mat& evecs) {
  const std::int64_t m = a.rows;
  evecs = Mat(m, m);
  for (std::int64_t i = 0; i < m; ++i) evecs(i, i) = 1.0;

  double frob2 = 0.0;
  for (double v : a.a) frob2 += v * v;
  const double stop = std::max(frob2, 1e-300) * 1e-28;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off2 = 0.0;
    for (std::int64_t p = 0; p < m; ++p) {
      for (std::int64_t q = p + 1; q < m; ++q) off2 += 2.0 * a(p, q) * a(p, q);
    }
    if (off2 <= stop) break;
    for (std::int64_t p = 0; p < m; ++p) {
      for (std::int64_t q = p + 1; q < m; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (std::int64_t i = 0; i < m; ++i) {
          double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::int64_t i = 0; i < m; ++i) {
          double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::int64_t i = 0; i < m; ++i) {
          double vip = evecs(i, p), viq = evecs(i, q);
          evecs(i, p) = c * vip - s * viq;
          evecs(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  evals.resize(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    evals[static_cast<std::size_t>(i)] = a(i, i);
  }
}

std::vector<std::int32_t> find_degenerate_gaps(
    const std::vector<double>& evals) {
  std::vector<std::int32_t> flagged;
  for (std::size_t j = 0; j + 1 < evals.size(); ++j) {
    if (evals[j + 1] - evals[j] < 1e-6) {
      flagged.push_back(static_cast<std::int32_t>(j));
    }
  }
  return flagged;
}

}  // namespace

void canonicalize_sign(Mat& vectors) {
  for (std::int64_t j = 0; j < vectors.cols; ++j) {
    double best = 0.0;
    for (std::int64_t i = 0; i < vectors.rows; ++i) {
      best = std::max(best, std::fabs(vectors(i, j)));
    }
    if (best == 0.0) {
      throw InvalidArgument("canonicalize_sign: zero column " +
                            std::to_string(j));
    }
    // Anything within a 1e-6 relative band of the maximum counts as tied;
    // the lowest tied index decides.  A strict comparison would let solver
    // round-off pick either end of a symmetric vector such as (a, 0, -a).
    std::int64_t arg = 0;
    const double cut = best * (1.0 - 1e-6);
    for (std::int64_t i = 0; i < vectors.rows; ++i) {
      if (std::fabs(vectors(i, j)) >= cut) {
        arg = i;
        break;
      }
    }
    if (vectors(arg, j) < 0.0) {
      for (std::int64_t i = 0; i < vectors.rows; ++i) {
        vectors(i, j) = -vectors(i, j);
      }
    }
  }
}

double gershgorin_upper_bound(const InterpolatedOperator& op) {
  return op.gershgorin_upper_bound();
}

namespace {

// Lanczos with full reorthogonalization and thick restarts on B = c*I - M.
// Because every new direction is orthogonalized against the whole basis and
// the first-pass coefficients are stored, the projected matrix T is the
// exact Rayleigh-Ritz projection V^T B V; restarting with Ritz vectors then
// needs no special arrowhead bookkeeping, and injecting a fresh random
// direction at any point (breakdown or confirmation probes) stays exact.
//
// A single Krylov sequence cannot see extra copies of a multiple eigenvalue,
// so passing residual checks does not yet prove the pairs are the *smallest*
// k.  After a tentative convergence the solver therefore restarts with just
// the k converged Ritz vectors plus a fresh random direction (a probe) and
// keeps expanding.  The probe's own sequence converges to the smallest
// remaining eigenvalue of the deflated complement, surfacing as the
// (k+1)-th Ritz value; the tentative set is accepted only once that pair
// has converged *above* the tentative k-th value while the bottom k stayed
// put (or the basis spans the whole space, where Rayleigh-Ritz is exact).
// Two details matter: the probe must enter via a restart that only discards
// leftover couplings of *converged* pairs (cutting the recurrence chain of
// a half-converged pair stalls it), and a fixed number of probe steps would
// prove nothing when the deflated gap is small, hence the convergence-based
// stopping rule.
EigenPairs lanczos_smallest(const InterpolatedOperator& op, std::int32_t k,
                            const SolveOptions& opts) {
  const std::int32_t n = op.dim();
  if (k < 1 || k > n) {
    throw InvalidArgument("smallest_k: need 1 <= k <= n, got k = " +
                          std::to_string(k));
  }
  if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");

  const auto& kt = kernels::K();
  const double c = op.gershgorin_upper_bound();
  const std::int64_t m_max =
      std::min<std::int64_t>(n, std::max<std::int64_t>(4l * k, 40));
  const std::int64_t max_cycles =
      opts.max_iter > 0 ? opts.max_iter
                        : std::min<std::int64_t>(n, 10l * k + 100);
  const double stab = 10.0 * opts.tol;  // Ritz-value stability window

  rng::Engine eng(opts.seed);
  const std::size_t un = static_cast<std::size_t>(n);

  std::vector<std::vector<double>> V;
  V.reserve(static_cast<std::size_t>(m_max));
  Mat T(m_max, m_max);
  std::vector<double> w(un), mx(un), coef(static_cast<std::size_t>(m_max));

  auto orthogonalize = [&](std::vector<double>& v, double* coef_out) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < V.size(); ++i) {
        double h = kt.dot(v.data(), V[i].data(), un);
        kt.axpy(-h, V[i].data(), v.data(), un);
        if (coef_out) coef_out[i] += h;
      }
    }
  };

  auto fresh_vector = [&]() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::vector<double> v(un);
      for (auto& x : v) x = rng::uniform(eng, -1.0, 1.0);
      double pre = kernels::nrm2(v.data(), un);
      orthogonalize(v, nullptr);
      double nb = kernels::nrm2(v.data(), un);
      if (nb > 1e-8 * pre) {
        kt.scal(1.0 / nb, v.data(), un);
        return v;
      }
    }
    throw NoConvergenceError("lanczos: could not draw an independent vector",
                             {}, 0);
  };

  auto apply_B = [&](const double* x, double* y) {
    op.apply(std::span<const double>(x, un), std::span<double>(mx));
    for (std::size_t i = 0; i < un; ++i) y[i] = c * x[i] - mx[i];
  };

  std::int64_t matvecs = 0;
  double beta = 0.0;
  bool beta_usable = false;  // true when w holds the unnormalized leftover
  std::vector<double> theta;
  Mat S;
  std::vector<double> last_residuals;

  auto ritz_order = [&](std::int64_t m) {
    // descending Ritz values of B == ascending eigenvalues of M
    std::vector<std::int32_t> ord(static_cast<std::size_t>(m));
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](std::int32_t x, std::int32_t y) {
      return theta[static_cast<std::size_t>(x)] >
             theta[static_cast<std::size_t>(y)];
    });
    return ord;
  };

  auto ritz_vector = [&](std::int64_t m, std::int32_t col,
                         std::vector<double>& z) {
    std::fill(z.begin(), z.end(), 0.0);
    for (std::int64_t i = 0; i < m; ++i) {
      kt.axpy(S(i, col), V[static_cast<std::size_t>(i)].data(), z.data(), un);
    }
  };

  // Computes true residuals for the top-k Ritz pairs; fills `out` on
  // success (all below tol) and returns true.
  std::vector<double> z(un);
  auto try_finalize = [&](std::int64_t m, const std::vector<std::int32_t>& ord,
                          EigenPairs* out, std::vector<double>* resid_out) {
    std::vector<double> lambdas, resids;
    Mat Z(n, k);
    bool ok = true;
    for (std::int32_t j = 0; j < k; ++j) {
      std::int32_t col = ord[static_cast<std::size_t>(j)];
      ritz_vector(m, col, z);
      double nz = kernels::nrm2(z.data(), un);
      if (nz == 0.0) {
        ok = false;
        break;
      }
      kt.scal(1.0 / nz, z.data(), un);
      double lambda = c - theta[static_cast<std::size_t>(col)];
      op.apply(std::span<const double>(z), std::span<double>(mx));
      kt.axpy(-lambda, z.data(), mx.data(), un);
      double r = kernels::nrm2(mx.data(), un);
      resids.push_back(r);
      lambdas.push_back(lambda);
      for (std::int32_t i = 0; i < n; ++i) Z(i, j) = z[static_cast<std::size_t>(i)];
      if (r > opts.tol) ok = false;
    }
    if (resid_out) *resid_out = resids;
    if (!ok || !out) return ok;
    out->eigenvalues = std::move(lambdas);
    out->vectors = std::move(Z);
    out->residuals = std::move(resids);
    return true;
  };

  V.push_back(fresh_vector());

  std::vector<double> snapshot;  // tentative bottom-k values; empty = none
  bool probe_restart = false;  // restart on the converged k + a fresh draw
  std::int64_t cycle = 0;

  while (true) {
    std::int64_t filled = static_cast<std::int64_t>(V.size()) - 1;

    bool converged = false;
    EigenPairs result;

    while (true) {
      // Expand from the newest basis vector and complete its T column.
      std::int64_t j = static_cast<std::int64_t>(V.size()) - 1;
      apply_B(V.back().data(), w.data());
      ++matvecs;
      double pre = kernels::nrm2(w.data(), un);
      std::fill(coef.begin(), coef.begin() + j + 1, 0.0);
      orthogonalize(w, coef.data());
      for (std::int64_t i = 0; i <= j; ++i) {
        T(i, j) = coef[static_cast<std::size_t>(i)];
        T(j, i) = coef[static_cast<std::size_t>(i)];
      }
      filled = j + 1;
      beta = kernels::nrm2(w.data(), un);
      beta_usable = beta > std::max(pre * 1e-13, 1e-300);

      // Rayleigh-Ritz on the filled block.
      if (filled >= k) {
        Mat block(filled, filled);
        for (std::int64_t r = 0; r < filled; ++r) {
          for (std::int64_t cc = 0; cc < filled; ++cc) block(r, cc) = T(r, cc);
        }
        jacobi_eigh(std::move(block), theta, S);
        auto ord = ritz_order(filled);

        std::vector<double> curr(static_cast<std::size_t>(k));
        for (std::int32_t j2 = 0; j2 < k; ++j2) {
          curr[static_cast<std::size_t>(j2)] =
              c - theta[static_cast<std::size_t>(
                      ord[static_cast<std::size_t>(j2)])];
        }

        if (filled == n) {
          // The basis spans the whole space: Rayleigh-Ritz is exact, no
          // probing needed.  Accept iff the true residuals meet tol.
          if (try_finalize(filled, ord, &result, &last_residuals)) {
            converged = true;
            break;
          }
        } else if (!snapshot.empty()) {
          // Probe phase.  Any shift in the bottom-k values means a better
          // pair was hiding outside the old subspace; otherwise wait for
          // the (k+1)-th pair -- the smallest of the deflated complement --
          // to converge at or above the tentative k-th value.
          bool stable = true;
          for (std::int32_t j2 = 0; j2 < k; ++j2) {
            if (std::fabs(curr[static_cast<std::size_t>(j2)] -
                          snapshot[static_cast<std::size_t>(j2)]) > stab) {
              stable = false;
              break;
            }
          }
          if (!stable) {
            snapshot.clear();
          } else if (filled > k) {
            std::int32_t next_col = ord[static_cast<std::size_t>(k)];
            double mu = c - theta[static_cast<std::size_t>(next_col)];
            double est_next =
                beta * std::fabs(S(filled - 1, next_col));
            if (est_next <= stab && mu >= snapshot.back() - stab) {
              // Check the complement pair's true residual, then the final
              // gate on the bottom k.
              ritz_vector(filled, next_col, z);
              double nz = kernels::nrm2(z.data(), un);
              bool probe_ok = nz > 0.0;
              if (probe_ok) {
                kt.scal(1.0 / nz, z.data(), un);
                op.apply(std::span<const double>(z), std::span<double>(mx));
                kt.axpy(-mu, z.data(), mx.data(), un);
                probe_ok = kernels::nrm2(mx.data(), un) <= stab;
              }
              if (probe_ok &&
                  try_finalize(filled, ord, &result, &last_residuals)) {
                converged = true;
                break;
              }
            }
          }
        } else {
          // No tentative set yet: the usual residual estimate, then a true
          // residual check before the probe starts.
          bool est_ok = true;
          for (std::int32_t j2 = 0; j2 < k; ++j2) {
            double est = beta * std::fabs(S(
                filled - 1, ord[static_cast<std::size_t>(j2)]));
            if (est > opts.tol) {
              est_ok = false;
              break;
            }
          }
          if (est_ok && try_finalize(filled, ord, nullptr, &last_residuals)) {
            snapshot = curr;
            probe_restart = true;
            break;
          }
        }
      }

      if (filled >= m_max) break;  // basis full: thick restart
      if (beta_usable) {
        std::vector<double> v = w;
        kt.scal(1.0 / beta, v.data(), un);
        V.push_back(std::move(v));
      } else {
        V.push_back(fresh_vector());
        beta = 0.0;
      }
    }

    if (converged) {
      canonicalize_sign(result.vectors);
      result.iterations = matvecs;
      result.degenerate_gaps = find_degenerate_gaps(result.eigenvalues);
      return result;
    }

    if (++cycle >= max_cycles) {
      auto ord_f = ritz_order(filled);
      try_finalize(filled, ord_f, nullptr, &last_residuals);
      throw NoConvergenceError(
          "lanczos: no convergence within " + std::to_string(max_cycles) +
              " restart cycles",
          last_residuals, matvecs);
    }

    // Thick restart.  Normal restarts keep a little more than k Ritz
    // vectors so nearly converged pairs survive, and continue along the
    // leftover direction so the recurrence chain stays intact.  Probe
    // restarts keep exactly the k tentatively converged vectors and start
    // over from a fresh random direction.
    auto ord = ritz_order(filled);
    std::int64_t l;
    if (probe_restart) {
      l = k;
    } else {
      try_finalize(filled, ord, nullptr, &last_residuals);
      l = std::min<std::int64_t>(k + 10, m_max - 2);
      l = std::max<std::int64_t>(1, std::min<std::int64_t>(l, filled - 1));
    }
    std::vector<std::vector<double>> kept;
    kept.reserve(static_cast<std::size_t>(l) + 1);
    for (std::int64_t j2 = 0; j2 < l; ++j2) {
      std::vector<double> zj(un);
      ritz_vector(filled, ord[static_cast<std::size_t>(j2)], zj);
      double nz = kernels::nrm2(zj.data(), un);
      if (nz > 0.0) kt.scal(1.0 / nz, zj.data(), un);
      kept.push_back(std::move(zj));
    }
    std::vector<double> next;
    if (!probe_restart && beta_usable) {
      next = w;
      kt.scal(1.0 / beta, next.data(), un);
    }
    probe_restart = false;
    V = std::move(kept);
    T = Mat(m_max, m_max);
    for (std::int64_t j2 = 0; j2 < l; ++j2) {
      T(j2, j2) = theta[static_cast<std::size_t>(ord[static_cast<std::size_t>(j2)])];
    }
    if (!next.empty()) {
      // re-orthogonalize defensively against the kept Ritz vectors
      orthogonalize(next, nullptr);
      double nb = kernels::nrm2(next.data(), un);
      if (nb > 1e-10) {
        kt.scal(1.0 / nb, next.data(), un);
        V.push_back(std::move(next));
      } else {
        V.push_back(fresh_vector());
      }
    } else {
      V.push_back(fresh_vector());
    }
  }
}

}  // namespace

EigenPairs smallest_k(const InterpolatedOperator& op, std::int32_t k,
                      const SolveOptions& opts) {
  return lanczos_smallest(op, k, opts);
}

EigenPairs largest_k(const InterpolatedOperator& op, std::int32_t k,
                     const SolveOptions& opts) {
  InterpolatedOperator neg =
      InterpolatedOperator(op.graph(), -op.t(), -op.s()).with_shift(-op.shift());
  EigenPairs flipped = lanczos_smallest(neg, k, opts);
  EigenPairs out;
  std::int64_t kk = static_cast<std::int64_t>(flipped.eigenvalues.size());
  out.eigenvalues.resize(static_cast<std::size_t>(kk));
  out.residuals.resize(static_cast<std::size_t>(kk));
  out.vectors = Mat(flipped.vectors.rows, kk);
  for (std::int64_t j = 0; j < kk; ++j) {
    std::int64_t src = kk - 1 - j;
    out.eigenvalues[static_cast<std::size_t>(j)] =
        -flipped.eigenvalues[static_cast<std::size_t>(src)];
    out.residuals[static_cast<std::size_t>(j)] =
        flipped.residuals[static_cast<std::size_t>(src)];
    for (std::int64_t i = 0; i < flipped.vectors.rows; ++i) {
      out.vectors(i, j) = flipped.vectors(i, src);
    }
  }
  out.iterations = flipped.iterations;
  out.degenerate_gaps = find_degenerate_gaps(out.eigenvalues);
  return out;
}

EigenPairs dense_eig(const InterpolatedOperator& op, std::int32_t dense_limit) {
  const std::int32_t n = op.dim();
  if (n > dense_limit) {
    throw TooLargeError("dense_eig: n = " + std::to_string(n) +
                        " exceeds dense_limit = " + std::to_string(dense_limit));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto& offs = op.graph().row_offsets();
  const auto& cols = op.graph().col_indices();
  const auto& wts = op.graph().weights();
  const auto& deg = op.degrees();
  for (std::int32_t u = 0; u < n; ++u) {
    for (std::int64_t p = offs[static_cast<std::size_t>(u)];
         p < offs[static_cast<std::size_t>(u) + 1]; ++p) {
      m(u, cols[static_cast<std::size_t>(p)]) -=
          op.s() * wts[static_cast<std::size_t>(p)];
    }
    m(u, u) += op.t() * deg[static_cast<std::size_t>(u)] + op.shift();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NoConvergenceError("dense_eig: decomposition failed", {}, 0);
  }

  EigenPairs out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + n);
  out.vectors = Mat(n, n);
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = 0; j < n; ++j) {
      out.vectors(i, j) = solver.eigenvectors()(i, j);
    }
  }
  canonicalize_sign(out.vectors);
  out.residuals.resize(static_cast<std::size_t>(n));
  std::vector<double> zv(static_cast<std::size_t>(n)),
      mz(static_cast<std::size_t>(n));
  for (std::int32_t j = 0; j < n; ++j) {
    for (std::int32_t i = 0; i < n; ++i) {
      zv[static_cast<std::size_t>(i)] = out.vectors(i, j);
    }
    op.apply(std::span<const double>(zv), std::span<double>(mz));
    double r2 = 0.0;
    for (std::int32_t i = 0; i < n; ++i) {
      double d = mz[static_cast<std::size_t>(i)] -
                 out.eigenvalues[static_cast<std::size_t>(j)] *
                     zv[static_cast<std::size_t>(i)];
      r2 += d * d;
    }
    out.residuals[static_cast<std::size_t>(j)] = std::sqrt(r2);
  }
  out.iterations = 0;
  out.degenerate_gaps = find_degenerate_gaps(out.eigenvalues);
  return out;
}

}  // namespace ile
