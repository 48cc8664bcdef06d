#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ile/graph.hpp"

namespace ile {

// Matrix-free symmetric operator M = t*D - s*A (+ shift*I) over a graph.
// D is the weighted degree diagonal and A the adjacency matrix; the graph is
// held by reference and must outlive the operator.  The shift term exists so
// spectra of M + zeta*I can be probed without materializing anything.
class InterpolatedOperator {
 public:
  InterpolatedOperator(const Graph& g, double t, double s);
  // The operator only borrows the graph; forbid binding to a temporary.
  InterpolatedOperator(Graph&&, double, double) = delete;

  InterpolatedOperator with_shift(double zeta) const;

  double t() const { return t_; }
  double s() const { return s_; }
  double shift() const { return shift_; }
  std::int32_t dim() const { return g_->num_vertices(); }
  const Graph& graph() const { return *g_; }
  const DegreeVector& degrees() const { return deg_; }

  // y = (t*D - s*A + shift*I) x
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(const std::vector<double>& x) const;

  // <x, M x> accumulated edge by edge:
  //   sum over edges (u,v) of w * [ t*(x_u - x_v)^2 - 2*(s - t)*x_u*x_v ]
  // plus shift*<x, x>.  Agrees with <x, apply(x)> to rounding.
  double quadratic_form_edges(std::span<const double> x) const;

  // <x, M x> / <x, x>; throws InvalidArgument on the zero vector.
  double rayleigh_quotient(std::span<const double> x) const;

  // max over vertices of t*deg(u) + |s|*deg(u), plus shift: an upper bound
  // on every eigenvalue by the Gershgorin disc theorem.
  double gershgorin_upper_bound() const;

 private:
  const Graph* g_;
  double t_;
  double s_;
  double shift_ = 0.0;
  DegreeVector deg_;
};

// The deformed Laplacian I - q*A + q^2*(D - I) equals M(q^2, q) + (1 - q^2)*I.
// Returns the operator together with that spectral shift.
std::pair<InterpolatedOperator, double> from_deformed(const Graph& g, double q);

}  // namespace ile
