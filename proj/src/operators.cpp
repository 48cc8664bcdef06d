#include "ile/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ile/kernels.hpp"

namespace ile {

InterpolatedOperator::InterpolatedOperator(const Graph& g, double t, double s)
    : g_(&g), t_(t), s_(s), deg_(g.degree_vector()) {
  if (g.num_vertices() == 0) {
    throw EmptyGraphError("InterpolatedOperator over an empty graph");
  }
  if (!std::isfinite(t) || !std::isfinite(s)) {
    throw InvalidArgument("t and s must be finite");
  }
}

InterpolatedOperator InterpolatedOperator::with_shift(double zeta) const {
  InterpolatedOperator op = *this;
  op.shift_ += zeta;
  return op;
}

void InterpolatedOperator::apply(std::span<const double> x,
                                 std::span<double> y) const {
  std::size_t n = static_cast<std::size_t>(dim());
  if (x.size() != n || y.size() != n) {
    throw DimensionMismatch("apply: vector length != operator dimension");
  }
  kernels::K().interp_apply(t_, s_, shift_, deg_.data(),
                            g_->row_offsets().data(),
                            g_->col_indices().data(), g_->weights().data(),
                            dim(), x.data(), y.data());
}

std::vector<double> InterpolatedOperator::apply(
    const std::vector<double>& x) const {
  std::vector<double> y(x.size());
  apply(std::span<const double>(x), std::span<double>(y));
  return y;
}

double InterpolatedOperator::quadratic_form_edges(
    std::span<const double> x) const {
  std::size_t n = static_cast<std::size_t>(dim());
  if (x.size() != n) {
    throw DimensionMismatch(
        "quadratic_form_edges: vector length != operator dimension");
  }
  const auto& offs = g_->row_offsets();
  const auto& cols = g_->col_indices();
  const auto& wts = g_->weights();
  double acc = 0.0;
  for (std::int32_t u = 0; u < dim(); ++u) {
    for (std::int64_t p = offs[static_cast<std::size_t>(u)];
         p < offs[static_cast<std::size_t>(u) + 1]; ++p) {
      std::int32_t v = cols[static_cast<std::size_t>(p)];
      if (v <= u) continue;  // each undirected edge once
      double w = wts[static_cast<std::size_t>(p)];
      double xu = x[static_cast<std::size_t>(u)];
      double xv = x[static_cast<std::size_t>(v)];
      double d = xu - xv;
      acc += w * (t_ * d * d - 2.0 * (s_ - t_) * xu * xv);
    }
  }
  if (shift_ != 0.0) {
    acc += shift_ * kernels::K().dot(x.data(), x.data(), n);
  }
  return acc;
}

double InterpolatedOperator::rayleigh_quotient(
    std::span<const double> x) const {
  std::size_t n = static_cast<std::size_t>(dim());
  if (x.size() != n) {
    throw DimensionMismatch(
        "rayleigh_quotient: vector length != operator dimension");
  }
  double denom = kernels::K().dot(x.data(), x.data(), n);
  if (denom == 0.0) {
    throw InvalidArgument("rayleigh_quotient of the zero vector");
  }
  std::vector<double> y(n);
  apply(x, std::span<double>(y));
  return kernels::K().dot(x.data(), y.data(), n) / denom;
}

double InterpolatedOperator::gershgorin_upper_bound() const {
  double bound = -std::numeric_limits<double>::infinity();
  for (double d : deg_) {
    bound = std::max(bound, t_ * d + std::fabs(s_) * d);
  }
  return bound + shift_;
}

std::pair<InterpolatedOperator, double> from_deformed(const Graph& g,
                                                      double q) {
  return {InterpolatedOperator(g, q * q, q), 1.0 - q * q};
}

}  // namespace ile
