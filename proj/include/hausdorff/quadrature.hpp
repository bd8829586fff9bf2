#pragma once

#include "hausdorff/common.hpp"

#include <functional>
#include <vector>

namespace hausdorff {

/// Cell edges on [lo, hi]: the ends, every breakpoint strictly inside, and
/// uniform refinement so no cell is wider than max_width.
std::vector<double> axis_cells(double lo, double hi, const std::vector<double>& breakpoints,
                               double max_width = kInf);

/// Product Gauss-Legendre rule on a grid of cells. With cells aligned to the
/// discontinuities of a piecewise-polynomial integrand the rule is exact up to
/// round-off.
class TensorRule {
 public:
  /// edges[i] are the cell edges on axis i; order is the number of nodes per
  /// cell and axis (2, 4, 8 or 16).
  TensorRule(const std::vector<std::vector<double>>& edges, int order);

  int dimension() const { return static_cast<int>(nodes_.size()); }
  std::size_t size() const;

  /// Sum of w * f(x) over all nodes, reduced in a fixed order.
  double integrate(const std::function<double(const Vector&)>& f) const;
  /// Calls visit(x, w) for every node; visits may run concurrently.
  void for_each(const std::function<void(const Vector&, double)>& visit) const;

  struct Reduction {
    std::vector<double> sums;
    std::vector<double> maxima;
  };
  /// One pass over the nodes: f(x, sums, maxima) writes n_sums values that are
  /// integrated and n_max values whose maximum over the nodes is kept.
  Reduction reduce(std::size_t n_sums, std::size_t n_max,
                   const std::function<void(const Vector&, double*, double*)>& f) const;

 private:
  std::vector<std::vector<double>> nodes_;
  std::vector<std::vector<double>> weights_;
};

}  // namespace hausdorff
