#include "hausdorff/quadrature.hpp"

#include "hausdorff/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>

namespace hausdorff {

namespace {

template <unsigned N>
void reference_rule(std::vector<double>& x, std::vector<double>& w) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& a = Rule::abscissa();
  const auto& b = Rule::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(b[i]);
      continue;
    }
    x.push_back(-a[i]);
    w.push_back(b[i]);
    x.push_back(a[i]);
    w.push_back(b[i]);
  }
}

void reference_rule(int order, std::vector<double>& x, std::vector<double>& w) {
  switch (order) {
    case 2:
      return reference_rule<2>(x, w);
    case 4:
      return reference_rule<4>(x, w);
    case 8:
      return reference_rule<8>(x, w);
    case 16:
      return reference_rule<16>(x, w);
    default:
      throw DomainError("Gauss-Legendre order must be 2, 4, 8 or 16");
  }
}

}  // namespace

std::vector<double> axis_cells(double lo, double hi, const std::vector<double>& breakpoints, double max_width) {
  if (!(hi > lo)) throw DomainError("axis_cells: empty interval");
  std::vector<double> points{lo, hi};
  for (double b : breakpoints)
    if (b > lo && b < hi) points.push_back(b);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (!std::isfinite(max_width)) return points;
  std::vector<double> edges{points.front()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double a = points[i - 1];
    const double b = points[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int k = 1; k < pieces; ++k) edges.push_back(a + (b - a) * k / pieces);
    edges.push_back(b);
  }
  return edges;
}

TensorRule::TensorRule(const std::vector<std::vector<double>>& edges, int order) {
  if (edges.empty()) throw DomainError("TensorRule: no axes");
  std::vector<double> rx, rw;
  reference_rule(order, rx, rw);
  for (const auto& axis : edges) {
    if (axis.size() < 2) throw DomainError("TensorRule: an axis needs at least one cell");
    std::vector<double> nodes, weights;
    for (std::size_t c = 0; c + 1 < axis.size(); ++c) {
      const double half = 0.5 * (axis[c + 1] - axis[c]);
      const double mid = 0.5 * (axis[c + 1] + axis[c]);
      for (std::size_t k = 0; k < rx.size(); ++k) {
        nodes.push_back(mid + half * rx[k]);
        weights.push_back(half * rw[k]);
      }
    }
    nodes_.push_back(std::move(nodes));
    weights_.push_back(std::move(weights));
  }
}

std::size_t TensorRule::size() const {
  std::size_t n = 1;
  for (const auto& axis : nodes_) n *= axis.size();
  return n;
}

void TensorRule::for_each(const std::function<void(const Vector&, double)>& visit) const {
  const int dim = dimension();
  std::size_t inner = 1;
  for (int a = 1; a < dim; ++a) inner *= nodes_[a].size();
  parallel_for(nodes_[0].size(), [&](std::size_t i0) {
    Vector x(dim);
    x(0) = nodes_[0][i0];
    for (std::size_t flat = 0; flat < inner; ++flat) {
      double w = weights_[0][i0];
      std::size_t rest = flat;
      for (int a = dim - 1; a >= 1; --a) {
        const std::size_t k = rest % nodes_[a].size();
        rest /= nodes_[a].size();
        x(a) = nodes_[a][k];
        w *= weights_[a][k];
      }
      visit(x, w);
    }
  });
}

double TensorRule::integrate(const std::function<double(const Vector&)>& f) const {
  const int dim = dimension();
  std::size_t inner = 1;
  for (int a = 1; a < dim; ++a) inner *= nodes_[a].size();
  const std::vector<double> slabs = parallel_map(nodes_[0].size(), [&](std::size_t i0) {
    Vector x(dim);
    x(0) = nodes_[0][i0];
    double sum = 0.0;
    for (std::size_t flat = 0; flat < inner; ++flat) {
      double w = 1.0;
      std::size_t rest = flat;
      for (int a = dim - 1; a >= 1; --a) {
        const std::size_t k = rest % nodes_[a].size();
        rest /= nodes_[a].size();
        x(a) = nodes_[a][k];
        w *= weights_[a][k];
      }
      sum += w * f(x);
    }
    return weights_[0][i0] * sum;
  });
  double total = 0.0;
  for (double s : slabs) total += s;
  return total;
}

TensorRule::Reduction TensorRule::reduce(std::size_t n_sums, std::size_t n_max,
                                         const std::function<void(const Vector&, double*, double*)>& f) const {
  const int dim = dimension();
  std::size_t inner = 1;
  for (int a = 1; a < dim; ++a) inner *= nodes_[a].size();
  const std::size_t slabs = nodes_[0].size();
  std::vector<Reduction> partial(slabs);
  parallel_for(slabs, [&](std::size_t i0) {
    Reduction& out = partial[i0];
    out.sums.assign(n_sums, 0.0);
    out.maxima.assign(n_max, -kInf);
    std::vector<double> s(n_sums), m(n_max);
    Vector x(dim);
    x(0) = nodes_[0][i0];
    for (std::size_t flat = 0; flat < inner; ++flat) {
      double w = weights_[0][i0];
      std::size_t rest = flat;
      for (int a = dim - 1; a >= 1; --a) {
        const std::size_t k = rest % nodes_[a].size();
        rest /= nodes_[a].size();
        x(a) = nodes_[a][k];
        w *= weights_[a][k];
      }
      f(x, s.data(), m.data());
      for (std::size_t j = 0; j < n_sums; ++j) out.sums[j] += w * s[j];
      for (std::size_t j = 0; j < n_max; ++j) out.maxima[j] = std::max(out.maxima[j], m[j]);
    }
  });
  Reduction total{std::vector<double>(n_sums, 0.0), std::vector<double>(n_max, -kInf)};
  for (const Reduction& r : partial) {
    for (std::size_t j = 0; j < n_sums; ++j) total.sums[j] += r.sums[j];
    for (std::size_t j = 0; j < n_max; ++j) total.maxima[j] = std::max(total.maxima[j], r.maxima[j]);
  }
  return total;
}

}  // namespace hausdorff
