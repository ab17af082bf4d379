#include "efit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace efit {

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::dirichlet:
      return "dirichlet";
    case Topology::zero_ghost:
      return "zero_ghost";
    case Topology::periodic:
      return "periodic";
  }
  return "unknown";
}

Grid::Grid(double a, double b, std::size_t nodes, double dx, Topology topology)
    : a_(a), b_(b), nodes_(nodes), dx_(dx), topology_(topology) {
  if (!(b > a)) throw std::invalid_argument("Grid: need b > a");
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw std::invalid_argument("Grid: spacing must be positive");
  if (nodes < min_nodes)
    throw std::invalid_argument("Grid: at least " + std::to_string(min_nodes) +
                                " nodes required, got " + std::to_string(nodes));
}

Grid Grid::with_nodes(double a, double b, std::size_t nodes, Topology topology) {
  if (nodes < min_nodes)
    throw std::invalid_argument("Grid: at least " + std::to_string(min_nodes) +
                                " nodes required, got " + std::to_string(nodes));
  const double intervals = topology == Topology::periodic
                               ? static_cast<double>(nodes)
                               : static_cast<double>(nodes - 1);
  return Grid(a, b, nodes, (b - a) / intervals, topology);
}

Grid Grid::with_spacing(double a, double b, double dx, Topology topology) {
  if (!(dx > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
  const double intervals = (b - a) / dx;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, rounded))
    throw std::invalid_argument("Grid: spacing does not divide the interval");
  const auto count = static_cast<std::size_t>(rounded);
  const std::size_t nodes = topology == Topology::periodic ? count : count + 1;
  return Grid(a, b, nodes, dx, topology);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) x[i] = node(i);
  return x;
}

std::size_t Grid::wrap(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(nodes_);
  const std::ptrdiff_t r = i % n;
  return static_cast<std::size_t>(r < 0 ? r + n : r);
}

std::size_t MaskedField::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

double MaskedField::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (valid[i]) m = std::max(m, std::abs(values[i]));
  return m;
}

namespace {

void check_length(std::span<const double> v, const Grid& grid) {
  if (v.size() != grid.size())
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match grid size " +
                                std::to_string(grid.size()));
}

// Applies a forward two-point operator op(v_i, v_{i+1}) node-wise.
template <typename Op>
MaskedField forward_pair(std::span<const double> v, const Grid& grid, Op op) {
  const std::size_t n = v.size();
  MaskedField out{std::vector<double>(n, 0.0), std::vector<unsigned char>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.periodic()) {
      out.values[i] = op(v[i], v[grid.wrap(static_cast<std::ptrdiff_t>(i) + 1)]);
      out.valid[i] = 1;
    } else if (i + 1 < n) {
      out.values[i] = op(v[i], v[i + 1]);
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace

MaskedField diff_forward(std::span<const double> v, const Grid& grid, int power) {
  check_length(v, grid);
  if (power != 1 && power != 2)
    throw std::invalid_argument("diff_forward: power must be 1 or 2");
  const double dx = grid.dx();
  auto first = forward_pair(v, grid, [dx](double lo, double hi) { return (hi - lo) / dx; });
  if (power == 1) return first;
  auto second = forward_pair(first.values, grid,
                             [dx](double lo, double hi) { return (hi - lo) / dx; });
  for (std::size_t i = 0; i < second.size(); ++i) {
    const bool next_ok = grid.periodic() || (i + 1 < first.size() && first.valid[i + 1]);
    second.valid[i] = second.valid[i] && first.valid[i] && next_ok;
    if (!second.valid[i]) second.values[i] = 0.0;
  }
  return second;
}

MaskedField avg_forward(std::span<const double> v, const Grid& grid) {
  check_length(v, grid);
  return forward_pair(v, grid, [](double lo, double hi) { return 0.5 * (hi + lo); });
}

}  // namespace efit
