#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace efit {

/// How stencil references outside the node range 0..M-1 are resolved.
enum class Topology {
  dirichlet,   // boundary nodes prescribed by a closure, never evolved
  zero_ghost,  // every reference outside the grid reads zero
  periodic,    // indices wrap modulo M
};

std::string_view to_string(Topology topology);

/// Uniform one-dimensional mesh.
///
/// Nodes are x_i = a + i*dx for i = 0..M-1. Bounded topologies include both
/// endpoints (dx = (b-a)/(M-1)); the periodic topology identifies b with a
/// and stores M = (b-a)/dx distinct nodes. dx is stored as constructed and
/// never recomputed from the endpoints.
class Grid {
 public:
  static constexpr std::size_t min_nodes = 5;

  /// Grid with a given node count; dx is derived once here.
  static Grid with_nodes(double a, double b, std::size_t nodes,
                         Topology topology);

  /// Grid with a given spacing. (b-a)/dx must be an integer up to 1e-9
  /// relative; dx is kept bit-exact as passed.
  static Grid with_spacing(double a, double b, double dx, Topology topology);

  double a() const { return a_; }
  double b() const { return b_; }
  double dx() const { return dx_; }
  std::size_t size() const { return nodes_; }
  Topology topology() const { return topology_; }
  bool periodic() const { return topology_ == Topology::periodic; }

  double node(std::size_t i) const { return a_ + static_cast<double>(i) * dx_; }
  std::vector<double> nodes() const;

  /// Mathematical modulo: always lands in 0..M-1.
  std::size_t wrap(std::ptrdiff_t i) const;

 private:
  Grid(double a, double b, std::size_t nodes, double dx, Topology topology);

  double a_;
  double b_;
  std::size_t nodes_;
  double dx_;
  Topology topology_;
};

/// Node-wise values with an explicit validity mask. Entries whose stencil
/// left a bounded grid are invalid; they are never read by reductions.
struct MaskedField {
  std::vector<double> values;
  std::vector<unsigned char> valid;

  std::size_t size() const { return values.size(); }
  bool is_valid(std::size_t i) const { return valid[i] != 0; }
  std::size_t valid_count() const;
  /// Max |value| over valid entries; 0 if none are valid.
  double max_abs() const;
};

/// k-fold forward difference (k in {1, 2}): entry i is D^k v at node i.
MaskedField diff_forward(std::span<const double> v, const Grid& grid,
                         int power = 1);

/// Forward average: entry i is (v_{i+1} + v_i)/2.
MaskedField avg_forward(std::span<const double> v, const Grid& grid);

}  // namespace efit
