#pragma once

// Spatial grids, nodal fields, time trajectories and the pointwise / rearrangement
// maps acting on them. Everything here is a value type; grids are shared immutably.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wed/errors.hpp"

namespace wed {

enum class Boundary { dirichlet, neumann, robin, periodic };

/// points: n >= 1 nodes on a line without boundary semantics (ODE systems,
/// small test vectors). interval/rectangle include both endpoints; torus is
/// the half-open periodic box [lower, upper).
enum class DomainKind { points, interval, rectangle, torus };

struct GridSpec {
  int dim = 1;
  DomainKind kind = DomainKind::interval;
  std::array<int, 2> nodes{3, 1};
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  Boundary boundary = Boundary::neumann;
  double robin_b = 0.0;
  /// Node spacing for DomainKind::points (other kinds derive it from the box).
  double point_spacing = 1.0;
  bool radial_symmetric = false;
};

/// Edge between two nodes adjacent along `axis`; forward difference is u[b] - u[a].
struct Edge {
  std::size_t a;
  std::size_t b;
  int axis;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  /// Validates the grid description and precomputes coordinates, edges and boundary nodes.
  static GridPtr build(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  DomainKind kind() const { return spec_.kind; }
  Boundary boundary() const { return spec_.boundary; }
  double robin_b() const { return spec_.robin_b; }

  int nodes(int axis) const { return spec_.nodes[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return size_; }

  /// h^d, the quadrature weight of every node.
  double cell_volume() const { return cell_volume_; }
  /// Boundary quadrature weight of node i (h^{d-1}; zero for interior nodes).
  double boundary_weight(std::size_t i) const { return boundary_weight_[i]; }

  std::array<double, 2> coord(std::size_t i) const;
  std::array<double, 2> center() const;
  std::size_t index(int ix, int iy = 0) const;
  std::array<int, 2> multi_index(std::size_t i) const;

  bool is_boundary(std::size_t i) const { return boundary_weight_[i] > 0.0 || on_box_boundary_[i]; }
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Diameter of the node-cell union (used by the fractional exterior weight).
  double diameter() const;

  bool operator==(const Grid& other) const;

 private:
  explicit Grid(const GridSpec& spec);

  GridSpec spec_;
  std::array<double, 2> spacing_{1.0, 1.0};
  std::size_t size_ = 0;
  double cell_volume_ = 1.0;
  std::vector<double> boundary_weight_;
  std::vector<bool> on_box_boundary_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<Edge> edges_;
};

bool same_grid(const Grid& a, const Grid& b);

/// Nodal values on a grid. Multi-component fields (e.g. the (u, v) pair of a
/// reaction-diffusion system) store components one after the other.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, int components = 1);
  Field(GridPtr grid, std::vector<double> values, int components = 1);
  Field(GridPtr grid, std::initializer_list<double> values) : Field(std::move(grid), std::vector<double>(values)) {}

  static Field constant(GridPtr grid, double value, int components = 1);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int components() const { return components_; }
  std::size_t size() const { return values_.size(); }
  std::size_t nodes() const { return grid_->size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& vector() const { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> component(int c) const;
  std::span<double> component(int c);

  /// Bitwise equality of values (grids must match).
  bool operator==(const Field& other) const;

 private:
  GridPtr grid_;
  int components_ = 1;
  std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b, const char* what);

/// Discrete curve t -> u(t) on the uniform time grid t_n = n T / N, n = 0..N.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(GridPtr grid, double horizon, int steps, int components = 1);

  /// Constant-in-time trajectory equal to `u`, pinned at t = 0.
  static Trajectory constant(const Field& u, double horizon, int steps);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int components() const { return components_; }
  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double dt() const { return horizon_ / steps_; }
  double time(int n) const { return horizon_ * n / steps_; }
  std::size_t slice_size() const { return slice_size_; }

  std::span<const double> slice(int n) const;
  std::span<double> slice(int n);
  Field field(int n) const;
  void set_slice(int n, const Field& u);

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  /// Pins u(0); the slice is overwritten with the pinned values.
  void pin_initial(const Field& u0);
  /// Pins the discrete initial velocity (u_1 - u_0)/dt (second-order problems).
  void pin_velocity(const Field& v0);
  const std::optional<Field>& pinned_initial() const { return pinned_initial_; }
  const std::optional<Field>& pinned_velocity() const { return pinned_velocity_; }
  /// True when u(0) is pinned and the first slice equals it exactly.
  bool initial_consistent() const;

  bool operator==(const Trajectory& other) const;

 private:
  GridPtr grid_;
  int components_ = 1;
  double horizon_ = 1.0;
  int steps_ = 1;
  std::size_t slice_size_ = 0;
  std::vector<double> data_;
  std::optional<Field> pinned_initial_;
  std::optional<Field> pinned_velocity_;
};

// ---- norms and pairings ------------------------------------------------------

/// (sum_i |u_i|^p h^d)^{1/p}
double lp_norm(std::span<const double> u, double p, double cell_volume);
double lp_norm(const Field& u, double p);
double sup_norm(std::span<const double> u);
/// sum_i u_i v_i h^d
double pairing(const Field& u, const Field& v);

// ---- lattice and pointwise maps ------------------------------------------------

/// Componentwise (u ^ v, u v v).
std::pair<Field, Field> lattice_min_max(const Field& u, const Field& v);
std::pair<Trajectory, Trajectory> lattice_min_max(const Trajectory& u, const Trajectory& v);

enum class TruncationMode { lower, upper };

/// lower: max(u, M) with M <= 0; upper: min(u, M) with M >= 0.
Field truncate(const Field& u, TruncationMode mode, double level);

enum class SignPart { positive, negative };

/// positive: u+; negative: -u-.
Field sign_part(const Field& u, SignPart part);

// ---- rearrangements ----------------------------------------------------------

enum class RearrangeKind { symmetric_decreasing, steiner, monotone };

struct Rearrangement {
  RearrangeKind kind = RearrangeKind::symmetric_decreasing;
  /// steiner: axis of the symmetrised lines; monotone: axis of the direction.
  int axis = 0;
  /// monotone only: +1 means values decrease as the coordinate increases.
  int direction = +1;
};

/// Node groups in rank order: within each group the largest value goes to the
/// first node. symmetric_decreasing has one group; steiner/monotone one per line.
std::vector<std::vector<std::size_t>> rearrangement_order(const Grid& grid, const Rearrangement& r);

/// Rearranges (u+) per component. Output values are a permutation of (u+).
Field rearrange(const Field& u, const Rearrangement& r);

// ---- rigid maps --------------------------------------------------------------

/// (R u)_i = u_{map[i]} for a node permutation induced by an isometry.
class NodePermutation {
 public:
  NodePermutation() = default;
  explicit NodePermutation(std::vector<std::size_t> map) : map_(std::move(map)) {}

  static NodePermutation identity(const Grid& grid);
  static NodePermutation reflection(const Grid& grid, int axis);
  /// 90 degree rotation about the centre of a square 2D grid.
  static NodePermutation rotation90(const Grid& grid);
  /// Shift by whole nodes on a torus: (R u)(x) = u(x + shift h).
  static NodePermutation translation(const Grid& grid, std::array<int, 2> shift);

  const std::vector<std::size_t>& map() const { return map_; }
  bool is_automorphism(const Grid& grid) const;

 private:
  std::vector<std::size_t> map_;
};

Field rigid_transform(const Field& u, const NodePermutation& r);

/// Mean along every line parallel to `axis` (constant in that direction).
Field average_along(const Field& u, int axis);

// ---- serialisation -----------------------------------------------------------

/// CSV with header "index,x[,y],value" (one block per component, index runs
/// over all stored values).
void write_field_csv(std::ostream& out, const Field& u);

}  // namespace wed
