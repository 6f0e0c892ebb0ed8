#include "wed/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace wed {

namespace {

bool finite_all(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---- Grid --------------------------------------------------------------------

GridPtr Grid::build(const GridSpec& spec) {
  return GridPtr(new Grid(spec));
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec_.dim != 1 && spec_.dim != 2) throw ConfigError("grid: dim must be 1 or 2");
  if (spec_.dim == 1) spec_.nodes[1] = 1;
  if (spec_.kind == DomainKind::rectangle && spec_.dim != 2)
    throw ConfigError("grid: rectangle requires dim 2");
  if (spec_.kind == DomainKind::points && spec_.dim != 1)
    throw ConfigError("grid: points domain is one-dimensional");
  if (spec_.kind == DomainKind::torus && spec_.boundary != Boundary::periodic)
    throw ConfigError("grid: torus requires periodic boundary");
  if (spec_.kind != DomainKind::torus && spec_.boundary == Boundary::periodic)
    throw ConfigError("grid: periodic boundary requires a torus domain");
  if (spec_.boundary == Boundary::robin && !(spec_.robin_b > 0.0))
    throw ConfigError("grid: robin boundary requires b > 0");

  for (int a = 0; a < spec_.dim; ++a) {
    const auto k = static_cast<std::size_t>(a);
    const int n = spec_.nodes[k];
    const int min_nodes = spec_.kind == DomainKind::points ? 1 : 3;
    if (n < min_nodes)
      throw ConfigError("grid: axis " + std::to_string(a) + " needs at least " + std::to_string(min_nodes) +
                        " nodes, got " + std::to_string(n));
    double h = 0.0;
    if (spec_.kind == DomainKind::points) {
      h = spec_.point_spacing;
    } else {
      const double len = spec_.upper[k] - spec_.lower[k];
      h = spec_.kind == DomainKind::torus ? len / n : len / (n - 1);
    }
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid: spacing must be positive");
    spacing_[k] = h;
  }
  if (spec_.dim == 1) spacing_[1] = 1.0;

  size_ = static_cast<std::size_t>(spec_.nodes[0]) * static_cast<std::size_t>(spec_.nodes[1]);
  cell_volume_ = spec_.dim == 1 ? spacing_[0] : spacing_[0] * spacing_[1];

  boundary_weight_.assign(size_, 0.0);
  on_box_boundary_.assign(size_, false);
  const int nx = spec_.nodes[0];
  const int ny = spec_.nodes[1];

  if (spec_.kind == DomainKind::interval || spec_.kind == DomainKind::rectangle) {
    for (std::size_t i = 0; i < size_; ++i) {
      const auto [ix, iy] = multi_index(i);
      const bool xb = ix == 0 || ix == nx - 1;
      const bool yb = spec_.dim == 2 && (iy == 0 || iy == ny - 1);
      if (!xb && !yb) continue;
      on_box_boundary_[i] = true;
      boundary_nodes_.push_back(i);
      if (spec_.dim == 1) {
        boundary_weight_[i] = 1.0;
      } else if (xb && yb) {
        boundary_weight_[i] = 0.5 * (spacing_[0] + spacing_[1]);
      } else {
        boundary_weight_[i] = xb ? spacing_[1] : spacing_[0];
      }
    }
  }
  if (spec_.kind == DomainKind::points || spec_.boundary != Boundary::robin) {
    std::fill(boundary_weight_.begin(), boundary_weight_.end(), 0.0);
  }

  const bool wrap = spec_.kind == DomainKind::torus;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (ix + 1 < nx) edges_.push_back({index(ix, iy), index(ix + 1, iy), 0});
      else if (wrap) edges_.push_back({index(ix, iy), index(0, iy), 0});
      if (spec_.dim == 2) {
        if (iy + 1 < ny) edges_.push_back({index(ix, iy), index(ix, iy + 1), 1});
        else if (wrap) edges_.push_back({index(ix, iy), index(ix, 0), 1});
      }
    }
  }
}

std::array<double, 2> Grid::coord(std::size_t i) const {
  const auto [ix, iy] = multi_index(i);
  return {spec_.lower[0] + ix * spacing_[0], spec_.dim == 2 ? spec_.lower[1] + iy * spacing_[1] : 0.0};
}

std::array<double, 2> Grid::center() const {
  std::array<double, 2> c{0.0, 0.0};
  for (int a = 0; a < spec_.dim; ++a) {
    const auto k = static_cast<std::size_t>(a);
    c[k] = spec_.lower[k] + 0.5 * (spec_.nodes[k] - 1) * spacing_[k];
  }
  return c;
}

std::size_t Grid::index(int ix, int iy) const {
  return static_cast<std::size_t>(iy) * static_cast<std::size_t>(spec_.nodes[0]) + static_cast<std::size_t>(ix);
}

std::array<int, 2> Grid::multi_index(std::size_t i) const {
  const auto nx = static_cast<std::size_t>(spec_.nodes[0]);
  return {static_cast<int>(i % nx), static_cast<int>(i / nx)};
}

double Grid::diameter() const {
  double s = 0.0;
  for (int a = 0; a < spec_.dim; ++a) {
    const auto k = static_cast<std::size_t>(a);
    const double len = spec_.nodes[k] * spacing_[k];
    s += len * len;
  }
  return std::sqrt(s);
}

bool Grid::operator==(const Grid& o) const {
  return spec_.dim == o.spec_.dim && spec_.kind == o.spec_.kind && spec_.nodes == o.spec_.nodes &&
         spacing_ == o.spacing_ && spec_.lower == o.spec_.lower && spec_.boundary == o.spec_.boundary &&
         spec_.robin_b == o.spec_.robin_b;
}

bool same_grid(const Grid& a, const Grid& b) { return &a == &b || a == b; }

// ---- Field -------------------------------------------------------------------

Field::Field(GridPtr grid, int components) : Field(grid, std::vector<double>(grid ? grid->size() * components : 0), components) {}

Field::Field(GridPtr grid, std::vector<double> values, int components)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (!grid_) throw ConfigError("field: null grid");
  if (components_ < 1) throw ConfigError("field: component count must be positive");
  if (values_.size() != grid_->size() * static_cast<std::size_t>(components_))
    throw GridMismatch("field: value count " + std::to_string(values_.size()) + " does not match " +
                       std::to_string(grid_->size() * components_) + " grid slots");
  if (!finite_all(values_)) throw ConfigError("field: non-finite value");
}

Field Field::constant(GridPtr grid, double value, int components) {
  const std::size_t n = grid->size() * static_cast<std::size_t>(components);
  return Field(std::move(grid), std::vector<double>(n, value), components);
}

std::span<const double> Field::component(int c) const {
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * nodes(), nodes());
}

std::span<double> Field::component(int c) {
  return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * nodes(), nodes());
}

bool Field::operator==(const Field& o) const {
  return components_ == o.components_ && same_grid(*grid_, *o.grid_) && values_ == o.values_;
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!same_grid(a.grid(), b.grid()) || a.components() != b.components())
    throw GridMismatch(std::string(what) + ": fields live on different grids");
}

// ---- Trajectory --------------------------------------------------------------

Trajectory::Trajectory(GridPtr grid, double horizon, int steps, int components)
    : grid_(std::move(grid)), components_(components), horizon_(horizon), steps_(steps) {
  if (!grid_) throw ConfigError("trajectory: null grid");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ConfigError("trajectory: horizon must be positive");
  if (steps_ < 1) throw ConfigError("trajectory: need at least one time step");
  slice_size_ = grid_->size() * static_cast<std::size_t>(components_);
  data_.assign(slice_size_ * static_cast<std::size_t>(steps_ + 1), 0.0);
}

Trajectory Trajectory::constant(const Field& u, double horizon, int steps) {
  Trajectory t(u.grid_ptr(), horizon, steps, u.components());
  for (int n = 0; n <= steps; ++n) t.set_slice(n, u);
  t.pin_initial(u);
  return t;
}

std::span<const double> Trajectory::slice(int n) const {
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(n) * slice_size_, slice_size_);
}

std::span<double> Trajectory::slice(int n) {
  return std::span<double>(data_).subspan(static_cast<std::size_t>(n) * slice_size_, slice_size_);
}

Field Trajectory::field(int n) const {
  auto s = slice(n);
  return Field(grid_, std::vector<double>(s.begin(), s.end()), components_);
}

void Trajectory::set_slice(int n, const Field& u) {
  if (!same_grid(*grid_, u.grid()) || u.components() != components_)
    throw GridMismatch("trajectory: slice field lives on a different grid");
  std::copy(u.values().begin(), u.values().end(), slice(n).begin());
}

void Trajectory::pin_initial(const Field& u0) {
  set_slice(0, u0);
  pinned_initial_ = u0;
}

void Trajectory::pin_velocity(const Field& v0) {
  if (!same_grid(*grid_, v0.grid()) || v0.components() != components_)
    throw GridMismatch("trajectory: velocity field lives on a different grid");
  if (steps_ < 2) throw ConfigError("trajectory: velocity pinning needs at least 3 time knots");
  pinned_velocity_ = v0;
  if (pinned_initial_) {
    auto s0 = slice(0);
    auto s1 = slice(1);
    for (std::size_t i = 0; i < slice_size_; ++i) s1[i] = s0[i] + dt() * v0[i];
  }
}

bool Trajectory::initial_consistent() const {
  if (!pinned_initial_) return false;
  auto s0 = slice(0);
  return std::equal(s0.begin(), s0.end(), pinned_initial_->values().begin());
}

bool Trajectory::operator==(const Trajectory& o) const {
  return steps_ == o.steps_ && horizon_ == o.horizon_ && components_ == o.components_ &&
         same_grid(*grid_, *o.grid_) && data_ == o.data_;
}

// ---- norms -------------------------------------------------------------------

double lp_norm(std::span<const double> u, double p, double cell_volume) {
  if (std::isinf(p)) return sup_norm(u);
  double s = 0.0;
  for (double x : u) s += std::pow(std::abs(x), p);
  return std::pow(s * cell_volume, 1.0 / p);
}

double lp_norm(const Field& u, double p) { return lp_norm(u.values(), p, u.grid().cell_volume()); }

double sup_norm(std::span<const double> u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

double pairing(const Field& u, const Field& v) {
  require_same_grid(u, v, "pairing");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s * u.grid().cell_volume();
}

// ---- lattice and pointwise maps ------------------------------------------------

std::pair<Field, Field> lattice_min_max(const Field& u, const Field& v) {
  require_same_grid(u, v, "lattice_min_max");
  Field lo = u;
  Field hi = v;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lo[i] = std::min(u[i], v[i]);
    hi[i] = std::max(u[i], v[i]);
  }
  return {std::move(lo), std::move(hi)};
}

std::pair<Trajectory, Trajectory> lattice_min_max(const Trajectory& u, const Trajectory& v) {
  if (!same_grid(u.grid(), v.grid()) || u.steps() != v.steps() || u.horizon() != v.horizon() ||
      u.components() != v.components())
    throw GridMismatch("lattice_min_max: trajectories on different space-time grids");
  Trajectory lo = u;
  Trajectory hi = v;
  auto a = u.data();
  auto b = v.data();
  auto l = lo.data();
  auto h = hi.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    l[i] = std::min(a[i], b[i]);
    h[i] = std::max(a[i], b[i]);
  }
  if (u.pinned_initial() && v.pinned_initial()) {
    auto [p, q] = lattice_min_max(*u.pinned_initial(), *v.pinned_initial());
    lo.pin_initial(p);
    hi.pin_initial(q);
  }
  if (u.pinned_velocity() && v.pinned_velocity()) {
    auto [p, q] = lattice_min_max(*u.pinned_velocity(), *v.pinned_velocity());
    lo.pin_velocity(p);
    hi.pin_velocity(q);
  }
  return {std::move(lo), std::move(hi)};
}

Field truncate(const Field& u, TruncationMode mode, double level) {
  if (!std::isfinite(level)) throw ConfigError("truncate: level must be finite");
  if (mode == TruncationMode::lower && level > 0.0) throw ConfigError("truncate: lower mode requires M <= 0");
  if (mode == TruncationMode::upper && level < 0.0) throw ConfigError("truncate: upper mode requires M >= 0");
  Field r = u;
  for (auto& x : r.values()) x = mode == TruncationMode::lower ? std::max(x, level) : std::min(x, level);
  return r;
}

Field sign_part(const Field& u, SignPart part) {
  Field r = u;
  for (auto& x : r.values()) x = part == SignPart::positive ? std::max(x, 0.0) : std::min(x, 0.0);
  return r;
}

// ---- rigid maps --------------------------------------------------------------

NodePermutation NodePermutation::identity(const Grid& grid) {
  std::vector<std::size_t> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
  return NodePermutation(std::move(m));
}

NodePermutation NodePermutation::reflection(const Grid& grid, int axis) {
  if (axis < 0 || axis >= grid.dim()) throw ConfigError("reflection: axis out of range");
  std::vector<std::size_t> m(grid.size());
  const int n = grid.nodes(axis);
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto ix = grid.multi_index(i);
    auto& k = ix[static_cast<std::size_t>(axis)];
    k = grid.kind() == DomainKind::torus ? (n - k) % n : n - 1 - k;
    m[i] = grid.index(ix[0], ix[1]);
  }
  return NodePermutation(std::move(m));
}

NodePermutation NodePermutation::rotation90(const Grid& grid) {
  if (grid.dim() != 2 || grid.nodes(0) != grid.nodes(1) || grid.spacing(0) != grid.spacing(1))
    throw ConfigError("rotation90: requires a square 2D grid");
  const int n = grid.nodes(0);
  std::vector<std::size_t> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto [ix, iy] = grid.multi_index(i);
    // (Ru)(x, y) = u(y, -x) about the centre
    const int jx = iy;
    const int jy = grid.kind() == DomainKind::torus ? (n - ix) % n : n - 1 - ix;
    m[i] = grid.index(jx, jy);
  }
  return NodePermutation(std::move(m));
}

NodePermutation NodePermutation::translation(const Grid& grid, std::array<int, 2> shift) {
  if (grid.kind() != DomainKind::torus) throw ConfigError("translation: only torus grids are translation invariant");
  std::vector<std::size_t> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto ix = grid.multi_index(i);
    for (int a = 0; a < grid.dim(); ++a) {
      const auto k = static_cast<std::size_t>(a);
      const int n = grid.nodes(a);
      ix[k] = ((ix[k] + shift[k]) % n + n) % n;
    }
    m[i] = grid.index(ix[0], ix[1]);
  }
  return NodePermutation(std::move(m));
}

bool NodePermutation::is_automorphism(const Grid& grid) const {
  if (map_.size() != grid.size()) return false;
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t j : map_) {
    if (j >= map_.size() || seen[j]) return false;
    seen[j] = true;
  }
  auto key = [](std::size_t a, std::size_t b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); };
  std::vector<std::pair<std::size_t, std::size_t>> e0;
  std::vector<std::pair<std::size_t, std::size_t>> e1;
  for (const auto& e : grid.edges()) {
    e0.push_back(key(e.a, e.b));
    e1.push_back(key(map_[e.a], map_[e.b]));
  }
  std::sort(e0.begin(), e0.end());
  std::sort(e1.begin(), e1.end());
  if (e0 != e1) return false;
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (grid.boundary_weight(i) != grid.boundary_weight(map_[i])) return false;
    if (grid.is_boundary(i) != grid.is_boundary(map_[i])) return false;
  }
  return true;
}

Field rigid_transform(const Field& u, const NodePermutation& r) {
  if (!r.is_automorphism(u.grid())) throw ConfigError("rigid_transform: permutation is not a grid automorphism");
  Field out = u;
  const std::size_t n = u.nodes();
  for (int c = 0; c < u.components(); ++c) {
    auto src = u.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[r.map()[i]];
  }
  return out;
}

Field average_along(const Field& u, int axis) {
  const Grid& g = u.grid();
  if (axis < 0 || axis >= g.dim()) throw ConfigError("average_along: axis out of range");
  Field out = u;
  const int other = 1 - axis;
  const int nlines = g.dim() == 2 ? g.nodes(other) : 1;
  const int len = g.nodes(axis);
  for (int c = 0; c < u.components(); ++c) {
    auto src = u.component(c);
    auto dst = out.component(c);
    for (int l = 0; l < nlines; ++l) {
      auto node = [&](int k) { return axis == 0 ? g.index(k, l) : g.index(l, k); };
      double s = 0.0;
      for (int k = 0; k < len; ++k) s += src[node(k)];
      s /= len;
      for (int k = 0; k < len; ++k) dst[node(k)] = s;
    }
  }
  return out;
}

// ---- serialisation -----------------------------------------------------------

void write_field_csv(std::ostream& out, const Field& u) {
  const Grid& g = u.grid();
  out << (g.dim() == 2 ? "index,x,y,value\n" : "index,x,value\n");
  char buf[128];
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto x = g.coord(k % u.nodes());
    if (g.dim() == 2)
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, x[0], x[1], u[k]);
    else
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, x[0], u[k]);
    out << buf;
  }
}

}  // namespace wed
