#include "wed/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wed {

namespace {

std::string type_name(const Json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ScenarioError("field '" + path + "'", what); }

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + type_name(j));
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

int as_int(const Json& j, const std::string& path) {
  const double x = as_number(j, path);
  if (x != std::floor(x) || std::abs(x) > 1e9) fail(path, "expected an integer");
  return static_cast<int>(x);
}

std::vector<double> as_numbers(const Json& j, const std::string& path) {
  if (j.is_number()) return {as_number(j, path)};
  if (!j.is_array()) fail(path, "expected a number or an array of numbers, got " + type_name(j));
  std::vector<double> v;
  for (std::size_t k = 0; k < j.size(); ++k) v.push_back(as_number(j[k], path + "[" + std::to_string(k) + "]"));
  return v;
}

Json to_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// A JSON object being consumed: typed getters with defaults, every value
// (given or defaulted) copied into the effective configuration, unknown keys
// rejected at the end.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)), eff_(Json::object()) {
    if (!j.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object, got " + type_name(j));
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const Json& raw(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) fail(at(k), "required field is missing");
    return j_.at(k);
  }

  double num(const std::string& k, double def) {
    const double v = has(k) ? as_number(raw(k), at(k)) : def;
    eff_[k] = v;
    return v;
  }
  double num(const std::string& k) {
    const double v = as_number(raw(k), at(k));
    eff_[k] = v;
    return v;
  }
  int integer(const std::string& k, int def, int min = std::numeric_limits<int>::min()) {
    const int v = has(k) ? as_int(raw(k), at(k)) : def;
    if (v < min) fail(at(k), "must be at least " + std::to_string(min) + ", got " + std::to_string(v));
    eff_[k] = v;
    return v;
  }
  bool boolean(const std::string& k, bool def) {
    bool v = def;
    if (has(k)) {
      const Json& j = raw(k);
      if (!j.is_boolean()) fail(at(k), "expected a boolean, got " + type_name(j));
      v = j.get<bool>();
    }
    eff_[k] = v;
    return v;
  }
  std::string str(const std::string& k, const std::string& def) {
    std::string v = def;
    if (has(k)) {
      const Json& j = raw(k);
      if (!j.is_string()) fail(at(k), "expected a string, got " + type_name(j));
      v = j.get<std::string>();
    }
    eff_[k] = v;
    return v;
  }
  std::string str(const std::string& k) {
    if (!has(k)) fail(at(k), "required field is missing");
    return str(k, "");
  }
  std::vector<double> nums(const std::string& k, const std::vector<double>& def) {
    const auto v = has(k) ? as_numbers(raw(k), at(k)) : def;
    eff_[k] = to_array(v);
    return v;
  }

  template <class F>
  auto child(const std::string& k, F&& f) {
    Obj c(has(k) ? raw(k) : empty(), at(k));
    seen_.insert(k);
    if constexpr (std::is_void_v<decltype(f(c))>) {
      f(c);
      c.done();
      eff_[k] = c.eff_;
    } else {
      auto r = f(c);
      c.done();
      eff_[k] = c.eff_;
      return r;
    }
  }

  void put(const std::string& k, Json v) {
    seen_.insert(k);
    eff_[k] = std::move(v);
  }

  void done() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(at(k), "unknown field");
  }

  Json& eff() { return eff_; }

 private:
  static const Json& empty() {
    static const Json e = Json::object();
    return e;
  }

  const Json& j_;
  std::string path_;
  Json eff_;
  std::set<std::string> seen_;
};

// ---- grids and profiles --------------------------------------------------------

GridPtr parse_grid(Obj& o) {
  GridSpec s;
  const std::string kind = o.str("kind", "interval");
  if (kind == "points") s.kind = DomainKind::points;
  else if (kind == "interval") s.kind = DomainKind::interval;
  else if (kind == "rectangle") s.kind = DomainKind::rectangle;
  else if (kind == "torus") s.kind = DomainKind::torus;
  else fail(o.at("kind"), "unknown grid kind '" + kind + "' (points, interval, rectangle, torus)");
  const auto nodes = o.nums("nodes", {16});
  if (nodes.empty() || nodes.size() > 2) fail(o.at("nodes"), "expected one or two node counts");
  for (double n : nodes)
    if (n != std::floor(n) || n < 1) fail(o.at("nodes"), "node counts must be positive integers");
  s.dim = o.integer("dim", s.kind == DomainKind::rectangle ? 2 : static_cast<int>(nodes.size()));
  if (s.dim != 1 && s.dim != 2) fail(o.at("dim"), "must be 1 or 2");
  if (static_cast<int>(nodes.size()) != s.dim && nodes.size() != 1) fail(o.at("nodes"), "one count per dimension");
  s.nodes = {static_cast<int>(nodes[0]), s.dim == 2 ? static_cast<int>(nodes.back()) : 1};
  const auto lower = o.nums("lower", s.dim == 2 ? std::vector<double>{0.0, 0.0} : std::vector<double>{0.0});
  const auto upper = o.nums("upper", s.dim == 2 ? std::vector<double>{1.0, 1.0} : std::vector<double>{1.0});
  if (lower.size() != static_cast<std::size_t>(s.dim)) fail(o.at("lower"), "one value per dimension");
  if (upper.size() != static_cast<std::size_t>(s.dim)) fail(o.at("upper"), "one value per dimension");
  for (int a = 0; a < s.dim; ++a) {
    s.lower[static_cast<std::size_t>(a)] = lower[static_cast<std::size_t>(a)];
    s.upper[static_cast<std::size_t>(a)] = upper[static_cast<std::size_t>(a)];
  }
  const std::string bc =
      o.str("boundary", s.kind == DomainKind::torus ? "periodic" : "neumann");
  if (bc == "dirichlet") s.boundary = Boundary::dirichlet;
  else if (bc == "neumann") s.boundary = Boundary::neumann;
  else if (bc == "robin") s.boundary = Boundary::robin;
  else if (bc == "periodic") s.boundary = Boundary::periodic;
  else fail(o.at("boundary"), "unknown boundary '" + bc + "' (dirichlet, neumann, robin, periodic)");
  s.robin_b = o.num("robin_b", 0.0);
  s.point_spacing = o.num("point_spacing", 1.0);
  s.radial_symmetric = o.boolean("radial_symmetric", false);
  try {
    return Grid::build(s);
  } catch (const ConfigError& e) {
    throw ScenarioError("field '" + o.at("") + "'", e.what());
  }
}

// Offset of node i from the profile centre along one axis. Interval-type
// axes measure from the grid midpoint in half-integer steps and tori use
// the wrapped index, so mirror-image nodes get bitwise opposite offsets.
double axis_offset(const Grid& g, std::size_t i, int axis, double center) {
  const auto ix = g.multi_index(i)[static_cast<std::size_t>(axis)];
  const int n = g.nodes(axis);
  const double h = g.spacing(axis);
  const double lower = g.spec().lower[static_cast<std::size_t>(axis)];
  if (g.kind() == DomainKind::torus) {
    const int w = ix <= n / 2 ? ix : ix - n;
    return w * h + (lower - center);
  }
  return (ix - 0.5 * (n - 1)) * h + (lower + 0.5 * (n - 1) * h - center);
}

double default_center(const Grid& g, int axis) {
  if (g.kind() == DomainKind::torus) return g.spec().lower[static_cast<std::size_t>(axis)];
  return g.center()[static_cast<std::size_t>(axis)];
}

std::vector<double> parse_profile(const Json& j, const std::string& path, const Grid& g, Json& eff) {
  const std::size_t n = g.size();
  if (j.is_number()) {
    eff = j;
    return std::vector<double>(n, as_number(j, path));
  }
  if (j.is_array()) {
    auto v = as_numbers(j, path);
    if (v.size() != n) fail(path, "expected " + std::to_string(n) + " nodal values, got " + std::to_string(v.size()));
    eff = j;
    return v;
  }
  Obj o(j, path);
  const std::string kind = o.str("profile");
  std::vector<double> out(n, 0.0);
  const double offset = o.num("offset", 0.0);
  if (kind == "fourier") {
    const int axis = o.integer("axis", 0);
    if (axis < 0 || axis >= g.dim()) fail(o.at("axis"), "axis out of range");
    const double c = o.num("center", default_center(g, axis));
    auto terms = [&](const std::string& key) {
      std::vector<std::pair<double, double>> t;
      if (!o.has(key)) {
        o.put(key, Json::array());
        return t;
      }
      const Json& a = o.raw(key);
      if (!a.is_array()) fail(o.at(key), "expected an array of [amplitude, wavenumber] pairs");
      for (std::size_t k = 0; k < a.size(); ++k) {
        const auto p = as_numbers(a[k], o.at(key) + "[" + std::to_string(k) + "]");
        if (p.size() != 2) fail(o.at(key) + "[" + std::to_string(k) + "]", "expected [amplitude, wavenumber]");
        t.emplace_back(p[0], p[1]);
      }
      o.put(key, a);
      return t;
    };
    const auto cs = terms("cos");
    const auto ss = terms("sin");
    for (std::size_t i = 0; i < n; ++i) {
      const double x = axis_offset(g, i, axis, c);
      double v = offset;
      for (const auto& [a, k] : cs) v += a * std::cos(k * x);
      for (const auto& [a, k] : ss) v += a * std::sin(k * x);
      out[i] = v;
    }
  } else if (kind == "bump" || kind == "gaussian") {
    const double amp = o.num("amplitude", 1.0);
    const double width = o.num("width", 0.5);
    if (!(width > 0.0)) fail(o.at("width"), "must be positive");
    std::vector<double> def;
    for (int a = 0; a < g.dim(); ++a) def.push_back(default_center(g, a));
    const auto c = o.nums("center", def);
    if (c.size() != static_cast<std::size_t>(g.dim())) fail(o.at("center"), "one coordinate per dimension");
    for (std::size_t i = 0; i < n; ++i) {
      double r2 = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double d = axis_offset(g, i, a, c[static_cast<std::size_t>(a)]);
        r2 += d * d;
      }
      const double q = r2 / (width * width);
      out[i] = offset + amp * (kind == "bump" ? std::max(0.0, 1.0 - q) : std::exp(-0.5 * q));
    }
  } else if (kind == "ramp") {
    const int axis = o.integer("axis", 0);
    if (axis < 0 || axis >= g.dim()) fail(o.at("axis"), "axis out of range");
    const double slope = o.num("slope", 1.0);
    for (std::size_t i = 0; i < n; ++i) out[i] = offset + slope * g.coord(i)[static_cast<std::size_t>(axis)];
  } else {
    fail(o.at("profile"), "unknown profile '" + kind + "' (fourier, bump, gaussian, ramp)");
  }
  o.done();
  eff = o.eff();
  return out;
}

Field parse_field(Obj& parent, const std::string& key, const GridPtr& g, int components, const Json* def = nullptr) {
  if (!parent.has(key) && !def) fail(parent.at(key), "required field is missing");
  const Json& j = parent.has(key) ? parent.raw(key) : *def;
  const std::string path = parent.at(key);
  Json eff;
  Field f(g, components);
  if (components == 1) {
    const auto v = parse_profile(j, path, *g, eff);
    std::copy(v.begin(), v.end(), f.values().begin());
  } else {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(components))
      fail(path, "expected one profile per component (" + std::to_string(components) + ")");
    eff = Json::array();
    for (int c = 0; c < components; ++c) {
      Json e;
      const auto v = parse_profile(j[static_cast<std::size_t>(c)], path + "[" + std::to_string(c) + "]", *g, e);
      std::copy(v.begin(), v.end(), f.component(c).begin());
      eff.push_back(e);
    }
  }
  parent.put(key, eff);
  return f;
}

// {"base": profile, "slope": profile}; a bare profile means a constant-in-time base.
TimeField parse_time_field(Obj& parent, const std::string& key, const GridPtr& g, int components) {
  TimeField t;
  if (!parent.has(key)) {
    parent.put(key, Json{{"base", 0.0}, {"slope", 0.0}});
    return t;
  }
  const Json& j = parent.raw(key);
  const Json zero = 0.0;
  if (j.is_object() && !j.contains("profile")) {
    parent.child(key, [&](Obj& o) {
      const Field b = parse_field(o, "base", g, components, &zero);
      const Field s = parse_field(o, "slope", g, components, &zero);
      t.base = b.vector();
      t.slope = s.vector();
    });
  } else {
    const Json wrapped = Json{{"base", j}};
    Obj holder(wrapped, parent.at(key));
    const Field b = parse_field(holder, "base", g, components);
    t.base = b.vector();
    parent.put(key, Json{{"base", holder.eff()["base"]}, {"slope", 0.0}});
  }
  return t;
}

// ---- maps --------------------------------------------------------------------

RMap parse_rmap(const Json& j, const std::string& path, const Grid& g, double lv_K, Json& eff) {
  Obj o(j, path);
  const std::string kind = o.str("kind");
  RMap r;
  try {
    if (kind == "identity") r = RMap::identity(g);
    else if (kind == "reflection") r = RMap::reflection(g, o.integer("axis", 0));
    else if (kind == "rotation90") r = RMap::rotation90(g);
    else if (kind == "translation") {
      const auto s = o.nums("shift", {1.0, 0.0});
      if (s.size() != 2) fail(o.at("shift"), "expected [sx, sy]");
      r = RMap::translation(g, {static_cast<int>(s[0]), static_cast<int>(s[1])});
    } else if (kind == "symmetric_decreasing") r = RMap::symmetric_decreasing();
    else if (kind == "steiner") r = RMap::steiner(o.integer("axis", 0));
    else if (kind == "monotone") r = RMap::monotone(o.integer("axis", 0), o.integer("direction", 1));
    else if (kind == "truncate_lower") r = RMap::truncate_lower(o.num("level", 0.0));
    else if (kind == "truncate_upper") r = RMap::truncate_upper(o.num("level", 0.0));
    else if (kind == "positive_part") r = RMap::positive_part();
    else if (kind == "negative_part") r = RMap::negative_part();
    else if (kind == "lv_clamp") r = RMap::lv_clamp(o.num("K", lv_K));
    else if (kind == "averaging") r = RMap::averaging(o.integer("axis", 0));
    else if (kind == "compose") {
      const Json& m = o.raw("members");
      if (!m.is_array() || m.empty()) fail(o.at("members"), "expected a non-empty array of maps");
      std::vector<RMap> members;
      Json me = Json::array();
      for (std::size_t k = 0; k < m.size(); ++k) {
        Json e;
        members.push_back(parse_rmap(m[k], o.at("members") + "[" + std::to_string(k) + "]", g, lv_K, e));
        me.push_back(e);
      }
      o.put("members", me);
      r = RMap::compose(std::move(members));
    } else {
      fail(o.at("kind"), "unknown map kind '" + kind + "'");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  o.done();
  eff = o.eff();
  return r;
}

WideMap parse_wide_map(const Json& j, const std::string& path, const GridPtr& g, int d, Json& eff) {
  Obj o(j, path);
  const std::string kind = o.str("kind");
  WideMap r;
  try {
    if (kind == "affine") {
      if (!g) {
        auto rr = o.nums("r", {});
        if (rr.size() != static_cast<std::size_t>(d * d)) fail(o.at("r"), "expected d*d entries");
        auto v = o.nums("v", std::vector<double>(static_cast<std::size_t>(d), 0.0));
        if (v.size() != static_cast<std::size_t>(d)) fail(o.at("v"), "expected d entries");
        r = WideMap::lagrangian_affine(std::move(rr), std::move(v));
      } else {
        fail(o.at("kind"), "affine maps belong to the lagrangian family");
      }
    } else if (!g) {
      fail(o.at("kind"), "the lagrangian family takes only affine maps");
    } else if (kind == "reflection") {
      r = WideMap::rigid(NodePermutation::reflection(*g, o.integer("axis", 0)));
    } else if (kind == "translation") {
      const auto s = o.nums("shift", {1.0, 0.0});
      if (s.size() != 2) fail(o.at("shift"), "expected [sx, sy]");
      r = WideMap::rigid(NodePermutation::translation(*g, {static_cast<int>(s[0]), static_cast<int>(s[1])}));
    } else if (kind == "averaging") {
      r = WideMap::averaging(o.integer("axis", 0));
    } else {
      fail(o.at("kind"), "unknown WIDE map kind '" + kind + "' (reflection, translation, averaging, affine)");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  o.done();
  eff = o.eff();
  return r;
}

// ---- families ----------------------------------------------------------------

DissipationSpec parse_dissipation(Obj& o) {
  DissipationSpec d;
  const std::string kind = o.str("kind", "power");
  if (kind == "power") {
    d.kind = AlphaKind::power;
    d.p = o.num("p", 2.0);
  } else if (kind == "table") {
    d.kind = AlphaKind::table;
    d.table_s = o.nums("s", {});
    d.table_alpha = o.nums("alpha", {});
    d.growth_constant = o.num("growth_constant", 1.0);
    d.p = o.num("p", 2.0);
  } else {
    fail(o.at("kind"), "unknown dissipation kind '" + kind + "' (power, table)");
  }
  return d;
}

void parse_wed(Obj& root, Scenario& sc, const GridPtr& g) {
  WedProblem p;
  p.grid = g;
  p.components = sc.family == Family::lotka_volterra ? 2 : 1;
  if (sc.family == Family::fractional_heat) {
    root.put("dissipation", Json{{"kind", "power"}, {"p", 2.0}});
  } else {
    p.dissipation = root.child("dissipation", [](Obj& o) { return parse_dissipation(o); });
  }
  switch (sc.family) {
    case Family::doubly_nonlinear:
      root.child("energy", [&](Obj& o) {
        const std::string kind = o.str("kind", "m_laplace");
        if (kind == "m_laplace") {
          p.energy1.kind = EnergyKind::m_laplace;
          p.energy1.m = o.num("m", 2.0);
          p.energy1.B = o.nums("B", {1.0});
          p.energy1.C = o.nums("C", {0.0});
        } else if (kind == "quadratic") {
          p.energy1.kind = EnergyKind::quadratic;
          p.energy1.gamma = o.num("gamma", 1.0);
        } else {
          fail(o.at("kind"), "doubly_nonlinear energies are m_laplace or quadratic");
        }
      });
      break;
    case Family::fractional_heat:
      root.child("energy", [&](Obj& o) {
        p.energy1.kind = EnergyKind::fractional;
        p.energy1.s = o.num("s", 0.5);
        p.energy1.gamma = o.num("gamma", 1.0);
        p.energy1.exterior = o.boolean("exterior", true);
      });
      break;
    case Family::lotka_volterra:
      root.child("energy", [&](Obj& o) {
        p.energy1.kind = EnergyKind::lv_quadratic;
        p.energy1.D1 = o.num("D1", 1.0);
        p.energy1.D2 = o.num("D2", 1.0);
        p.energy1.F1 = o.num("F1", 1.0);
        p.energy1.F2 = o.num("F2", 1.0);
      });
      break;
    default:
      break;
  }
  if (root.has("perturbation")) {
    root.child("perturbation", [&](Obj& o) {
      p.energy2.has_power = true;
      p.energy2.q = o.num("q", 2.0);
      p.energy2.D = o.nums("D", {0.0});
    });
  }
  p.energy2.forcing = parse_time_field(root, "forcing", g, p.components);
  if (sc.family == Family::lotka_volterra) {
    root.child("reaction", [&](Obj& o) {
      p.reaction.kind = ReactionKind::lotka_volterra;
      p.reaction.lv.A = o.num("A", 1.0);
      p.reaction.lv.K = o.num("K", 1.0);
      p.reaction.lv.B = o.num("B", 0.0);
      p.reaction.lv.C = o.num("C", 0.0);
      p.reaction.lv.E = o.num("E", 0.0);
    });
  } else {
    root.child("reaction", [&](Obj& o) {
      const std::string kind = o.str("kind", "none");
      if (kind == "none") {
        p.reaction.kind = ReactionKind::none;
      } else if (kind == "constant_g") {
        p.reaction.kind = ReactionKind::constant_g;
        p.reaction.g = parse_time_field(o, "g", g, 1);
      } else {
        fail(o.at("kind"), "reaction kind must be none or constant_g for this family");
      }
    });
  }
  p.horizon = root.num("horizon", 1.0);
  p.steps = root.integer("steps", 64, 1);
  p.initial = parse_field(root, "initial", g, p.components);
  if (root.has("comparison_initial")) sc.comparison = parse_field(root, "comparison_initial", g, p.components);
  sc.schedule = root.nums("schedule", default_schedule(p.horizon, std::max(p.steps, 1)));
  p.epsilon = sc.schedule.empty() ? 0.1 : sc.schedule.back();
  if (root.has("maps")) {
    const Json& m = root.raw("maps");
    if (!m.is_array()) fail(root.at("maps"), "expected an array of maps");
    Json eff = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
      Json e;
      sc.maps.push_back(parse_rmap(m[k], root.at("maps") + "[" + std::to_string(k) + "]", *g, p.reaction.lv.K, e));
      eff.push_back(e);
    }
    root.put("maps", eff);
  } else {
    root.put("maps", Json::array());
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("scenario '" + sc.name + "'", e.what());
  }
  sc.wed = std::move(p);
}

void parse_ri(Obj& root, Scenario& sc, const GridPtr& g) {
  RIProblem p;
  p.grid = g;
  p.poly = root.nums("poly", {0.0, 0.0, 0.5});
  p.p = root.num("p", 2.0);
  p.a = root.num("a", 0.0);
  p.h = parse_time_field(root, "forcing", g, 1);
  p.horizon = root.num("horizon", 1.0);
  p.steps = root.integer("steps", 200, 1);
  p.initial = parse_field(root, "initial", g, 1);
  if (root.has("comparison_initial")) sc.comparison = parse_field(root, "comparison_initial", g, 1);
  sc.schedule = root.nums("schedule", default_schedule(p.horizon, std::max(p.steps, 1)));
  p.epsilon = sc.schedule.empty() ? 0.01 : sc.schedule.back();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("scenario '" + sc.name + "'", e.what());
  }
  sc.ri = std::move(p);
}

void parse_maps_wide(Obj& root, Scenario& sc, const GridPtr& g, int d) {
  if (!root.has("maps")) {
    root.put("maps", Json::array());
    return;
  }
  const Json& m = root.raw("maps");
  if (!m.is_array()) fail(root.at("maps"), "expected an array of maps");
  Json eff = Json::array();
  for (std::size_t k = 0; k < m.size(); ++k) {
    Json e;
    sc.wide_maps.push_back(parse_wide_map(m[k], root.at("maps") + "[" + std::to_string(k) + "]", g, d, e));
    eff.push_back(e);
  }
  root.put("maps", eff);
}

void parse_wave(Obj& root, Scenario& sc, const GridPtr& g) {
  WideWaveProblem p;
  p.grid = g;
  p.rho = root.num("rho", 1.0);
  p.nu = root.num("nu", 0.0);
  p.poly = root.nums("F", {});
  p.lambda = root.num("lambda", 0.0);
  p.p = root.num("p", 2.0);
  p.horizon = root.num("horizon", 1.0);
  p.steps = root.integer("steps", 200, 1);
  p.u0 = parse_field(root, "initial", g, 1);
  const Json zero = 0.0;
  p.v0 = parse_field(root, "velocity", g, 1, &zero);
  sc.schedule = root.nums("schedule", default_schedule(p.horizon, std::max(p.steps, 1)));
  p.epsilon = sc.schedule.empty() ? 0.05 : sc.schedule.back();
  parse_maps_wide(root, sc, g, 0);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("scenario '" + sc.name + "'", e.what());
  }
  sc.wave = std::move(p);
}

void parse_lagrangian(Obj& root, Scenario& sc) {
  LagrangianProblem p;
  p.d = root.integer("d", 1);
  if (p.d < 1 || p.d > 64) fail(root.at("d"), "dimension must lie in [1, 64]");
  const auto D = static_cast<std::size_t>(p.d);
  std::vector<double> eye(D * D, 0.0);
  for (std::size_t i = 0; i < D; ++i) eye[i * D + i] = 1.0;
  p.M = root.nums("M", eye);
  p.nu = root.num("nu", 0.0);
  root.child("potential", [&](Obj& o) {
    p.U.K = o.nums("K", {});
    p.U.b = o.nums("b", {});
    p.U.radial = o.nums("radial", {0.0, 0.5});
  });
  p.horizon = root.num("horizon", 1.0);
  p.steps = root.integer("steps", 200, 1);
  p.u0 = root.nums("initial", std::vector<double>(D, 0.0));
  p.v0 = root.nums("velocity", std::vector<double>(D, 0.0));
  sc.schedule = root.nums("schedule", default_schedule(p.horizon, std::max(p.steps, 1)));
  p.epsilon = sc.schedule.empty() ? 0.05 : sc.schedule.back();
  parse_maps_wide(root, sc, nullptr, p.d);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("scenario '" + sc.name + "'", e.what());
  }
  sc.lagrangian = std::move(p);
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::doubly_nonlinear:
      return "doubly_nonlinear";
    case Family::fractional_heat:
      return "fractional_heat";
    case Family::lotka_volterra:
      return "lotka_volterra";
    case Family::rate_independent:
      return "rate_independent";
    case Family::wide_wave:
      return "wide_wave";
    case Family::lagrangian:
      return "lagrangian";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::string msg = e.what();
    const auto pos = msg.find("syntax error");
    throw ScenarioError(location(text, e.byte == 0 ? 0 : e.byte - 1), pos == std::string::npos ? msg : msg.substr(pos));
  }
  Obj root(doc, "");
  Scenario sc;
  sc.name = root.str("name");
  if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos)
    fail("name", "must be a non-empty name without path separators");
  sc.description = root.str("description", "");
  const std::string fam = root.str("family");
  bool known = false;
  for (Family f : {Family::doubly_nonlinear, Family::fractional_heat, Family::lotka_volterra, Family::rate_independent,
                   Family::wide_wave, Family::lagrangian})
    if (fam == family_name(f)) {
      sc.family = f;
      known = true;
    }
  if (!known)
    fail("family", "unknown family '" + fam +
                       "' (doubly_nonlinear, fractional_heat, lotka_volterra, rate_independent, wide_wave, lagrangian)");
  if (!root.has("seed")) fail("seed", "required field is missing (runs must be seeded)");
  const double seed = as_number(root.raw("seed"), "seed");
  if (seed < 0 || seed != std::floor(seed) || seed > 9.0e15) fail("seed", "expected a non-negative integer");
  sc.seed = static_cast<std::uint64_t>(seed);
  root.put("seed", sc.seed);
  sc.output_dir = root.str("output_dir", sc.name);
  root.child("solver", [&](Obj& o) {
    sc.fixed_point.inner.gtol = o.num("gtol", 1e-8);
    sc.fixed_point.inner.max_iter = o.integer("max_iter", 200);
    sc.fixed_point.theta = o.num("theta", 0.5);
    sc.fixed_point.tol = o.num("fixed_point_tol", 1e-8);
    sc.fixed_point.max_outer = o.integer("max_outer", 60);
  });
  root.child("checks", [&](Obj& o) {
    sc.check_samples = o.integer("samples", 0);
    sc.invariance_tolerance = o.num("invariance_tolerance", sc.family == Family::lagrangian ||
                                                                   sc.family == Family::wide_wave
                                                               ? 1e-7
                                                               : 1e-8);
    sc.ordering_tolerance = o.num("ordering_tolerance", 1e-10);
    sc.energetic_tolerance = o.num("energetic_tolerance", 1e-2);
  });
  if (sc.check_samples < 0) fail("checks.samples", "must be >= 0");

  if (sc.family == Family::lagrangian) {
    if (root.has("grid")) fail("grid", "the lagrangian family has no spatial grid");
    parse_lagrangian(root, sc);
  } else {
    const GridPtr g = root.child("grid", [](Obj& o) { return parse_grid(o); });
    if (sc.family == Family::rate_independent) parse_ri(root, sc, g);
    else if (sc.family == Family::wide_wave) parse_wave(root, sc, g);
    else parse_wed(root, sc, g);
  }
  for (std::size_t k = 0; k < sc.schedule.size(); ++k) {
    if (!(sc.schedule[k] > 0.0)) fail("schedule[" + std::to_string(k) + "]", "must be positive");
    if (k > 0 && !(sc.schedule[k] < sc.schedule[k - 1]))
      fail("schedule[" + std::to_string(k) + "]", "the schedule must be strictly decreasing");
  }
  if (sc.schedule.empty()) fail("schedule", "must not be empty");
  const double T = sc.wed ? sc.wed->horizon : sc.ri ? sc.ri->horizon : sc.wave ? sc.wave->horizon : sc.lagrangian->horizon;
  for (std::size_t k = 0; k < sc.schedule.size(); ++k)
    if (!(sc.schedule[k] < T) || T / sc.schedule[k] > kMaxHorizonOverEps)
      fail("schedule[" + std::to_string(k) + "]", "epsilon must satisfy eps < T and T / eps <= 600");
  root.done();
  sc.effective = root.eff();
  sc.effective["family"] = family_name(sc.family);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ScenarioError(path.string(), "cannot open scenario file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

// ---- bundled scenarios ---------------------------------------------------------

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> list = {
      {"scalar_decay", "u' + u = 0, u(0) = 1 as a quadratic WED problem on one point", R"({
  "name": "scalar_decay",
  "family": "doubly_nonlinear",
  "seed": 1,
  "grid": {"kind": "points", "nodes": [1]},
  "energy": {"kind": "quadratic", "gamma": 1.0},
  "horizon": 1.0,
  "steps": 400,
  "schedule": [0.2, 0.1, 0.05, 0.025],
  "initial": 1.0,
  "comparison_initial": 2.0
})"},
      {"heat_neumann", "1D Neumann heat equation on [0, 2 pi], 16 nodes, N = 64", R"({
  "name": "heat_neumann",
  "family": "doubly_nonlinear",
  "seed": 1,
  "grid": {"kind": "interval", "nodes": [16], "lower": [0.0], "upper": [6.283185307179586], "boundary": "neumann"},
  "energy": {"kind": "m_laplace", "m": 2.0, "B": [1.0], "C": [0.0]},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "fourier", "center": 0.0, "cos": [[1.0, 0.5], [0.5, 1.0]]}
})"},
      {"heat_reflection", "reflection-symmetric heat equation with a symmetric source", R"({
  "name": "heat_reflection",
  "family": "doubly_nonlinear",
  "seed": 2,
  "grid": {"kind": "interval", "nodes": [16], "lower": [-1.0], "upper": [1.0], "boundary": "neumann"},
  "energy": {"kind": "m_laplace", "m": 2.0, "B": [1.0], "C": [0.5]},
  "forcing": {"profile": "bump", "amplitude": 0.5, "width": 0.6},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "fourier", "offset": 1.0, "cos": [[0.5, 3.141592653589793]]},
  "maps": [{"kind": "reflection", "axis": 0}],
  "checks": {"samples": 12}
})"},
      {"mlaplace_reflection", "3-Laplace doubly-nonlinear equation with reflection symmetry", R"({
  "name": "mlaplace_reflection",
  "family": "doubly_nonlinear",
  "seed": 3,
  "grid": {"kind": "interval", "nodes": [16], "lower": [-1.0], "upper": [1.0], "boundary": "neumann"},
  "dissipation": {"kind": "power", "p": 3.0},
  "energy": {"kind": "m_laplace", "m": 3.0, "B": [1.0], "C": [0.0]},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "gaussian", "amplitude": 1.0, "width": 0.4},
  "maps": [{"kind": "reflection", "axis": 0}]
})"},
      {"heat_positivity", "heat equation with nonnegative source: positive part and lower truncation at 0", R"({
  "name": "heat_positivity",
  "family": "doubly_nonlinear",
  "seed": 4,
  "grid": {"kind": "interval", "nodes": [16], "lower": [0.0], "upper": [1.0], "boundary": "dirichlet"},
  "energy": {"kind": "m_laplace", "m": 2.0, "B": [1.0], "C": [0.0]},
  "forcing": {"profile": "ramp", "offset": 0.2, "slope": 0.5},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "bump", "amplitude": 1.0, "width": 0.3, "center": [0.35]},
  "maps": [{"kind": "positive_part"}, {"kind": "truncate_lower", "level": 0.0}]
})"},
      {"heat_comparison", "ordered heat minimisers from u0 <= v0", R"({
  "name": "heat_comparison",
  "family": "doubly_nonlinear",
  "seed": 5,
  "grid": {"kind": "interval", "nodes": [16], "lower": [0.0], "upper": [6.283185307179586], "boundary": "neumann"},
  "energy": {"kind": "m_laplace", "m": 2.0, "B": [1.0], "C": [0.0]},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "fourier", "center": 0.0, "cos": [[1.0, 0.5], [0.5, 1.0]]},
  "comparison_initial": {"profile": "fourier", "center": 0.0, "offset": 0.25, "cos": [[1.0, 0.5], [0.75, 1.0]]}
})"},
      {"fractional_symmetric", "fractional heat equation (s = 0.5) with reflection and positive part", R"({
  "name": "fractional_symmetric",
  "family": "fractional_heat",
  "seed": 6,
  "grid": {"kind": "interval", "nodes": [16], "lower": [-1.0], "upper": [1.0], "boundary": "dirichlet"},
  "energy": {"s": 0.5, "gamma": 1.0, "exterior": true},
  "reaction": {"kind": "constant_g", "g": {"profile": "bump", "amplitude": 0.3, "width": 0.5}},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "bump", "amplitude": 1.0, "width": 0.6},
  "comparison_initial": {"profile": "bump", "amplitude": 1.5, "width": 0.8},
  "maps": [{"kind": "reflection", "axis": 0}, {"kind": "positive_part"}]
})"},
      {"lv_box", "Lotka-Volterra system on 8 nodes: 0 <= u <= K and v >= 0", R"({
  "name": "lv_box",
  "family": "lotka_volterra",
  "seed": 7,
  "grid": {"kind": "interval", "nodes": [8], "lower": [0.0], "upper": [1.0], "boundary": "neumann"},
  "energy": {"D1": 0.1, "D2": 0.1, "F1": 0.5, "F2": 0.5},
  "reaction": {"A": 1.0, "K": 1.0, "B": 0.5, "C": 0.5, "E": 0.2},
  "horizon": 1.0,
  "steps": 32,
  "initial": [{"profile": "fourier", "offset": 0.5, "cos": [[0.4, 3.141592653589793]]}, {"profile": "bump", "amplitude": 0.5, "width": 0.4, "offset": 0.1}],
  "maps": [{"kind": "lv_clamp"}]
})"},
      {"reflection_incompatible", "reflection map with an asymmetric source: the invariance check must fail", R"({
  "name": "reflection_incompatible",
  "family": "doubly_nonlinear",
  "seed": 8,
  "grid": {"kind": "interval", "nodes": [16], "lower": [-1.0], "upper": [1.0], "boundary": "neumann"},
  "energy": {"kind": "m_laplace", "m": 2.0, "B": [1.0], "C": [0.0]},
  "forcing": {"profile": "ramp", "offset": 0.0, "slope": 1.0},
  "horizon": 1.0,
  "steps": 64,
  "initial": {"profile": "fourier", "offset": 1.0, "cos": [[0.5, 3.141592653589793]]},
  "maps": [{"kind": "reflection", "axis": 0}],
  "checks": {"samples": 12}
})"},
      {"ri_ramp", "rate-independent play on one point under the load h(t) = 2t", R"({
  "name": "ri_ramp",
  "family": "rate_independent",
  "seed": 9,
  "grid": {"kind": "points", "nodes": [1]},
  "poly": [0.0, 0.0, 0.5],
  "forcing": {"base": 0.0, "slope": 2.0},
  "horizon": 1.0,
  "steps": 200,
  "initial": 0.0,
  "comparison_initial": 0.5
})"},
      {"wave_standing", "linear wave on the torus from a single Fourier mode", R"({
  "name": "wave_standing",
  "family": "wide_wave",
  "seed": 10,
  "grid": {"kind": "torus", "nodes": [32], "lower": [0.0], "upper": [6.283185307179586]},
  "horizon": 1.0,
  "steps": 200,
  "initial": {"profile": "fourier", "cos": [[1.0, 1.0]]},
  "velocity": 0.0,
  "maps": [{"kind": "reflection", "axis": 0}]
})"},
      {"wave_constant", "semilinear wave with spatially constant data: translation and averaging", R"({
  "name": "wave_constant",
  "family": "wide_wave",
  "seed": 11,
  "grid": {"kind": "torus", "nodes": [16], "lower": [0.0], "upper": [1.0]},
  "F": [0.0, 0.0, 0.5, 0.0, 0.25],
  "p": 4.0,
  "horizon": 1.0,
  "steps": 200,
  "initial": 0.5,
  "velocity": 0.125,
  "maps": [{"kind": "translation", "shift": [3, 0]}, {"kind": "averaging", "axis": 0}]
})"},
      {"lagrangian_oscillator", "harmonic oscillator u'' + u = 0, u(0) = 1, u'(0) = 0", R"({
  "name": "lagrangian_oscillator",
  "family": "lagrangian",
  "seed": 12,
  "d": 1,
  "potential": {"radial": [0.0, 0.5]},
  "horizon": 1.0,
  "steps": 200,
  "initial": [1.0],
  "velocity": [0.0]
})"},
      {"lagrangian_rotation", "radial potential in R^3, data on the rotation axis", R"({
  "name": "lagrangian_rotation",
  "family": "lagrangian",
  "seed": 13,
  "d": 3,
  "potential": {"radial": [0.0, 0.5, 0.1]},
  "horizon": 1.0,
  "steps": 200,
  "initial": [0.0, 0.0, 1.0],
  "velocity": [0.0, 0.0, 0.5],
  "maps": [{"kind": "affine", "r": [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]}]
})"},
  };
  return list;
}

const BundledScenario* find_bundled(const std::string& name) {
  for (const auto& b : bundled_scenarios())
    if (b.name == name) return &b;
  return nullptr;
}

}  // namespace wed
