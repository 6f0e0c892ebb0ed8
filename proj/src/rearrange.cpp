#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <tuple>

#include "wed/field.hpp"

namespace wed {

namespace {

// Doubled offset from the grid centre along one axis: exact integer, so ties
// between mirror nodes are detected without rounding.
int doubled_offset(const Grid& g, int axis, int k) { return 2 * k - (g.nodes(axis) - 1); }

std::vector<std::size_t> symmetric_line(const Grid& g, int axis, const std::function<std::size_t(int)>& node) {
  const int n = g.nodes(axis);
  std::vector<int> ks(static_cast<std::size_t>(n));
  std::iota(ks.begin(), ks.end(), 0);
  std::stable_sort(ks.begin(), ks.end(), [&](int a, int b) {
    const int oa = doubled_offset(g, axis, a);
    const int ob = doubled_offset(g, axis, b);
    if (std::abs(oa) != std::abs(ob)) return std::abs(oa) < std::abs(ob);
    return oa > ob;
  });
  std::vector<std::size_t> out;
  out.reserve(ks.size());
  for (int k : ks) out.push_back(node(k));
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> rearrangement_order(const Grid& g, const Rearrangement& r) {
  std::vector<std::vector<std::size_t>> groups;
  switch (r.kind) {
    case RearrangeKind::symmetric_decreasing: {
      std::vector<std::size_t> nodes(g.size());
      std::iota(nodes.begin(), nodes.end(), std::size_t{0});
      auto key = [&](std::size_t i) {
        const auto ix = g.multi_index(i);
        const int ox = doubled_offset(g, 0, ix[0]);
        const int oy = g.dim() == 2 ? doubled_offset(g, 1, ix[1]) : 0;
        const double dx = ox * g.spacing(0);
        const double dy = g.dim() == 2 ? oy * g.spacing(1) : 0.0;
        return std::make_tuple(dx * dx + dy * dy, -ox, -oy);
      };
      std::stable_sort(nodes.begin(), nodes.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
      groups.push_back(std::move(nodes));
      break;
    }
    case RearrangeKind::steiner:
    case RearrangeKind::monotone: {
      if (r.kind == RearrangeKind::steiner && g.dim() != 2)
        throw ConfigError("rearrange: steiner symmetrisation requires a 2D grid");
      if (r.axis < 0 || r.axis >= g.dim()) throw ConfigError("rearrange: axis out of range");
      if (r.kind == RearrangeKind::monotone && r.direction != 1 && r.direction != -1)
        throw ConfigError("rearrange: monotone direction must be +1 or -1");
      const int other = 1 - r.axis;
      const int nlines = g.dim() == 2 ? g.nodes(other) : 1;
      for (int l = 0; l < nlines; ++l) {
        auto node = [&, l](int k) { return r.axis == 0 ? g.index(k, l) : g.index(l, k); };
        if (r.kind == RearrangeKind::steiner) {
          groups.push_back(symmetric_line(g, r.axis, node));
        } else {
          const int n = g.nodes(r.axis);
          std::vector<std::size_t> line;
          for (int k = 0; k < n; ++k) line.push_back(node(r.direction > 0 ? k : n - 1 - k));
          groups.push_back(std::move(line));
        }
      }
      break;
    }
  }
  return groups;
}

Field rearrange(const Field& u, const Rearrangement& r) {
  const auto groups = rearrangement_order(u.grid(), r);
  Field out = u;
  std::vector<double> vals;
  for (int c = 0; c < u.components(); ++c) {
    auto src = u.component(c);
    auto dst = out.component(c);
    for (const auto& grp : groups) {
      vals.clear();
      for (std::size_t i : grp) vals.push_back(std::max(src[i], 0.0));
      std::stable_sort(vals.begin(), vals.end(), std::greater<>());
      for (std::size_t k = 0; k < grp.size(); ++k) dst[grp[k]] = vals[k];
    }
  }
  return out;
}

}  // namespace wed
