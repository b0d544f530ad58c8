#include "hexcover/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "hexcover/errors.hpp"
#include "hexcover/hamiltonian.hpp"

namespace hexcover {

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

// Hop distances from `from` over cells; base and terminal are endpoints only.
std::vector<int> hop_distances(const AoiGraph& g, int from) {
  std::vector<int> dist(g.node_count(), kUnreached);
  std::vector<int> queue = {from};
  dist[from] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    if (v != from && !g.is_cell(v)) continue;
    for (int u : g.neighbors(v)) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

using Row = std::vector<int>;  // cells of one axial row, ordered by q

std::vector<Row> axial_rows(const AoiGraph& g) {
  std::map<int, Row> by_r;
  for (int v = 0; v < g.cell_count(); ++v) by_r[g.axial(v).r].push_back(v);
  std::vector<Row> rows;
  for (auto& [r, row] : by_r) {
    std::sort(row.begin(), row.end(), [&](int a, int b) { return g.axial(a).q < g.axial(b).q; });
    rows.push_back(std::move(row));
  }
  return rows;
}

// Splits each row into maximal runs of edge-connected consecutive cells.
std::vector<std::vector<Row>> row_runs(const AoiGraph& g, const std::vector<Row>& rows) {
  std::vector<std::vector<Row>> out;
  for (const Row& row : rows) {
    std::vector<Row> runs;
    for (int v : row) {
      if (!runs.empty() && g.adjacent(runs.back().back(), v)) {
        runs.back().push_back(v);
      } else {
        runs.push_back({v});
      }
    }
    out.push_back(std::move(runs));
  }
  return out;
}

void append_row(std::vector<int>& order, const Row& row, bool forward) {
  if (forward) {
    order.insert(order.end(), row.begin(), row.end());
  } else {
    order.insert(order.end(), row.rbegin(), row.rend());
  }
}

std::vector<std::size_t> interleaved(std::size_t count) {
  // 0, m, 1, m + 1, ... with m = ceil(count / 2).
  std::vector<std::size_t> out;
  const std::size_t m = (count + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back(i);
    if (i + m < count) out.push_back(i + m);
  }
  return out;
}

// Of the two row orders and two initial directions, starts from the variant
// whose first cell lies nearest the base.
Route row_sweep(const AoiGraph& g, const std::vector<Row>& rows,
                const std::vector<std::size_t>& row_sequence, bool alternate) {
  std::vector<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int variant = 0; variant < 4; ++variant) {
    const bool reversed_rows = variant & 1;
    const bool first_forward = !(variant & 2);
    std::vector<int> order;
    for (std::size_t k = 0; k < row_sequence.size(); ++k) {
      const std::size_t idx = reversed_rows ? rows.size() - 1 - row_sequence[k] : row_sequence[k];
      const bool forward = alternate ? (first_forward == (k % 2 == 0)) : first_forward;
      append_row(order, rows[idx], forward);
    }
    const double d = norm(g.position(order.front()) - g.position(g.base()));
    if (d < best_d - 1e-9) {
      best_d = d;
      best = std::move(order);
    }
  }
  return route_from_order(g, best);
}

struct Slab {
  std::vector<Row> runs;  // consecutive rows, one run each
};

std::vector<Slab> monotone_slabs(const AoiGraph& g) {
  const std::vector<Row> rows = axial_rows(g);
  const auto runs = row_runs(g, rows);
  auto touches = [&](const Row& a, const Row& b) {
    for (int u : a) {
      for (int v : b) {
        if (g.adjacent(u, v)) return true;
      }
    }
    return false;
  };
  std::vector<Slab> slabs;
  std::vector<int> prev_slab;  // slab id of each run in the previous row
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<int> cur_slab(runs[r].size(), -1);
    const bool contiguous =
        r > 0 && g.axial(rows[r].front()).r == g.axial(rows[r - 1].front()).r + 1;
    for (std::size_t b = 0; b < runs[r].size(); ++b) {
      int match = -1;
      if (contiguous) {
        int count = 0;
        for (std::size_t a = 0; a < runs[r - 1].size(); ++a) {
          if (touches(runs[r - 1][a], runs[r][b])) {
            ++count;
            match = static_cast<int>(a);
          }
        }
        if (count != 1) {
          match = -1;
        } else {
          int back = 0;
          for (const Row& other : runs[r]) back += touches(runs[r - 1][match], other);
          if (back != 1) match = -1;
        }
      }
      if (match >= 0) {
        cur_slab[b] = prev_slab[match];
        slabs[cur_slab[b]].runs.push_back(runs[r][b]);
      } else {
        cur_slab[b] = static_cast<int>(slabs.size());
        slabs.push_back({{runs[r][b]}});
      }
    }
    prev_slab = std::move(cur_slab);
  }
  return slabs;
}

// Visits slabs nearest-first; inside each slab rows snake (optionally in
// interleaved order) starting from the closest slab corner.
Route segment_sweep(const AoiGraph& g, bool interleave) {
  const std::vector<Slab> slabs = monotone_slabs(g);
  std::vector<std::uint8_t> done(slabs.size(), 0);
  std::vector<int> order;
  std::vector<std::pair<const Row*, bool>> runs;
  int cur = g.base();
  for (std::size_t k = 0; k < slabs.size(); ++k) {
    const std::vector<int> dist = hop_distances(g, cur);
    int best_slab = -1, best_option = -1, best_d = kUnreached;
    for (std::size_t s = 0; s < slabs.size(); ++s) {
      if (done[s]) continue;
      const Slab& slab = slabs[s];
      const int corners[4] = {slab.runs.front().front(), slab.runs.front().back(),
                              slab.runs.back().front(), slab.runs.back().back()};
      for (int o = 0; o < 4; ++o) {
        if (dist[corners[o]] < best_d) {
          best_d = dist[corners[o]];
          best_slab = static_cast<int>(s);
          best_option = o;
        }
      }
    }
    if (best_slab < 0) throw DataError("slab unreachable");
    done[best_slab] = 1;
    const Slab& slab = slabs[best_slab];
    const bool rows_forward = best_option < 2;
    const bool first_forward = best_option % 2 == 0;
    for (std::size_t i = 0; i < slab.runs.size(); ++i) {
      const std::size_t idx = rows_forward ? i : slab.runs.size() - 1 - i;
      runs.emplace_back(&slab.runs[idx], first_forward == (i % 2 == 0));
      append_row(order, slab.runs[idx], first_forward == (i % 2 == 0));
    }
    cur = order.back();
  }
  if (!interleave) return route_from_order(g, order);
  // Interleaving is applied to the whole run sequence of the decomposition.
  order.clear();
  const std::vector<std::size_t> seq = interleaved(runs.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    append_row(order, *runs[seq[k]].first, runs[seq[k]].second == (k % 2 == 0));
  }
  return route_from_order(g, order);
}

Vec2 cell_centroid(const AoiGraph& g) {
  Vec2 c;
  for (int v = 0; v < g.cell_count(); ++v) c = c + g.position(v);
  return (1.0 / g.cell_count()) * c;
}

// Layer 0 is the outer ring; deeper layers by hop distance from it.
std::vector<int> boundary_depth(const AoiGraph& g) {
  std::vector<int> depth(g.cell_count(), kUnreached);
  std::vector<int> queue;
  for (int v : outer_ring(g)) {
    depth[v] = 0;
    queue.push_back(v);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int u : g.neighbors(v)) {
      if (g.is_cell(u) && depth[u] == kUnreached) {
        depth[u] = depth[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return depth;
}

// Orders one layer by angle around `center`, starting at the cell nearest
// `cur` (hop distance, then id).
std::vector<int> angular_layer(const AoiGraph& g, std::vector<int> layer, Vec2 center, int cur,
                               bool counter_clockwise) {
  const std::vector<int> dist = hop_distances(g, cur);
  const int start = *std::min_element(layer.begin(), layer.end(), [&](int a, int b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });
  auto angle_of = [&](int v) {
    const Vec2 d = g.position(v) - center;
    return std::atan2(d.y, d.x);
  };
  const double a0 = angle_of(start);
  auto sweep = [&](int v) {
    if (v == start) return -1.0;
    double a = counter_clockwise ? angle_of(v) - a0 : a0 - angle_of(v);
    while (a < 0.0) a += 2.0 * std::numbers::pi;
    return a;
  };
  std::sort(layer.begin(), layer.end(), [&](int a, int b) {
    const double sa = sweep(a), sb = sweep(b);
    return sa != sb ? sa < sb : a < b;
  });
  return layer;
}

Route spiral(const AoiGraph& g, bool inward) {
  const std::vector<int> depth = boundary_depth(g);
  const int max_depth = *std::max_element(depth.begin(), depth.end());
  const Vec2 center = cell_centroid(g);
  std::vector<int> order;
  int cur = g.base();
  for (int k = 0; k <= max_depth; ++k) {
    const int layer_depth = inward ? k : max_depth - k;
    std::vector<int> layer;
    for (int v = 0; v < g.cell_count(); ++v) {
      if (depth[v] == layer_depth) layer.push_back(v);
    }
    if (layer.empty()) continue;
    layer = angular_layer(g, std::move(layer), center, cur, true);
    order.insert(order.end(), layer.begin(), layer.end());
    cur = layer.back();
  }
  return route_from_order(g, order);
}

// Erodes the remaining set one boundary layer at a time (cells with fewer
// than six remaining neighbours); layers alternate direction.
Route boundary_peel(const AoiGraph& g) {
  const int n = g.cell_count();
  std::vector<std::uint8_t> remaining(n, 1);
  int left = n;
  std::vector<int> order;
  int cur = g.base();
  bool counter_clockwise = true;
  while (left > 0) {
    std::vector<int> layer;
    Vec2 center;
    for (int v = 0; v < n; ++v) {
      if (!remaining[v]) continue;
      center = center + g.position(v);
      int deg = 0;
      for (int u : g.neighbors(v)) deg += g.is_cell(u) && remaining[u];
      if (deg < 6) layer.push_back(v);
    }
    center = (1.0 / left) * center;
    for (int v : layer) remaining[v] = 0;
    left -= static_cast<int>(layer.size());
    layer = angular_layer(g, std::move(layer), center, cur, counter_clockwise);
    order.insert(order.end(), layer.begin(), layer.end());
    cur = layer.back();
    counter_clockwise = !counter_clockwise;
  }
  return route_from_order(g, order);
}

int entry_cell(const AoiGraph& g) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int u : g.neighbors(g.base())) {
    const double d = norm(g.position(u) - g.position(g.base()));
    if (d < best_d) {
      best_d = d;
      best = u;
    }
  }
  if (best < 0) throw DataError("base has no neighbours");
  return best;
}

// Walks around a spanning tree (children in id order) and returns to root.
std::vector<int> circumnavigate(const AoiGraph& g, const std::vector<std::vector<int>>& children,
                                int root) {
  std::vector<int> walk = {g.base(), root};
  std::vector<std::pair<int, std::size_t>> stack = {{root, 0}};
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < children[v].size()) {
      const int c = children[v][next++];
      walk.push_back(c);
      stack.push_back({c, 0});
    } else {
      stack.pop_back();
      if (!stack.empty()) walk.push_back(stack.back().first);
    }
  }
  return walk;
}

std::vector<std::vector<int>> orient_tree(const AoiGraph& g,
                                          const std::vector<std::pair<int, int>>& edges,
                                          int root) {
  const int n = g.cell_count();
  std::vector<std::vector<int>> adj(n), children(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<int> queue = {root};
  seen[root] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    std::sort(adj[v].begin(), adj[v].end());
    for (int u : adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        children[v].push_back(u);
        queue.push_back(u);
      }
    }
  }
  return children;
}

// Pairs neighbouring cells along each row into groups, builds a minimum
// spanning tree over the groups, and expands it into a cell-level tree.
Route stc_tree_coverage(const AoiGraph& g) {
  const int n = g.cell_count();
  std::vector<int> group_of(n, -1);
  std::vector<std::vector<int>> groups;
  std::vector<std::pair<int, int>> tree_edges;
  for (const auto& runs : row_runs(g, axial_rows(g))) {
    for (const Row& run : runs) {
      for (std::size_t i = 0; i < run.size(); i += 2) {
        std::vector<int> members = {run[i]};
        if (i + 1 < run.size()) {
          members.push_back(run[i + 1]);
          tree_edges.emplace_back(run[i], run[i + 1]);
        }
        for (int m : members) group_of[m] = static_cast<int>(groups.size());
        groups.push_back(std::move(members));
      }
    }
  }
  std::vector<Vec2> gc(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    Vec2 c;
    for (int m : groups[k]) c = c + g.position(m);
    gc[k] = (1.0 / groups[k].size()) * c;
  }
  struct Candidate {
    double w;
    int ga, gb, a, b;
  };
  std::map<std::pair<int, int>, std::pair<int, int>> link;  // group pair -> lowest cell pair
  for (int a = 0; a < n; ++a) {
    for (int b : g.neighbors(a)) {
      if (!g.is_cell(b) || b <= a) continue;
      int ga = group_of[a], gb = group_of[b];
      if (ga == gb) continue;
      const auto key = std::minmax(ga, gb);
      auto it = link.find(key);
      if (it == link.end() || std::make_pair(a, b) < it->second) link[key] = {a, b};
    }
  }
  std::vector<Candidate> cands;
  for (const auto& [key, cells] : link) {
    cands.push_back({norm(gc[key.first] - gc[key.second]), key.first, key.second, cells.first,
                     cells.second});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.w != y.w) return x.w < y.w;
    return std::tie(x.ga, x.gb) < std::tie(y.ga, y.gb);
  });
  std::vector<int> parent(groups.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Candidate& c : cands) {
    const int ra = find(c.ga), rb = find(c.gb);
    if (ra == rb) continue;
    parent[ra] = rb;
    tree_edges.emplace_back(c.a, c.b);
  }
  const int root = entry_cell(g);
  return route_from_walk(g, circumnavigate(g, orient_tree(g, tree_edges, root), root));
}

// Breadth-first spanning tree from the entry cell, circumnavigated.
Route stc_like(const AoiGraph& g) {
  const int root = entry_cell(g);
  std::vector<std::pair<int, int>> edges;
  std::vector<std::uint8_t> seen(g.cell_count(), 0);
  std::vector<int> queue = {root};
  seen[root] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int u : g.neighbors(v)) {
      if (g.is_cell(u) && !seen[u]) {
        seen[u] = 1;
        edges.emplace_back(v, u);
        queue.push_back(u);
      }
    }
  }
  return route_from_walk(g, circumnavigate(g, orient_tree(g, edges, root), root));
}

int onward_moves(const AoiGraph& g, int u, const std::vector<std::uint8_t>& visited) {
  int k = 0;
  for (int w : g.neighbors(u)) k += g.is_cell(w) && !visited[w];
  return k;
}

Route warnsdorff(const AoiGraph& g) {
  const int n = g.cell_count();
  std::vector<std::uint8_t> visited(n, 0);
  Route route;
  route.nodes.push_back(g.base());
  int cur = g.base();
  for (int k = 0; k < n; ++k) {
    int next = -1, best = kUnreached;
    for (int u : g.neighbors(cur)) {
      if (!g.is_cell(u) || visited[u]) continue;
      const int onward = onward_moves(g, u, visited);
      if (onward < best) {
        best = onward;
        next = u;
      }
    }
    if (next < 0) return route;
    visited[next] = 1;
    route.nodes.push_back(next);
    cur = next;
  }
  if (g.adjacent(cur, g.terminal())) {
    route.nodes.push_back(g.terminal());
    route.complete = true;
    route.hamiltonian = true;
  }
  return route;
}

Route dfs_backtrack(const AoiGraph& g) {
  const int n = g.cell_count();
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<int> walk = {g.base()};
  int cur = g.base();
  int covered = 0;
  while (covered < n) {
    int next = -1, best = kUnreached;
    for (int u : g.neighbors(cur)) {
      if (!g.is_cell(u) || visited[u]) continue;
      const int onward = onward_moves(g, u, visited);
      if (onward < best) {
        best = onward;
        next = u;
      }
    }
    if (next >= 0) {
      walk.push_back(next);
    } else {
      const std::vector<int> dist = hop_distances(g, cur);
      int best_d = kUnreached;
      for (int v = 0; v < n; ++v) {
        if (!visited[v] && dist[v] < best_d) {
          best_d = dist[v];
          next = v;
        }
      }
      if (next < 0) throw DataError("unvisited cell unreachable");
      const std::vector<int> path = shortest_path(g, cur, next);
      walk.insert(walk.end(), path.begin() + 1, path.end());
    }
    visited[next] = 1;
    ++covered;
    cur = next;
  }
  return route_from_walk(g, walk);
}

std::uint64_t interleave_bits(std::uint32_t x, std::uint32_t y) {
  std::uint64_t code = 0;
  for (int b = 0; b < 16; ++b) {
    code |= static_cast<std::uint64_t>((x >> b) & 1u) << (2 * b);
    code |= static_cast<std::uint64_t>((y >> b) & 1u) << (2 * b + 1);
  }
  return code;
}

Route morton(const AoiGraph& g) {
  const int n = g.cell_count();
  std::vector<Vec2> local(n);
  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  for (int v = 0; v < n; ++v) {
    local[v] = axial_to_local(g.axial(v), 1.0);
    lo_x = std::min(lo_x, local[v].x);
    hi_x = std::max(hi_x, local[v].x);
    lo_y = std::min(lo_y, local[v].y);
    hi_y = std::max(hi_y, local[v].y);
  }
  auto quantize = [](double t, double lo, double hi) {
    if (hi <= lo) return std::uint32_t{0};
    return static_cast<std::uint32_t>(std::lround((t - lo) / (hi - lo) * 65535.0));
  };
  std::vector<std::pair<std::uint64_t, int>> keyed;
  for (int v = 0; v < n; ++v) {
    keyed.emplace_back(
        interleave_bits(quantize(local[v].x, lo_x, hi_x), quantize(local[v].y, lo_y, hi_y)), v);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order;
  for (auto [code, v] : keyed) order.push_back(v);
  return route_from_order(g, order);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::SweepBoustrophedon:
      return "sweep_boustrophedon";
    case Method::SweepRowOneway:
      return "sweep_row_oneway";
    case Method::SweepSegmentSnake:
      return "sweep_segment_snake";
    case Method::SweepRowInterleave:
      return "sweep_row_interleave";
    case Method::SweepSegmentInterleave:
      return "sweep_segment_interleave";
    case Method::BoundarySpiralInward:
      return "boundary_spiral_inward";
    case Method::BoundarySpiralOutward:
      return "boundary_spiral_outward";
    case Method::SweepBoundaryPeel:
      return "sweep_boundary_peel";
    case Method::StcTreeCoverage:
      return "stc_tree_coverage";
    case Method::StcLike:
      return "stc_like";
    case Method::Warnsdorff:
      return "warnsdorff";
    case Method::DfsBacktrack:
      return "dfs_backtrack";
    case Method::MortonZorder:
      return "morton_zorder";
    case Method::ExactDfs:
      return "exact_dfs";
  }
  return "unknown";
}

Method method_from_string(std::string_view s) {
  for (Method m : kHeuristicMethods) {
    if (to_string(m) == s) return m;
  }
  if (s == "exact_dfs") return Method::ExactDfs;
  throw ConfigError("unknown method: " + std::string(s));
}

bool allows_revisits(Method m) { return m != Method::Warnsdorff && m != Method::ExactDfs; }

std::vector<int> shortest_path(const AoiGraph& g, int from, int to,
                               std::span<const std::uint8_t> blocked) {
  if (from == to) return {from};
  std::vector<int> parent(g.node_count(), -1);
  std::vector<int> queue = {from};
  parent[from] = from;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    if (v != from && (!g.is_cell(v) || (!blocked.empty() && blocked[v]))) continue;
    for (int u : g.neighbors(v)) {
      if (parent[u] != -1) continue;
      parent[u] = v;
      if (u == to) {
        std::vector<int> path = {to};
        for (int w = to; w != from; w = parent[w]) path.push_back(parent[w]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(u);
    }
  }
  throw DataError("no path from " + std::to_string(from) + " to " + std::to_string(to));
}

std::optional<std::string> validate_route(const Route& route, const AoiGraph& g) {
  const auto& nodes = route.nodes;
  if (nodes.empty() || nodes.front() != g.base()) return "route must start at the base";
  std::vector<std::uint8_t> seen(g.cell_count(), 0);
  int covered = 0, revisits = 0;
  bool at_terminal = false;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const int v = nodes[i];
    if (v < 0 || v >= g.node_count()) return "node id out of range";
    if (!g.adjacent(nodes[i - 1], v)) {
      return "nodes " + std::to_string(nodes[i - 1]) + " and " + std::to_string(v) +
             " are not adjacent";
    }
    if (v == g.base()) return "route re-enters the base";
    if (v == g.terminal()) {
      if (i + 1 != nodes.size()) return "terminal must be the last node";
      at_terminal = true;
      continue;
    }
    if (seen[v]) {
      ++revisits;
    } else {
      seen[v] = 1;
      ++covered;
    }
  }
  const bool complete = at_terminal && covered == g.cell_count();
  if (revisits != route.revisits) return "revisit count mismatch";
  if (complete != route.complete) return "complete flag mismatch";
  if ((complete && revisits == 0) != route.hamiltonian) return "hamiltonian flag mismatch";
  return std::nullopt;
}

Route route_from_walk(const AoiGraph& g, std::span<const int> walk) {
  if (walk.empty() || walk.front() != g.base()) throw LogicError("walk must start at the base");
  const int n = g.cell_count();
  std::vector<std::uint8_t> seen(n, 0);
  int covered = 0;
  Route route;
  route.nodes.push_back(g.base());
  auto enter = [&](int v) {
    route.nodes.push_back(v);
    if (!g.is_cell(v)) return;
    if (seen[v]) {
      ++route.revisits;
    } else {
      seen[v] = 1;
      ++covered;
    }
  };
  for (std::size_t i = 1; i < walk.size(); ++i) {
    const int prev = route.nodes.back();
    if (g.adjacent(prev, walk[i])) {
      enter(walk[i]);
    } else {
      const std::vector<int> path = shortest_path(g, prev, walk[i]);
      for (std::size_t k = 1; k < path.size(); ++k) enter(path[k]);
    }
  }
  if (covered == n && route.nodes.back() != g.terminal()) {
    const std::vector<int> path = shortest_path(g, route.nodes.back(), g.terminal());
    for (std::size_t k = 1; k < path.size(); ++k) enter(path[k]);
  }
  route.complete = covered == n && route.nodes.back() == g.terminal();
  route.hamiltonian = route.complete && route.revisits == 0;
  return route;
}

Route route_from_order(const AoiGraph& g, std::span<const int> order) {
  std::vector<std::uint8_t> seen(g.cell_count(), 0);
  std::vector<int> walk = {g.base()};
  int cur = g.base();
  for (int target : order) {
    if (seen[target]) continue;
    const std::vector<int> path = shortest_path(g, cur, target);
    for (std::size_t k = 1; k < path.size(); ++k) {
      walk.push_back(path[k]);
      seen[path[k]] = 1;
    }
    cur = target;
  }
  return route_from_walk(g, walk);
}

Route exact_dfs(const AoiGraph& g, const ExactDfsOptions& opts) {
  const AuditResult audit = audit_hamiltonian(g, opts.budget);
  if (audit.outcome == AuditOutcome::BudgetExhausted) {
    throw BudgetExhausted("exact DFS expansion budget exhausted");
  }
  Route route;
  route.nodes.push_back(g.base());
  if (!audit.hamiltonian()) return route;
  route.nodes.insert(route.nodes.end(), audit.witness.begin(), audit.witness.end());
  route.nodes.push_back(g.terminal());
  route.complete = true;
  route.hamiltonian = true;
  return route;
}

Route run(Method method, const AoiGraph& g) {
  switch (method) {
    case Method::SweepBoustrophedon: {
      const auto rows = axial_rows(g);
      std::vector<std::size_t> seq(rows.size());
      std::iota(seq.begin(), seq.end(), 0);
      return row_sweep(g, rows, seq, true);
    }
    case Method::SweepRowOneway: {
      const auto rows = axial_rows(g);
      std::vector<std::size_t> seq(rows.size());
      std::iota(seq.begin(), seq.end(), 0);
      return row_sweep(g, rows, seq, false);
    }
    case Method::SweepRowInterleave: {
      const auto rows = axial_rows(g);
      return row_sweep(g, rows, interleaved(rows.size()), true);
    }
    case Method::SweepSegmentSnake:
      return segment_sweep(g, false);
    case Method::SweepSegmentInterleave:
      return segment_sweep(g, true);
    case Method::BoundarySpiralInward:
      return spiral(g, true);
    case Method::BoundarySpiralOutward:
      return spiral(g, false);
    case Method::SweepBoundaryPeel:
      return boundary_peel(g);
    case Method::StcTreeCoverage:
      return stc_tree_coverage(g);
    case Method::StcLike:
      return stc_like(g);
    case Method::Warnsdorff:
      return warnsdorff(g);
    case Method::DfsBacktrack:
      return dfs_backtrack(g);
    case Method::MortonZorder:
      return morton(g);
    case Method::ExactDfs:
      return exact_dfs(g);
  }
  throw LogicError("unknown method");
}

}  // namespace hexcover
