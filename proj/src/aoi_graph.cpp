#include "hexcover/aoi_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "hexcover/errors.hpp"

namespace hexcover {

bool AoiGraph::adjacent(int u, int v) const {
  const auto& n = adjacency_[u];
  return std::binary_search(n.begin(), n.end(), v);
}

AoiGraph AoiGraph::assemble(std::vector<Vec2> cell_positions, std::vector<Axial> cell_axial,
                            std::span<const std::pair<int, int>> cell_edges, Vec2 base_point,
                            std::vector<int> base_neighbors, std::vector<int> terminal_neighbors,
                            double cell_spacing, std::vector<double> cell_hexscore) {
  const int n = static_cast<int>(cell_positions.size());
  if (n < 1) throw DataError("graph needs at least one cell");
  if (!cell_axial.empty() && static_cast<int>(cell_axial.size()) != n) {
    throw DataError("axial coordinate count does not match cell count");
  }
  if (cell_hexscore.empty()) cell_hexscore.assign(n, 0.0);
  if (static_cast<int>(cell_hexscore.size()) != n) throw DataError("hexscore count mismatch");
  for (double w : cell_hexscore) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("hexscore must be finite and >= 0");
  }

  AoiGraph g;
  g.cell_count_ = n;
  g.cell_spacing_ = cell_spacing;
  g.positions_ = std::move(cell_positions);
  g.positions_.push_back(base_point);
  g.positions_.push_back(base_point);
  g.axial_ = cell_axial.empty() ? std::vector<Axial>(n) : std::move(cell_axial);
  g.hexscore_ = std::move(cell_hexscore);
  g.hexscore_.push_back(0.0);
  g.hexscore_.push_back(0.0);
  g.adjacency_.assign(n + 2, {});
  auto link = [&](int a, int b) {
    if (a == b) throw DataError("self loop in graph");
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  };
  for (auto [a, b] : cell_edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) throw DataError("cell edge references non-cell");
    link(a, b);
  }
  for (int c : base_neighbors) {
    if (c < 0 || c >= n) throw DataError("base neighbour must be a cell");
    link(n, c);
  }
  for (int c : terminal_neighbors) {
    if (c < 0 || c >= n) throw DataError("terminal neighbour must be a cell");
    link(n + 1, c);
  }
  for (auto& nb : g.adjacency_) {
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw DataError("duplicate edge in graph");
    }
  }
  g.compute_features();
  return g;
}

void AoiGraph::compute_features() {
  const Vec2 base = positions_[cell_count_];
  double max_r = 0.0;
  for (const Vec2& p : positions_) max_r = std::max(max_r, norm(p - base));
  if (!(max_r > 0.0)) throw DataError("all nodes coincide with the base");
  features_.assign(positions_.size(), {});
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const Vec2 d = positions_[i] - base;
    features_[i].x = d.x / max_r;
    features_[i].y = d.y / max_r;
    features_[i].w = hexscore_[i];
    features_[i].m = static_cast<int>(i) >= cell_count_ ? 1.0 : 0.0;
  }
  features_[cell_count_].x = 0.0;
  features_[cell_count_].y = 0.0;
  features_[cell_count_ + 1].x = 0.0;
  features_[cell_count_ + 1].y = 0.0;
}

AoiGraph AoiGraph::transformed(const std::function<Vec2(Vec2)>& map) const {
  AoiGraph g = *this;
  for (Vec2& p : g.positions_) p = map(p);
  g.compute_features();
  return g;
}

bool AoiGraph::cells_connected() const {
  if (cell_count_ == 0) return false;
  std::vector<char> seen(cell_count_, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adjacency_[v]) {
      if (u < cell_count_ && !seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == cell_count_;
}

std::vector<int> outer_ring(const AoiGraph& g) {
  std::vector<int> ring;
  for (int v = 0; v < g.cell_count(); ++v) {
    int cell_deg = 0;
    for (int u : g.neighbors(v)) cell_deg += g.is_cell(u);
    if (cell_deg < 6) ring.push_back(v);
  }
  return ring;
}

AoiGraph build_graph(std::span<const HexCell> cells, const AoiPolygon& poly, Vec2 base_point,
                     double cell_circumradius) {
  std::vector<Vec2> positions;
  std::vector<Axial> axial;
  for (const HexCell& c : cells) {
    if (!c.visitable) continue;
    positions.push_back(c.centroid);
    axial.push_back(c.axial);
  }
  const int n = static_cast<int>(positions.size());
  if (n == 0) throw DataError("no visitable cells");
  if (point_in_region(base_point, poly)) throw DataError("base point lies inside the region");

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (hex_distance(axial[i], axial[j]) != 1) continue;
      if (segment_hits_any_hole(positions[i], positions[j], poly)) continue;
      edges.emplace_back(i, j);
    }
  }
  const double spacing = SensorSpec(cell_circumradius).cell_spacing();
  // Assemble once without base wiring to find the outer ring.
  AoiGraph cells_only =
      AoiGraph::assemble(positions, axial, edges, base_point, {}, {}, spacing);
  if (!cells_only.cells_connected()) throw DataError("cell subgraph is disconnected");
  std::vector<int> base_nb;
  for (int c : outer_ring(cells_only)) {
    if (!segment_hits_any_hole(base_point, positions[c], poly)) base_nb.push_back(c);
  }
  if (base_nb.empty()) throw DataError("base has no feasible connection");
  return AoiGraph::assemble(std::move(positions), std::move(axial), edges, base_point, base_nb,
                            base_nb, spacing);
}

std::vector<NodeFeatures> features(const AoiGraph& g) { return g.features(); }

}  // namespace hexcover
