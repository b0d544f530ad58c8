#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hexcover/geometry.hpp"

namespace hexcover {

struct NodeFeatures {
  double x = 0.0;  // planar coordinates centred at the base, unit max radius
  double y = 0.0;
  double w = 0.0;  // hexscore priority
  double m = 0.0;  // 1 for base and terminal
};

// Routing graph over visitable cells. Cells occupy ids [0, n); the base is
// id n and the terminal id n + 1. The terminal shares the base position.
class AoiGraph {
 public:
  AoiGraph() = default;

  int cell_count() const { return cell_count_; }
  int node_count() const { return cell_count_ + 2; }
  int base() const { return cell_count_; }
  int terminal() const { return cell_count_ + 1; }
  bool is_cell(int v) const { return v >= 0 && v < cell_count_; }

  std::span<const int> neighbors(int v) const { return adjacency_[v]; }
  bool adjacent(int u, int v) const;
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

  Vec2 position(int v) const { return positions_[v]; }  // nautical miles
  const std::vector<Vec2>& positions() const { return positions_; }
  Axial axial(int cell) const { return axial_[cell]; }
  const std::vector<Axial>& axials() const { return axial_; }
  double cell_spacing() const { return cell_spacing_; }
  double hexscore(int v) const { return hexscore_[v]; }

  const std::vector<NodeFeatures>& features() const { return features_; }
  Vec2 feature_xy(int v) const { return {features_[v].x, features_[v].y}; }

  // Assembles a graph from explicit parts. Edges reference cell ids; the base
  // and terminal neighbour lists must contain cell ids only.
  static AoiGraph assemble(std::vector<Vec2> cell_positions, std::vector<Axial> cell_axial,
                           std::span<const std::pair<int, int>> cell_edges, Vec2 base_point,
                           std::vector<int> base_neighbors, std::vector<int> terminal_neighbors,
                           double cell_spacing, std::vector<double> cell_hexscore = {});

  // Applies a rigid or reflective transform to positions and recomputes
  // features; topology is untouched.
  AoiGraph transformed(const std::function<Vec2(Vec2)>& map) const;

  bool cells_connected() const;

 private:
  void compute_features();

  int cell_count_ = 0;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Vec2> positions_;
  std::vector<Axial> axial_;
  std::vector<double> hexscore_;
  std::vector<NodeFeatures> features_;
  double cell_spacing_ = 0.0;
};

// Cells with fewer than six cell neighbours.
std::vector<int> outer_ring(const AoiGraph& g);

// Cell-cell edges join hex-adjacent cells whose centroid segment avoids every
// hole; the base and terminal join each outer-ring cell with a clear line of
// sight to base_point. Throws DataError if the cells are disconnected or the
// base has no feasible connection.
AoiGraph build_graph(std::span<const HexCell> cells, const AoiPolygon& poly, Vec2 base_point,
                     double cell_circumradius);

std::vector<NodeFeatures> features(const AoiGraph& g);

}  // namespace hexcover
