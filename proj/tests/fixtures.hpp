#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hexcover/aoi_graph.hpp"
#include "hexcover/dataset.hpp"
#include "hexcover/geometry.hpp"
#include "hexcover/hamiltonian.hpp"
#include "hexcover/heuristics.hpp"

namespace fixtures {

using namespace hexcover;

inline constexpr double kRh = 5.0;

// Hex cells at the given axial coordinates (pointy-top, circumradius kRh),
// edges between hex-adjacent cells. The base joins `base_nbrs`, or every
// outer-ring cell when empty; the terminal joins the same set.
inline AoiGraph hex_graph(const std::vector<Axial>& cells, Vec2 base_point,
                          std::vector<int> base_nbrs = {}) {
  std::vector<Vec2> pos;
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    pos.push_back(axial_to_local(cells[i], kRh));
    for (std::size_t j = 0; j < i; ++j) {
      if (hex_distance(cells[i], cells[j]) == 1) {
        edges.emplace_back(static_cast<int>(j), static_cast<int>(i));
      }
    }
  }
  if (base_nbrs.empty()) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      int deg = 0;
      for (std::size_t j = 0; j < cells.size(); ++j) deg += hex_distance(cells[i], cells[j]) == 1;
      if (deg < 6) base_nbrs.push_back(static_cast<int>(i));
    }
  }
  return AoiGraph::assemble(pos, cells, edges, base_point, base_nbrs, base_nbrs,
                            std::sqrt(3.0) * kRh);
}

inline double spacing() { return std::sqrt(3.0) * kRh; }

// Single row of n cells, base one spacing left of the first cell.
inline AoiGraph corridor(int n, std::vector<int> base_nbrs = {}) {
  std::vector<Axial> cells;
  for (int i = 0; i < n; ++i) cells.push_back({i, 0});
  return hex_graph(cells, {-spacing(), 0.0}, std::move(base_nbrs));
}

// w cells per row, h rows, rows stacked so the block is rectangular.
inline std::vector<Axial> block_cells(int w, int h) {
  std::vector<Axial> cells;
  for (int r = 0; r < h; ++r) {
    for (int i = 0; i < w; ++i) cells.push_back({i - r / 2, r});
  }
  return cells;
}

inline AoiGraph block(int w, int h, Vec2 base_point) {
  return hex_graph(block_cells(w, h), base_point);
}

// Centre cell (id 0) plus its six neighbours in direction order.
inline std::vector<Axial> flower_cells() {
  std::vector<Axial> cells{{0, 0}};
  for (Axial d : kAxialDirections) cells.push_back(d);
  return cells;
}

inline AoiGraph flower(std::vector<int> base_nbrs = {}) {
  return hex_graph(flower_cells(), {0.0, -4.0 * spacing()}, std::move(base_nbrs));
}

// Free polyhexes (connected cell sets up to rotation and reflection) with
// exactly n cells, in a deterministic order.
inline std::vector<std::vector<Axial>> polyhexes(int n) {
  auto normalize = [](std::vector<Axial> s) {
    int qmin = s[0].q, rmin = s[0].r;
    for (Axial a : s) {
      qmin = std::min(qmin, a.q);
      rmin = std::min(rmin, a.r);
    }
    for (Axial& a : s) a = {a.q - qmin, a.r - rmin};
    std::sort(s.begin(), s.end());
    return s;
  };
  auto canonical = [&](std::vector<Axial> s) {
    std::vector<Axial> best;
    for (int mirror = 0; mirror < 2; ++mirror) {
      for (int rot = 0; rot < 6; ++rot) {
        auto c = normalize(s);
        if (best.empty() || c < best) best = c;
        for (Axial& a : s) a = {-a.r, a.q + a.r};
      }
      for (Axial& a : s) a = {a.r, a.q};
    }
    return best;
  };
  std::set<std::vector<Axial>> level{{Axial{0, 0}}};
  for (int k = 1; k < n; ++k) {
    std::set<std::vector<Axial>> next;
    for (const auto& s : level) {
      for (Axial a : s) {
        for (Axial d : kAxialDirections) {
          const Axial b{a.q + d.q, a.r + d.r};
          if (std::find(s.begin(), s.end(), b) != s.end()) continue;
          auto grown = s;
          grown.push_back(b);
          next.insert(canonical(grown));
        }
      }
    }
    level = std::move(next);
  }
  return {level.begin(), level.end()};
}

// The flower as a full instance: a 24-gon of radius 2.2 rh holds exactly the
// centre cell and its ring; the base sits far south.
inline AoiInstance flower_instance() {
  AoiInstance inst;
  inst.id = "flower";
  inst.seed = 7;
  inst.rs_nm = kRh;
  for (int k = 0; k < 24; ++k) {
    const double t = 2.0 * 3.141592653589793 * k / 24.0;
    inst.polygon.outer.push_back({2.2 * kRh * std::cos(t), 2.2 * kRh * std::sin(t)});
  }
  const Tessellation t = tessellate(inst.polygon, SensorSpec(kRh));
  inst.graph = build_graph(t.cells, inst.polygon, {0.0, -60.0}, kRh);
  inst.audit = audit_hamiltonian(inst.graph, 100000);
  return inst;
}

// Two rows of four cells with the base to the left. The route snakes along
// rungs, and its closing leg from the far end back to the base crosses the
// first rung.
struct CrossingFixture {
  AoiGraph graph;
  Route route;
};

inline CrossingFixture crossing_ladder() {
  const double s = spacing();
  AoiGraph g = block(4, 2, {-1.5 * s, 0.43 * s});
  const auto cells = block_cells(4, 2);
  auto id = [&](int q, int r) {
    return static_cast<int>(std::find(cells.begin(), cells.end(), Axial{q, r}) - cells.begin());
  };
  Route r;
  r.nodes = {g.base(), id(0, 0), id(0, 1), id(1, 1), id(1, 0), id(2, 0),
             id(2, 1), id(3, 1), id(3, 0), g.terminal()};
  r.complete = r.hamiltonian = true;
  return {std::move(g), std::move(r)};
}

inline GenerationConfig small_config(int count, std::uint64_t seed) {
  GenerationConfig cfg = tiny_generation_config();
  cfg.train_count = count;
  cfg.val_count = 0;
  cfg.test_count = 0;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace fixtures
