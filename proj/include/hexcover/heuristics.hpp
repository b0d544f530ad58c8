#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hexcover/aoi_graph.hpp"

namespace hexcover {

// A base-to-terminal walk. Consecutive nodes are adjacent; already-visited
// cells re-entered along the way count as revisits.
struct Route {
  std::vector<int> nodes;
  int revisits = 0;
  bool complete = false;     // every cell covered and the terminal reached
  bool hamiltonian = false;  // complete with zero revisits
};

enum class Method {
  SweepBoustrophedon,
  SweepRowOneway,
  SweepSegmentSnake,
  SweepRowInterleave,
  SweepSegmentInterleave,
  BoundarySpiralInward,
  BoundarySpiralOutward,
  SweepBoundaryPeel,
  StcTreeCoverage,
  StcLike,
  Warnsdorff,
  DfsBacktrack,
  MortonZorder,
  ExactDfs,
};

inline constexpr std::array<Method, 13> kHeuristicMethods = {
    Method::SweepBoustrophedon,     Method::SweepRowOneway,        Method::SweepSegmentSnake,
    Method::SweepRowInterleave,     Method::SweepSegmentInterleave, Method::BoundarySpiralInward,
    Method::BoundarySpiralOutward,  Method::SweepBoundaryPeel,     Method::StcTreeCoverage,
    Method::StcLike,                Method::Warnsdorff,            Method::DfsBacktrack,
    Method::MortonZorder,
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);
// True for every method that may re-enter covered cells (all but Warnsdorff
// and the exact oracle).
bool allows_revisits(Method m);

// Minimal hop path from `from` to `to` (inclusive). Base and terminal are
// never used as intermediate nodes; `blocked` marks further forbidden
// intermediates. Ties resolve toward lower node ids. Throws DataError when
// unreachable.
std::vector<int> shortest_path(const AoiGraph& g, int from, int to,
                               std::span<const std::uint8_t> blocked = {});

// Recounts revisits and coverage independently of how the route was built.
// Returns a description of the first defect, or nothing when valid.
std::optional<std::string> validate_route(const Route& route, const AoiGraph& g);

// Builds a route from an explicit walk starting at the base; gaps between
// non-adjacent consecutive entries are filled with shortest paths. When
// every cell is covered the walk is closed to the terminal.
Route route_from_walk(const AoiGraph& g, std::span<const int> walk);

// Visits cells in the given order, skipping ones already covered and
// transiting by shortest path, then returns to the terminal.
Route route_from_order(const AoiGraph& g, std::span<const int> order);

Route run(Method method, const AoiGraph& g);

struct ExactDfsOptions {
  std::uint64_t budget = 50'000'000;
};

// Strict-backtracking search for a base-to-terminal Hamiltonian path.
// Throws BudgetExhausted when the expansion budget runs out.
Route exact_dfs(const AoiGraph& g, const ExactDfsOptions& opts = {});

}  // namespace hexcover
