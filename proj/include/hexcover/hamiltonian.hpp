#pragma once

#include <cstdint>

#include "hexcover/aoi_graph.hpp"
#include "hexcover/instance.hpp"

namespace hexcover {

// Exhaustive depth-first search for a path base -> every cell once ->
// terminal. Candidates are tried fewest-onward-moves first (ties by id) and
// branches whose remaining cells or terminal became unreachable are cut,
// which keeps the search exact. Stops after `budget` node expansions.
AuditResult audit_hamiltonian(const AoiGraph& g, std::uint64_t budget);

}  // namespace hexcover
