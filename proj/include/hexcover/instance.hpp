#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hexcover/aoi_graph.hpp"
#include "hexcover/geometry.hpp"

namespace hexcover {

struct Band {
  double min = 0.0;
  double max = 0.0;
};

struct GenerationConfig {
  Band area_nm2{1600.0, 3600.0};
  Band rs_nm{5.0, 7.0};
  Band standoff_nm{100.0, 250.0};
  Band target_cells{28.0, 46.0};
  double obstacle_removal_rate = 0.12;
  int train_count = 160;
  int val_count = 20;
  int test_count = 20;
  std::uint64_t master_seed = 42;
  std::uint64_t audit_budget = 2'000'000;  // DFS node expansions
  int rejection_budget = 500;

  // Throws ConfigError on unordered bands or non-positive counts.
  void validate() const;
  int total_count() const { return train_count + val_count + test_count; }
};

// Bands used for the small curriculum corpus (10 to 14 cells).
GenerationConfig tiny_generation_config();

enum class AuditOutcome { Hamiltonian, NotHamiltonian, BudgetExhausted };

struct AuditResult {
  AuditOutcome outcome = AuditOutcome::NotHamiltonian;
  std::vector<int> witness;  // cell ids in visiting order, base and terminal excluded
  std::uint64_t expansions = 0;

  bool hamiltonian() const { return outcome == AuditOutcome::Hamiltonian; }
};

struct AoiInstance {
  std::string id;
  std::uint64_t seed = 0;
  Family family = Family::CompactConvex;
  double rs_nm = 0.0;
  AoiPolygon polygon;
  AoiGraph graph;
  GenerationConfig config;
  AuditResult audit;
  std::string split;  // "train", "val", "test", or empty
};

}  // namespace hexcover
