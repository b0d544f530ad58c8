#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "hexcover/environment.hpp"
#include "hexcover/heuristics.hpp"
#include "hexcover/policy.hpp"

namespace hexcover {

enum class InferenceMode { Greedy, BestOfK, BestOfK2Opt };

std::string_view to_string(InferenceMode m);
InferenceMode inference_mode_from_string(std::string_view s);  // greedy, bok, bok_2opt

struct InferenceConfig {
  InferenceMode mode = InferenceMode::Greedy;
  int k = 16;
  double temperature = 1.0;
  int two_opt_max_passes = 50;
  std::uint64_t seed = 0;
  RewardConfig reward;

  void validate() const;  // throws ConfigError
};

// Route view of a policy episode; dead ends give an incomplete route.
Route trajectory_route(const AoiGraph& g, const Trajectory& t);

Route greedy(const PolicyParams& params, const AoiGraph& g, const RewardConfig& reward = {});

struct BestOfKResult {
  Route route;
  std::vector<Trajectory> candidates;
  int chosen = -1;
};

// Candidate 0 is the greedy rollout when k >= 2; the rest are sampled with
// engines seeded from (seed, index). k == 1 is a single sampled rollout.
// Hamiltonian candidates win by return; otherwise the most cells covered,
// then the shortest length.
BestOfKResult best_of_k(const PolicyParams& params, const AoiGraph& g, const InferenceConfig& cfg,
                        int jobs = 1);

// Length in cell spacings plus |turn_coeff| / |dist_coeff| times the summed
// turn penalties of every move after the first.
double route_cost(const AoiGraph& g, std::span<const int> nodes, const RewardConfig& reward = {});

// First-improvement segment reversal. A reversal is kept only if both new
// junctions are graph edges and the cost strictly drops.
Route two_opt(const Route& route, const AoiGraph& g, const RewardConfig& reward = {},
              int max_passes = 50);

Route solve_policy(const PolicyParams& params, const AoiGraph& g, const InferenceConfig& cfg,
                   int jobs = 1);

// Uniformly random choice among allowed actions at every step.
Trajectory random_rollout(const AoiGraph& g, const RewardConfig& reward, std::mt19937_64& rng);

}  // namespace hexcover
