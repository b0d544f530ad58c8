#include "hexcover/inference.hpp"

#include <cmath>

#include "hexcover/errors.hpp"
#include "hexcover/parallel.hpp"

namespace hexcover {

std::string_view to_string(InferenceMode m) {
  switch (m) {
    case InferenceMode::Greedy:
      return "greedy";
    case InferenceMode::BestOfK:
      return "bok";
    case InferenceMode::BestOfK2Opt:
      return "bok_2opt";
  }
  return "?";
}

InferenceMode inference_mode_from_string(std::string_view s) {
  if (s == "greedy") return InferenceMode::Greedy;
  if (s == "bok") return InferenceMode::BestOfK;
  if (s == "bok_2opt") return InferenceMode::BestOfK2Opt;
  throw ConfigError("unknown inference mode: " + std::string(s));
}

void InferenceConfig::validate() const {
  if (k < 1) throw ConfigError("K must be at least 1");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (two_opt_max_passes < 0) throw ConfigError("2-opt pass cap must be non-negative");
}

Route trajectory_route(const AoiGraph& g, const Trajectory& t) {
  Route r;
  r.nodes = t.nodes;
  r.complete = t.hamiltonian() && t.covered == g.cell_count();
  r.hamiltonian = r.complete;
  return r;
}

Route greedy(const PolicyParams& params, const AoiGraph& g, const RewardConfig& reward) {
  return trajectory_route(g, rollout(params, g, reward, Decoding::Greedy, 1.0, nullptr));
}

BestOfKResult best_of_k(const PolicyParams& params, const AoiGraph& g, const InferenceConfig& cfg,
                        int jobs) {
  cfg.validate();
  BestOfKResult res;
  res.candidates.resize(cfg.k);
  parallel_for(cfg.k, jobs, [&](std::size_t i) {
    if (i == 0 && cfg.k >= 2) {
      res.candidates[i] = rollout(params, g, cfg.reward, Decoding::Greedy, cfg.temperature, nullptr);
    } else {
      std::mt19937_64 rng(derive_seed(cfg.seed, i));
      res.candidates[i] = rollout(params, g, cfg.reward, Decoding::Sample, cfg.temperature, &rng);
    }
  });
  auto better = [](const Trajectory& a, const Trajectory& b) {
    if (a.hamiltonian() != b.hamiltonian()) return a.hamiltonian();
    if (a.hamiltonian()) return a.episode_return > b.episode_return;
    if (a.covered != b.covered) return a.covered > b.covered;
    return a.length_nm < b.length_nm;
  };
  res.chosen = 0;
  for (int i = 1; i < cfg.k; ++i) {
    if (better(res.candidates[i], res.candidates[res.chosen])) res.chosen = i;
  }
  res.route = trajectory_route(g, res.candidates[res.chosen]);
  return res;
}

double route_cost(const AoiGraph& g, std::span<const int> nodes, const RewardConfig& reward) {
  const double turn_weight =
      reward.dist_coeff == 0.0 ? std::abs(reward.turn_coeff)
                               : std::abs(reward.turn_coeff) / std::abs(reward.dist_coeff);
  double length = 0.0, turns = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Vec2 move = g.position(nodes[i]) - g.position(nodes[i - 1]);
    length += norm(move);
    if (i >= 2) {
      const Vec2 prev = g.position(nodes[i - 1]) - g.position(nodes[i - 2]);
      turns += turn_penalty(heading_change(prev, move), reward.c_base);
    }
  }
  return length / g.cell_spacing() + turn_weight * turns;
}

Route two_opt(const Route& route, const AoiGraph& g, const RewardConfig& reward, int max_passes) {
  if (!route.hamiltonian) throw LogicError("2-opt needs a Hamiltonian route");
  std::vector<int> nodes = route.nodes;
  const int last = static_cast<int>(nodes.size()) - 2;  // index of the final cell
  double cost = route_cost(g, nodes, reward);
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (int i = 1; i <= last && !improved; ++i) {
      for (int j = i + 1; j <= last && !improved; ++j) {
        if (!g.adjacent(nodes[i - 1], nodes[j]) || !g.adjacent(nodes[i], nodes[j + 1])) continue;
        std::reverse(nodes.begin() + i, nodes.begin() + j + 1);
        const double c = route_cost(g, nodes, reward);
        if (c < cost - 1e-12) {
          cost = c;
          improved = true;
        } else {
          std::reverse(nodes.begin() + i, nodes.begin() + j + 1);
        }
      }
    }
    if (!improved) break;
  }
  Route out = route;
  out.nodes = std::move(nodes);
  return out;
}

Route solve_policy(const PolicyParams& params, const AoiGraph& g, const InferenceConfig& cfg,
                   int jobs) {
  cfg.validate();
  switch (cfg.mode) {
    case InferenceMode::Greedy:
      return greedy(params, g, cfg.reward);
    case InferenceMode::BestOfK:
      return best_of_k(params, g, cfg, jobs).route;
    case InferenceMode::BestOfK2Opt: {
      Route r = best_of_k(params, g, cfg, jobs).route;
      return r.hamiltonian ? two_opt(r, g, cfg.reward, cfg.two_opt_max_passes) : r;
    }
  }
  throw LogicError("unknown inference mode");
}

Trajectory random_rollout(const AoiGraph& g, const RewardConfig& reward, std::mt19937_64& rng) {
  EnvState s = reset(g);
  Trajectory t;
  t.nodes.push_back(g.base());
  while (!s.done) {
    const std::vector<std::uint8_t> mask = action_mask(s, g);
    std::vector<int> allowed;
    for (int j = 0; j < g.node_count(); ++j) {
      if (mask[j]) allowed.push_back(j);
    }
    if (allowed.empty()) throw LogicError("episode running with no allowed action");
    const int a = allowed[static_cast<std::size_t>(uniform01(rng) * allowed.size())];
    const Vec2 from = g.position(s.current);
    const StepOutcome out = step(s, a, g, reward);
    t.actions.push_back(a);
    t.nodes.push_back(a);
    t.logp.push_back(-std::log(static_cast<double>(allowed.size())));
    t.rewards.push_back(out.reward);
    t.episode_return += out.reward;
    t.length_nm += norm(g.position(a) - from);
  }
  t.outcome = s.outcome;
  t.covered = s.visited_count;
  return t;
}

}  // namespace hexcover
