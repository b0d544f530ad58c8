#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hexcover/aoi_graph.hpp"

namespace hexcover {

struct RewardConfig {
  double r_step = 2.0;
  double hex_coeff = 0.5;
  double dist_coeff = -1.0;
  double turn_coeff = -0.25;
  double r_complete = 100.0;
  double r_death = -40.0;
  double c_base = 1.0 / 12.0;
};

enum class Outcome { Running, Completed, DeadEnd };

const char* to_string(Outcome o);

struct EnvState {
  int current = -1;
  std::vector<std::uint8_t> visited;  // one flag per cell
  int visited_count = 0;
  std::optional<Vec2> heading;        // unit vector of the last move
  int step = 0;
  bool done = false;
  Outcome outcome = Outcome::Running;
};

struct RewardComponents {
  double step = 0.0;
  double hex = 0.0;
  double dist = 0.0;
  double turn = 0.0;
  double episodic = 0.0;

  double total() const { return step + hex + dist + turn + episodic; }
};

struct StepOutcome {
  double reward = 0.0;
  RewardComponents components;
  std::vector<std::uint8_t> mask_next;  // empty once the episode is done
  bool done = false;
};

// Heading-change penalty: 0 for a straight move, otherwise
// 2 * ((theta / pi)^2 + c_base). Throws for theta outside [0, pi].
double turn_penalty(double theta, double c_base);

// Angle between two move vectors in [0, pi]; numerically collinear moves
// snap to exactly zero.
double heading_change(Vec2 previous, Vec2 next);

EnvState reset(const AoiGraph& g);

// allowed(j) for a cell iff j neighbours the current node and is unvisited;
// the terminal is allowed only once every cell is visited; the base never.
std::vector<std::uint8_t> action_mask(const EnvState& s, const AoiGraph& g);

enum class DeadEndCause { None, UnreachableCell, UnreachableTerminal };

struct DeadEndReport {
  bool dead_end = false;
  DeadEndCause cause = DeadEndCause::None;
};

// Breadth-first search from the current node through unvisited cells. The
// state is a dead end if some unvisited cell is unreachable, or if the
// terminal cannot be entered after the remaining cells (no reachable
// unvisited cell borders it, or, with everything covered, the current node
// does not border it).
DeadEndReport deadend_check(const EnvState& s, const AoiGraph& g);

// Applies an allowed action. Throws LogicError for a disallowed action.
StepOutcome step(EnvState& s, int action, const AoiGraph& g, const RewardConfig& cfg);

struct StepLog {
  int from = -1;
  int to = -1;
  RewardComponents components;
  int mask_size = 0;  // allowed actions at the decision point
  Outcome outcome = Outcome::Running;
};

// One JSON object per step, newline separated.
std::string trajectory_log_document(const std::vector<StepLog>& steps);

}  // namespace hexcover
