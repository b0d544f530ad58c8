#include "hexcover/environment.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hexcover/errors.hpp"

namespace hexcover {

namespace {
constexpr double kStraightTolerance = 1e-9;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Running:
      return "running";
    case Outcome::Completed:
      return "completed";
    case Outcome::DeadEnd:
      return "dead_end";
  }
  return "unknown";
}

double turn_penalty(double theta, double c_base) {
  if (!(theta >= 0.0) || theta > std::numbers::pi) {
    throw LogicError("turn angle must lie in [0, pi]");
  }
  if (theta == 0.0) return 0.0;
  const double u = theta / std::numbers::pi;
  return 2.0 * (u * u + c_base);
}

double heading_change(Vec2 previous, Vec2 next) {
  const double theta = std::atan2(std::abs(cross(previous, next)), dot(previous, next));
  if (theta < kStraightTolerance) return 0.0;
  return std::min(theta, std::numbers::pi);
}

EnvState reset(const AoiGraph& g) {
  EnvState s;
  s.current = g.base();
  s.visited.assign(g.cell_count(), 0);
  return s;
}

std::vector<std::uint8_t> action_mask(const EnvState& s, const AoiGraph& g) {
  std::vector<std::uint8_t> mask(g.node_count(), 0);
  if (s.done) return mask;
  const bool covered = s.visited_count == g.cell_count();
  for (int j : g.neighbors(s.current)) {
    if (g.is_cell(j)) {
      mask[j] = !s.visited[j];
    } else if (j == g.terminal()) {
      mask[j] = covered;
    }
  }
  return mask;
}

DeadEndReport deadend_check(const EnvState& s, const AoiGraph& g) {
  const int n = g.cell_count();
  const int remaining = n - s.visited_count;
  if (remaining == 0) {
    if (g.adjacent(s.current, g.terminal())) return {};
    return {true, DeadEndCause::UnreachableTerminal};
  }
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<int> queue;
  queue.reserve(remaining);
  for (int u : g.neighbors(s.current)) {
    if (g.is_cell(u) && !s.visited[u] && !seen[u]) {
      seen[u] = 1;
      queue.push_back(u);
    }
  }
  bool terminal_reachable = false;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (int u : g.neighbors(queue[head])) {
      if (u == g.terminal()) {
        terminal_reachable = true;
      } else if (g.is_cell(u) && !s.visited[u] && !seen[u]) {
        seen[u] = 1;
        queue.push_back(u);
      }
    }
  }
  if (static_cast<int>(queue.size()) < remaining) return {true, DeadEndCause::UnreachableCell};
  if (!terminal_reachable) return {true, DeadEndCause::UnreachableTerminal};
  return {};
}

StepOutcome step(EnvState& s, int action, const AoiGraph& g, const RewardConfig& cfg) {
  if (s.done) throw LogicError("step called on a finished episode");
  if (action < 0 || action >= g.node_count() || !action_mask(s, g)[action]) {
    throw LogicError("action " + std::to_string(action) + " is not allowed");
  }
  const int n = g.cell_count();
  StepOutcome out;
  RewardComponents& c = out.components;

  if (g.is_cell(action)) {
    c.step = cfg.r_step;
    const double decay = 1.0 - static_cast<double>(s.step) / n;
    c.hex = cfg.hex_coeff * g.hexscore(action) * decay;
  }
  const double d_norm = norm(g.feature_xy(action) - g.feature_xy(s.current)) * std::sqrt(double(n));
  c.dist = -std::abs(cfg.dist_coeff) * d_norm;

  const Vec2 move = g.position(action) - g.position(s.current);
  if (s.heading) {
    c.turn = -std::abs(cfg.turn_coeff) * turn_penalty(heading_change(*s.heading, move), cfg.c_base);
  }
  const double len = norm(move);
  if (len > 0.0) s.heading = (1.0 / len) * move;

  s.current = action;
  ++s.step;
  if (g.is_cell(action)) {
    s.visited[action] = 1;
    ++s.visited_count;
  }

  if (action == g.terminal()) {
    c.episodic = cfg.r_complete;
    s.done = true;
    s.outcome = Outcome::Completed;
  } else if (deadend_check(s, g).dead_end) {
    c.episodic = cfg.r_death;
    s.done = true;
    s.outcome = Outcome::DeadEnd;
  }
  out.reward = c.total();
  out.done = s.done;
  if (!s.done) out.mask_next = action_mask(s, g);
  return out;
}

std::string trajectory_log_document(const std::vector<StepLog>& steps) {
  std::string doc;
  for (const StepLog& st : steps) {
    nlohmann::ordered_json j;
    j["from"] = st.from;
    j["to"] = st.to;
    j["step"] = st.components.step;
    j["hex"] = st.components.hex;
    j["dist"] = st.components.dist;
    j["turn"] = st.components.turn;
    j["episodic"] = st.components.episodic;
    j["mask_size"] = st.mask_size;
    j["outcome"] = to_string(st.outcome);
    doc += j.dump();
    doc += '\n';
  }
  return doc;
}

}  // namespace hexcover
