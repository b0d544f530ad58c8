#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "hexcover/environment.hpp"
#include "hexcover/errors.hpp"
#include "oracles.hpp"

using namespace hexcover;

namespace {

constexpr double kPi = std::numbers::pi;

int allowed_count(const std::vector<std::uint8_t>& mask) {
  int n = 0;
  for (auto m : mask) n += m != 0;
  return n;
}

// Cells of a 2x3 block, an isthmus cell, and a second 2x3 block; the
// isthmus is the only link between the blocks.
std::vector<Axial> bisection_cells() {
  return {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 0},
          {4, 0}, {5, 0}, {6, 0}, {4, -1}, {5, -1}, {6, -1}};
}

int cell_id(const std::vector<Axial>& cells, Axial a) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] == a) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_SUITE("environment") {

TEST_CASE("turn penalty values") {
  const double c = 1.0 / 12.0;
  CHECK(turn_penalty(0.0, c) == 0.0);
  CHECK(turn_penalty(kPi, c) == doctest::Approx(13.0 / 6.0).epsilon(1e-15));
  CHECK(std::abs(turn_penalty(kPi / 3.0, c) - 0.388888888888889) <= 1e-12);
  CHECK(turn_penalty(1e-9, c) >= 2.0 * c);
  CHECK_THROWS(turn_penalty(-0.1, c));
  CHECK_THROWS(turn_penalty(kPi + 0.1, c));
  double prev = 0.0;
  for (int k = 1; k <= 180; ++k) {
    const double f = turn_penalty(k * kPi / 180.0, c);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("hex moves give exact multiples of 60 degrees") {
  const Vec2 e = axial_to_local({1, 0}, 5.0);
  for (Axial d : kAxialDirections) {
    const double theta = heading_change(e, axial_to_local(d, 5.0));
    const double k = theta / (kPi / 3.0);
    CHECK(std::abs(k - std::round(k)) <= 1e-12);
  }
  CHECK(heading_change(e, e) == 0.0);
}

TEST_CASE("reset on the flower with three base neighbours") {
  const AoiGraph g = fixtures::flower({1, 2, 3});
  const EnvState s = reset(g);
  CHECK(s.current == g.base());
  CHECK(s.visited_count == 0);
  CHECK_FALSE(s.heading.has_value());
  const auto mask = action_mask(s, g);
  CHECK(allowed_count(mask) == 3);
  CHECK(mask[1]);
  CHECK(mask[2]);
  CHECK(mask[3]);
  CHECK_FALSE(mask[g.terminal()]);
  const EnvState again = reset(g);
  CHECK(again.visited == s.visited);
  CHECK(again.current == s.current);
  CHECK_FALSE(deadend_check(s, g).dead_end);
}

TEST_CASE("terminal unlocks only at full coverage") {
  const AoiGraph g = fixtures::corridor(3);
  EnvState s = reset(g);
  const RewardConfig cfg;
  step(s, 0, g, cfg);
  step(s, 1, g, cfg);
  CHECK_FALSE(action_mask(s, g)[g.terminal()]);
  step(s, 2, g, cfg);
  const auto mask = action_mask(s, g);
  CHECK(allowed_count(mask) == 1);
  CHECK(mask[g.terminal()]);
}

TEST_CASE("disallowed actions are hard failures") {
  const AoiGraph g = fixtures::corridor(3, {0});
  EnvState s = reset(g);
  CHECK_THROWS_AS(step(s, 2, g, RewardConfig{}), LogicError);
  CHECK_THROWS_AS(step(s, g.terminal(), g, RewardConfig{}), LogicError);
}

TEST_CASE("straight move reward on a corridor") {
  // Base one spacing left of cell 0; cell 3 is the farthest at 4 spacings,
  // so each edge is 1/4 in normalised units and sqrt(|V|) = 2.
  const AoiGraph g = fixtures::corridor(4);
  EnvState s = reset(g);
  const RewardConfig cfg;
  const StepOutcome first = step(s, 0, g, cfg);
  CHECK(first.components.turn == 0.0);
  CHECK(first.components.step == 2.0);
  CHECK(first.components.dist == doctest::Approx(-0.5).epsilon(1e-12));
  const StepOutcome second = step(s, 1, g, cfg);
  CHECK(second.reward == doctest::Approx(2.0 - 1.0 * (0.25 * 2.0)).epsilon(1e-12));
  CHECK(second.components.turn == 0.0);
  step(s, 2, g, cfg);
  step(s, 3, g, cfg);
  const StepOutcome last = step(s, g.terminal(), g, cfg);
  CHECK(last.done);
  CHECK(last.components.episodic == 100.0);
  CHECK(last.components.step == 0.0);
  CHECK(last.components.dist == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(last.components.turn == doctest::Approx(-0.25 * 13.0 / 6.0).epsilon(1e-12));
  CHECK(s.outcome == Outcome::Completed);
  CHECK(s.step == g.cell_count() + 1);
  CHECK(last.mask_next.empty());
}

TEST_CASE("sixty degree turn costs a quarter of 0.38889") {
  // Row 0 then up-right into row 1.
  const std::vector<Axial> cells{{0, 0}, {1, 0}, {1, 1}};
  const AoiGraph g = fixtures::hex_graph(cells, {-10.0, 0.0});
  EnvState s = reset(g);
  const RewardConfig cfg;
  step(s, 0, g, cfg);
  step(s, 1, g, cfg);
  const StepOutcome turn = step(s, 2, g, cfg);
  CHECK(turn.components.turn == doctest::Approx(-0.25 * 0.388888888888889).epsilon(1e-12));
  CHECK(std::abs(turn.components.turn + 0.0972222) <= 1e-6);
}

TEST_CASE("corridor trap fires when the far end is cut off") {
  // Base and terminal touch C only; the walk C, B strands D.
  const AoiGraph g = fixtures::corridor(4, {2, 3});
  EnvState s = reset(g);
  const RewardConfig cfg;
  const StepOutcome at_c = step(s, 2, g, cfg);
  CHECK_FALSE(at_c.done);
  const StepOutcome at_b = step(s, 1, g, cfg);
  CHECK(at_b.done);
  CHECK(s.outcome == Outcome::DeadEnd);
  CHECK(at_b.components.episodic == -40.0);

  EnvState trap = reset(g);
  trap.current = 0;
  trap.visited = {1, 1, 1, 0};
  trap.visited_count = 3;
  trap.step = 3;
  const DeadEndReport r = deadend_check(trap, g);
  CHECK(r.dead_end);
  CHECK(r.cause == DeadEndCause::UnreachableCell);
}

TEST_CASE("bisection fires on the isthmus step") {
  const auto cells = bisection_cells();
  const AoiGraph g = fixtures::hex_graph(cells, {-20.0, -20.0});
  const std::vector<int> walk{cell_id(cells, {0, 0}), cell_id(cells, {1, 0}),
                              cell_id(cells, {2, 0}), cell_id(cells, {2, 1}),
                              cell_id(cells, {3, 0})};
  EnvState s = reset(g);
  const RewardConfig cfg;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const StepOutcome out = step(s, walk[i], g, cfg);
    const bool last = i + 1 == walk.size();
    CHECK(out.done == last);
    if (last) {
      CHECK(out.components.episodic == -40.0);
      CHECK(s.outcome == Outcome::DeadEnd);
    }
  }
}

TEST_CASE("death penalty and completion bonus appear at most once") {
  const AoiGraph g = fixtures::block(3, 3, {-20.0, -20.0});
  std::mt19937_64 rng(5);
  const RewardConfig cfg;
  for (int ep = 0; ep < 500; ++ep) {
    EnvState s = reset(g);
    int bonuses = 0, deaths = 0, steps = 0;
    while (!s.done) {
      const auto mask = action_mask(s, g);
      std::vector<int> allowed;
      for (int j = 0; j < g.node_count(); ++j) {
        if (mask[j]) allowed.push_back(j);
      }
      REQUIRE_FALSE(allowed.empty());
      const int a = allowed[rng() % allowed.size()];
      if (g.is_cell(a)) CHECK_FALSE(s.visited[a]);
      const StepOutcome out = step(s, a, g, cfg);
      ++steps;
      CHECK(out.reward == doctest::Approx(out.components.total()).epsilon(1e-12));
      bonuses += out.components.episodic == 100.0;
      deaths += out.components.episodic == -40.0;
    }
    CHECK(bonuses + deaths == 1);
    if (s.outcome == Outcome::Completed) {
      CHECK(bonuses == 1);
      CHECK(steps == g.cell_count() + 1);
      CHECK(s.visited_count == g.cell_count());
    }
  }
}

TEST_CASE("mask equals the set-algebra definition mid-episode") {
  const AoiInstance inst = generate_instance(GenerationConfig{}, 11);
  const AoiGraph& g = inst.graph;
  std::mt19937_64 rng(17);
  for (int ep = 0; ep < 200; ++ep) {
    EnvState s = reset(g);
    while (!s.done) {
      const auto mask = action_mask(s, g);
      const bool all = s.visited_count == g.cell_count();
      for (int j = 0; j < g.node_count(); ++j) {
        bool expected = false;
        if (g.is_cell(j)) expected = g.adjacent(s.current, j) && !s.visited[j];
        if (j == g.terminal()) expected = all && g.adjacent(s.current, j);
        CHECK(static_cast<bool>(mask[j]) == expected);
      }
      std::vector<int> allowed;
      for (int j = 0; j < g.node_count(); ++j) {
        if (mask[j]) allowed.push_back(j);
      }
      step(s, allowed[rng() % allowed.size()], g, RewardConfig{});
    }
  }
}

TEST_CASE("dead-end check matches transitive closure on small polyhexes") {
  std::size_t states = 0, dead = 0;
  for (int n = 1; n <= 7; ++n) {
    for (const auto& cells : fixtures::polyhexes(n)) {
      for (const AoiGraph& g : oracles::wirings(cells)) {
        oracles::for_each_state(g, [&](const EnvState& s) {
          const DeadEndCause expected = oracles::closure_dead_end(g, s);
          const DeadEndReport got = deadend_check(s, g);
          ++states;
          dead += got.dead_end;
          if (got.cause != expected || got.dead_end != (expected != DeadEndCause::None)) {
            FAIL_CHECK("mismatch on ", n, "-cell graph at current ", s.current);
          }
        });
      }
    }
  }
  CHECK(states > 100000);
  CHECK(dead > 0);
}

TEST_CASE("trajectory log document") {
  std::vector<StepLog> steps(2);
  steps[0] = {4, 0, {2.0, 0.0, -0.5, 0.0, 0.0}, 3, Outcome::Running};
  steps[1] = {0, 5, {0.0, 0.0, -0.5, -0.1, 100.0}, 1, Outcome::Completed};
  std::istringstream in(trajectory_log_document(steps));
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("from"));
    CHECK(j.contains("to"));
    CHECK(j.contains("mask_size"));
    CHECK(j.contains("outcome"));
    ++count;
  }
  CHECK(count == 2);
}

}  // TEST_SUITE
