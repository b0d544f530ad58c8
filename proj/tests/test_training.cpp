#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "fixtures.hpp"
#include "hexcover/errors.hpp"
#include "hexcover/heuristics.hpp"
#include "hexcover/training.hpp"

using namespace hexcover;

namespace {

TrainConfig small_train_config() {
  TrainConfig cfg;
  cfg.dims.d = 8;
  cfg.dims.heads = 2;
  cfg.dims.ff_hidden = 16;
  cfg.group_size = 4;
  cfg.batch_instances = 2;
  cfg.minibatch = 4;
  cfg.inner_epochs = 2;
  cfg.max_epochs = 2;
  cfg.patience = 100;
  cfg.lr = 1e-3;
  cfg.seed = 13;
  return cfg;
}

const std::vector<AoiInstance>& instances() {
  static const auto c = generate_corpus(fixtures::small_config(4, 8), 1);
  return c;
}

std::vector<const AoiInstance*> pointers() {
  std::vector<const AoiInstance*> out;
  for (const AoiInstance& inst : instances()) out.push_back(&inst);
  return out;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("group-relative advantages") {
  const auto a = advantages(std::vector<double>{1.0, 3.0}, 1e-8);
  CHECK(std::abs(a[0] + 1.0) <= 1e-7);
  CHECK(std::abs(a[1] - 1.0) <= 1e-7);
  for (double x : advantages(std::vector<double>(5, 42.0), 1e-8)) CHECK(x == 0.0);
  const std::vector<double> r{-40.0, 12.5, 100.0, 3.0, 3.0, 77.0};
  std::vector<double> shifted;
  for (double x : r) shifted.push_back(2.5 * x - 17.0);
  const auto base = advantages(r, 1e-12), moved = advantages(shifted, 1e-12);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(std::abs(base[i] - moved[i]) <= 1e-9);
    sum += base[i];
    sq += base[i] * base[i];
  }
  CHECK(std::abs(sum) <= 1e-12);
  CHECK(std::abs(sq / r.size() - 1.0) <= 1e-9);
}

TEST_CASE("clipped surrogate") {
  CHECK(clipped_surrogate(1.5, 1.0, 0.2) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(clipped_surrogate(0.5, -1.0, 0.2) == doctest::Approx(-0.8).epsilon(1e-15));
  CHECK(clipped_surrogate(1.1, 2.0, 0.2) == doctest::Approx(2.2).epsilon(1e-15));
  CHECK(clipped_surrogate(0.5, 1.0, 0.2) == 0.5);
}

TEST_CASE("gradient norm clipping") {
  std::vector<double> g{3.0, 4.0};
  CHECK(clip_grad_norm(g, 0.5) == 5.0);
  CHECK(g[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.4).epsilon(1e-15));
  std::vector<double> small{0.1, 0.2};
  clip_grad_norm(small, 0.5);
  CHECK(small == std::vector<double>{0.1, 0.2});
}

TEST_CASE("temperature and learning-rate schedules") {
  TrainConfig cfg;
  CHECK(temperature_at(cfg, 0) == 1.5);
  CHECK(temperature_at(cfg, 5) == doctest::Approx(1.25));
  CHECK(temperature_at(cfg, 10) == 1.0);
  CHECK(temperature_at(cfg, 200) == 1.0);
  CHECK(learning_rate_at(cfg, 0) == cfg.lr);
  CHECK(learning_rate_at(cfg, cfg.max_epochs / 2) == doctest::Approx(cfg.lr / 2));
  CHECK(learning_rate_at(cfg, cfg.max_epochs) == 0.0);
}

TEST_CASE("configuration validation") {
  TrainConfig cfg;
  cfg.validate();
  cfg.group_size = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.aug_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_train_config();
  CHECK_THROWS_AS(train(TrainState::fresh(cfg), {}, {}, cfg), ConfigError);
}

TEST_CASE("augmentations are rigid and keep adjacency") {
  const AoiGraph& g = instances()[0].graph;
  CHECK(augment(g, {}).adjacency() == g.adjacency());
  for (int rot = 0; rot < 6; ++rot) {
    for (bool mirror : {false, true}) {
      for (bool swap : {false, true}) {
        const AoiGraph h = augment(g, {rot, mirror, swap});
        CHECK(h.adjacency() == g.adjacency());
        CHECK(h.position(h.base()) == g.position(g.base()));
        for (int v = 0; v < g.cell_count(); ++v) {
          const double dg = norm(g.position(v) - g.position(g.base()));
          const double dh = norm(h.position(v) - h.position(h.base()));
          CHECK(std::abs(dg - dh) <= 1e-9);
          CHECK(std::abs(std::hypot(h.features()[v].x, h.features()[v].y) -
                         std::hypot(g.features()[v].x, g.features()[v].y)) <= 1e-12);
        }
        CHECK(exact_dfs(h).hamiltonian == exact_dfs(g).hamiltonian);
      }
    }
  }
  // Six 60 degree rotations compose to the identity.
  AoiGraph r = g;
  for (int k = 0; k < 6; ++k) r = augment(r, {1, false, false});
  for (int v = 0; v < g.node_count(); ++v) CHECK(norm(r.position(v) - g.position(v)) <= 1e-9);
  CHECK_THROWS_AS(augment(g, {7, false, false}), LogicError);
}

TEST_CASE("random augmentation draws from the whole group") {
  std::mt19937_64 rng(3);
  std::set<std::tuple<int, bool, bool>> seen;
  int identity = 0;
  for (int i = 0; i < 2000; ++i) {
    const Augmentation a = random_augmentation(rng, 0.9);
    seen.insert({a.rotation, a.mirror, a.swap_axes});
    identity += a.identity();
  }
  CHECK(seen.size() == 24);
  CHECK(identity > 100);
  CHECK(identity < 320);
  for (int i = 0; i < 100; ++i) CHECK(random_augmentation(rng, 0.0).identity());
}

TEST_CASE("rollout groups are reproducible") {
  const TrainConfig cfg = small_train_config();
  const PolicyParams params = PolicyParams::initialized(cfg.dims, 2);
  const AoiGraph& g = instances()[1].graph;
  const RolloutGroup a = collect_group(g, params, 1.5, 6, 99, cfg.reward, 1e-8, 1);
  const RolloutGroup b = collect_group(g, params, 1.5, 6, 99, cfg.reward, 1e-8, 3);
  REQUIRE(a.trajectories.size() == 6);
  std::vector<double> returns;
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(a.trajectories[k].nodes == b.trajectories[k].nodes);
    CHECK(a.trajectories[k].logp == b.trajectories[k].logp);
    returns.push_back(a.trajectories[k].episode_return);
  }
  CHECK(a.advantages == advantages(returns, 1e-8));
  const RolloutGroup c = collect_group(g, params, 1.5, 6, 100, cfg.reward, 1e-8, 1);
  bool differs = false;
  for (std::size_t k = 0; k < 6; ++k) differs = differs || c.trajectories[k].nodes != a.trajectories[k].nodes;
  CHECK(differs);
}

TEST_CASE("at the sampling policy the loss reduces to REINFORCE") {
  TrainConfig cfg = small_train_config();
  cfg.entropy_coef = 0.0;
  const PolicyParams params = PolicyParams::initialized(cfg.dims, 5);
  const AoiGraph& g = instances()[2].graph;
  const RolloutGroup grp = collect_group(g, params, 1.3, 4, 7, cfg.reward, 1e-8);
  std::vector<LossItem> items;
  std::size_t steps = 0;
  double expected_surrogate = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    items.push_back({&grp.graph, &grp.trajectories[k], grp.advantages[k]});
    steps += grp.trajectories[k].actions.size();
    expected_surrogate += grp.advantages[k] * grp.trajectories[k].actions.size();
    const StepTerms st = replay(params, g, grp.trajectories[k].actions, 1.3);
    for (std::size_t t = 0; t < st.logp.size(); ++t) {
      CHECK(std::abs(st.logp[t] - grp.trajectories[k].logp[t]) <= 1e-12);
    }
  }
  std::vector<double> grad(params.size());
  const LossResult res = grpo_loss(params, items, 1.3, cfg, grad);
  CHECK(res.steps == steps);
  CHECK(res.surrogate == doctest::Approx(expected_surrogate / steps).epsilon(1e-10));

  std::vector<double> reinforce(params.size(), 0.0);
  for (const LossItem& it : items) {
    const double w = -it.advantage / static_cast<double>(steps);
    replay(params, g, it.trajectory->actions, 1.3,
           [w](std::size_t, double, double) { return std::make_pair(w, 0.0); }, reinforce);
  }
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    diff = std::max(diff, std::abs(grad[i] - reinforce[i]));
    ref = std::max(ref, std::abs(reinforce[i]));
  }
  CHECK(ref > 0.0);
  CHECK(diff <= 1e-8);
}

TEST_CASE("clipped steps carry no surrogate gradient") {
  TrainConfig cfg = small_train_config();
  cfg.entropy_coef = 0.0;
  const PolicyParams params = PolicyParams::initialized(cfg.dims, 5);
  const AoiGraph& g = instances()[2].graph;
  std::mt19937_64 rng(1);
  Trajectory t = rollout(params, g, cfg.reward, Decoding::Sample, 1.0, &rng);
  for (double& lp : t.logp) lp -= 1.0;  // ratio e > 1 + eps
  const std::vector<LossItem> items{{&g, &t, 1.0}};
  std::vector<double> grad(params.size(), 1.0);
  const LossResult res = grpo_loss(params, items, 1.0, cfg, grad);
  CHECK(res.surrogate == doctest::Approx(1.0 + cfg.clip_eps));
  for (double x : grad) CHECK(x == 0.0);

  for (double& lp : t.logp) lp = -std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(grpo_loss(params, items, 1.0, cfg, grad), DivergenceError);
}

TEST_CASE("early stopping keeps the best model") {
  TrainConfig cfg;
  cfg.patience = 2;
  TrainState s = TrainState::fresh(small_train_config());
  const PolicyParams first = s.params;
  s.epoch = 1;
  CHECK_FALSE(record_validation(s, 0.1, cfg));
  s.params.values()[0] += 1.0;
  s.epoch = 2;
  CHECK_FALSE(record_validation(s, 0.2, cfg));
  const PolicyParams best = s.params;
  s.params.values()[0] += 1.0;
  s.epoch = 3;
  CHECK_FALSE(record_validation(s, 0.2, cfg));
  s.epoch = 4;
  CHECK(record_validation(s, 0.15, cfg));
  CHECK(s.best_epoch == 1);
  CHECK(s.best_val_sr == 0.2);
  CHECK(std::ranges::equal(s.best_params.values(), best.values()));
  CHECK_FALSE(std::ranges::equal(s.best_params.values(), first.values()));
}

TEST_CASE("training stops at the patience limit") {
  TrainConfig cfg = small_train_config();
  cfg.lr = 0.0;  // validation never improves after the first epoch
  cfg.max_epochs = 10;
  cfg.patience = 2;
  int epochs = 0;
  const TrainState s = train(TrainState::fresh(cfg), pointers(), {}, cfg,
                             {[&](const EpochStats&, const TrainState&) { ++epochs; }});
  CHECK(epochs == 3);
  CHECK(s.best_epoch == 0);
}

TEST_CASE("resuming from a checkpoint is bit-exact") {
  const TrainConfig cfg = small_train_config();
  const auto set = pointers();
  std::vector<std::string> log_a;
  const TrainState straight = train(TrainState::fresh(cfg), set, {}, cfg,
                                    {[&](const EpochStats& e, const TrainState&) {
                                      log_a.push_back(epoch_log_line(e));
                                    }});
  REQUIRE(straight.epoch == 2);

  TrainState s = TrainState::fresh(cfg);
  EpochStats e0 = train_epoch(s, set, cfg);
  e0.val_sr = greedy_success_rate(s.params, set, cfg.reward);
  record_validation(s, e0.val_sr, cfg);
  CHECK(epoch_log_line(e0) == log_a[0]);
  const auto path = (std::filesystem::temp_directory_path() / "hexcover_resume.ckpt").string();
  save_checkpoint(path, s.checkpoint(cfg.seed));
  TrainState resumed = TrainState::from_checkpoint(load_checkpoint(path));
  std::filesystem::remove(path);
  EpochStats e1 = train_epoch(resumed, set, cfg);
  e1.val_sr = greedy_success_rate(resumed.params, set, cfg.reward);
  CHECK(epoch_log_line(e1) == log_a[1]);
  CHECK(std::ranges::equal(resumed.params.values(), straight.params.values()));
  CHECK(resumed.adam_m == straight.adam_m);
  CHECK(resumed.adam_step == straight.adam_step);
}

TEST_CASE("training is independent of the job count") {
  TrainConfig one = small_train_config();
  one.max_epochs = 1;
  TrainConfig three = one;
  three.jobs = 3;
  TrainState a = TrainState::fresh(one), b = TrainState::fresh(three);
  train_epoch(a, pointers(), one);
  train_epoch(b, pointers(), three);
  CHECK(std::ranges::equal(a.params.values(), b.params.values()));
}

}  // TEST_SUITE
