#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hexcover/environment.hpp"
#include "hexcover/instance.hpp"
#include "hexcover/policy.hpp"

namespace hexcover {

struct TrainConfig {
  int group_size = 16;
  int inner_epochs = 4;
  double clip_eps = 0.2;
  double entropy_coef = 0.02;
  double lr = 3e-5;           // annealed linearly to zero at max_epochs
  int batch_instances = 32;
  int minibatch = 8;          // trajectories per update
  double grad_clip = 0.5;
  int max_epochs = 300;
  int patience = 4;
  double aug_prob = 0.9;
  double temp_init = 1.5;
  double temp_final = 1.0;
  int temp_epochs = 10;
  double adv_eps = 1e-8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int jobs = 1;
  PolicyDims dims;
  RewardConfig reward;

  void validate() const;  // throws ConfigError
};

double temperature_at(const TrainConfig& cfg, int epoch);
double learning_rate_at(const TrainConfig& cfg, int epoch);

// (R - mean) / (population std + eps) within one group.
std::vector<double> advantages(std::span<const double> returns, double eps);

// min(r A, clip(r, 1 - eps, 1 + eps) A).
double clipped_surrogate(double ratio, double advantage, double eps);

// Scales grad in place so its L2 norm is at most max_norm; returns the norm
// before scaling.
double clip_grad_norm(std::span<double> grad, double max_norm);

// Element of the hexagonal dihedral group (rotation by 60 deg multiples,
// optional mirror) plus an optional x/y axis swap, applied about the base.
struct Augmentation {
  int rotation = 0;  // multiples of 60 degrees, 0..5
  bool mirror = false;
  bool swap_axes = false;

  bool identity() const { return rotation == 0 && !mirror && !swap_axes; }
};

AoiGraph augment(const AoiGraph& g, const Augmentation& a);
// Identity with probability 1 - p, otherwise a uniformly drawn element.
Augmentation random_augmentation(std::mt19937_64& rng, double p);

struct RolloutGroup {
  std::string instance_id;
  AoiGraph graph;  // possibly augmented
  std::vector<Trajectory> trajectories;
  std::vector<double> advantages;
};

// G sampled rollouts; rollout k uses an engine seeded with derive(seed, k).
RolloutGroup collect_group(const AoiGraph& g, const PolicyParams& params, double temperature,
                           int group_size, std::uint64_t seed, const RewardConfig& reward,
                           double adv_eps, int jobs = 1);

struct LossItem {
  const AoiGraph* graph = nullptr;
  const Trajectory* trajectory = nullptr;
  double advantage = 0.0;
};

struct LossResult {
  double loss = 0.0;
  double surrogate = 0.0;  // mean over valid steps
  double entropy = 0.0;    // mean over valid steps
  std::size_t steps = 0;
};

// Per-step clipped surrogate with entropy bonus, averaged over every step of
// the minibatch. Overwrites grad with d(loss)/d(params). Throws
// DivergenceError on a non-finite ratio.
LossResult grpo_loss(const PolicyParams& params, std::span<const LossItem> items,
                     double temperature, const TrainConfig& cfg, std::span<double> grad,
                     int jobs = 1);

struct TrainState {
  PolicyParams params;
  std::uint64_t adam_step = 0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  int epoch = 0;  // next epoch to run
  double best_val_sr = -1.0;
  int best_epoch = -1;
  int stale_epochs = 0;
  PolicyParams best_params;

  static TrainState fresh(const TrainConfig& cfg);
  static TrainState from_checkpoint(const Checkpoint& ckpt);
  Checkpoint checkpoint(std::uint64_t seed) const;
};

void adam_update(TrainState& state, std::span<const double> grad, double lr,
                 const TrainConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double train_sr = 0.0;  // share of sampled rollouts that were Hamiltonian
  double val_sr = 0.0;    // greedy
  double mean_return = 0.0;
  double entropy = 0.0;
  double lr = 0.0;
  double temperature = 0.0;
  double loss = 0.0;
  int updates = 0;
};

// One pass over the training instances; advances state.epoch.
EpochStats train_epoch(TrainState& state, std::span<const AoiInstance* const> train,
                       const TrainConfig& cfg);

// Share of instances solved by greedy decoding.
double greedy_success_rate(const PolicyParams& params, std::span<const AoiInstance* const> set,
                           const RewardConfig& reward, int jobs = 1);

// Records validation and applies the early-stopping rule; returns true when
// training should stop.
bool record_validation(TrainState& state, double val_sr, const TrainConfig& cfg);

struct TrainHooks {
  std::function<void(const EpochStats&, const TrainState&)> on_epoch;
};

// Runs epochs until max_epochs or early stop. Returns the final state; the
// retained model is state.best_params.
TrainState train(TrainState state, std::span<const AoiInstance* const> train_set,
                 std::span<const AoiInstance* const> val_set, const TrainConfig& cfg,
                 const TrainHooks& hooks = {});

std::string epoch_log_line(const EpochStats& stats);

}  // namespace hexcover
