#include "hexcover/training.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <numeric>

#include "hexcover/errors.hpp"
#include "hexcover/parallel.hpp"

namespace hexcover {

void TrainConfig::validate() const {
  dims.validate();
  if (group_size < 2) throw ConfigError("group size must be at least 2");
  if (inner_epochs < 1 || batch_instances < 1 || minibatch < 1) {
    throw ConfigError("inner epochs, batch and minibatch sizes must be positive");
  }
  if (!(clip_eps > 0.0) || entropy_coef < 0.0 || !(lr >= 0.0) || !(grad_clip > 0.0)) {
    throw ConfigError("clip, entropy, learning rate and grad cap must be non-negative");
  }
  if (max_epochs < 0 || patience < 1 || temp_epochs < 0) {
    throw ConfigError("epoch counts must be non-negative and patience positive");
  }
  if (!(aug_prob >= 0.0 && aug_prob <= 1.0)) throw ConfigError("augmentation probability in [0, 1]");
  if (!(temp_init > 0.0) || !(temp_final > 0.0)) throw ConfigError("temperatures must be positive");
  if (!(adv_eps > 0.0)) throw ConfigError("advantage epsilon must be positive");
}

double temperature_at(const TrainConfig& cfg, int epoch) {
  if (cfg.temp_epochs == 0 || epoch >= cfg.temp_epochs) return cfg.temp_final;
  const double f = static_cast<double>(epoch) / cfg.temp_epochs;
  return cfg.temp_init + (cfg.temp_final - cfg.temp_init) * f;
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  if (cfg.max_epochs == 0) return cfg.lr;
  return cfg.lr * std::max(0.0, 1.0 - static_cast<double>(epoch) / cfg.max_epochs);
}

std::vector<double> advantages(std::span<const double> returns, double eps) {
  if (returns.empty()) return {};
  const double g = static_cast<double>(returns.size());
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / g;
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  const double sigma = std::sqrt(var / g);
  std::vector<double> out;
  out.reserve(returns.size());
  for (double r : returns) out.push_back((r - mean) / (sigma + eps));
  return out;
}

double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double clip_grad_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double x : grad) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    for (double& x : grad) x *= s;
  }
  return norm;
}

AoiGraph augment(const AoiGraph& g, const Augmentation& a) {
  if (a.identity()) return g;
  if (a.rotation < 0 || a.rotation > 5) throw LogicError("rotation index out of range");
  const Vec2 pivot = g.position(g.base());
  const double theta = a.rotation * std::numbers::pi / 3.0;
  const double c = std::cos(theta), s = std::sin(theta);
  return g.transformed([&](Vec2 p) {
    Vec2 d = p - pivot;
    if (a.mirror) d.y = -d.y;
    d = {c * d.x - s * d.y, s * d.x + c * d.y};
    if (a.swap_axes) std::swap(d.x, d.y);
    return pivot + d;
  });
}

Augmentation random_augmentation(std::mt19937_64& rng, double p) {
  const double u = uniform01(rng);
  const std::uint64_t pick = rng() % 24;
  if (u >= p) return {};
  return {static_cast<int>(pick % 6), (pick / 6) % 2 == 1, pick / 12 == 1};
}

RolloutGroup collect_group(const AoiGraph& g, const PolicyParams& params, double temperature,
                           int group_size, std::uint64_t seed, const RewardConfig& reward,
                           double adv_eps, int jobs) {
  RolloutGroup group;
  group.graph = g;
  group.trajectories.resize(group_size);
  parallel_for(group_size, jobs, [&](std::size_t k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    group.trajectories[k] = rollout(params, group.graph, reward, Decoding::Sample, temperature, &rng);
  });
  std::vector<double> returns;
  for (const Trajectory& t : group.trajectories) returns.push_back(t.episode_return);
  group.advantages = advantages(returns, adv_eps);
  return group;
}

LossResult grpo_loss(const PolicyParams& params, std::span<const LossItem> items,
                     double temperature, const TrainConfig& cfg, std::span<double> grad,
                     int jobs) {
  if (grad.size() != params.size()) throw LogicError("gradient buffer size");
  std::size_t total_steps = 0;
  for (const LossItem& it : items) total_steps += it.trajectory->actions.size();
  std::fill(grad.begin(), grad.end(), 0.0);
  LossResult result;
  result.steps = total_steps;
  if (total_steps == 0) return result;
  const double inv = 1.0 / static_cast<double>(total_steps);

  std::vector<std::vector<double>> grads(items.size());
  std::vector<double> surrogate(items.size(), 0.0), ent(items.size(), 0.0);
  std::vector<std::uint8_t> bad(items.size(), 0);
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    const LossItem& it = items[i];
    grads[i].assign(params.size(), 0.0);
    const double a = it.advantage;
    replay(params, *it.graph, it.trajectory->actions, temperature,
           [&](std::size_t t, double logp, double h) {
             const double ratio = std::exp(logp - it.trajectory->logp[t]);
             if (!std::isfinite(ratio)) {
               bad[i] = 1;
               return std::make_pair(0.0, 0.0);
             }
             const double s = clipped_surrogate(ratio, a, cfg.clip_eps);
             surrogate[i] += s;
             ent[i] += h;
             // The unclipped branch carries d(r A)/d(logp) = r A; the clipped
             // branch is constant in the parameters.
             const bool unclipped = ratio * a <= std::clamp(ratio, 1.0 - cfg.clip_eps,
                                                            1.0 + cfg.clip_eps) * a;
             const double dlogp = unclipped ? -inv * ratio * a : 0.0;
             return std::make_pair(dlogp, -cfg.entropy_coef * inv);
           },
           grads[i]);
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (bad[i]) throw DivergenceError("non-finite importance ratio");
    result.surrogate += surrogate[i];
    result.entropy += ent[i];
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += grads[i][k];
  }
  result.surrogate *= inv;
  result.entropy *= inv;
  result.loss = -result.surrogate - cfg.entropy_coef * result.entropy;
  return result;
}

TrainState TrainState::fresh(const TrainConfig& cfg) {
  TrainState s;
  s.params = PolicyParams::initialized(cfg.dims, derive_seed(cfg.seed, 0x1417u));
  s.adam_m.assign(s.params.size(), 0.0);
  s.adam_v.assign(s.params.size(), 0.0);
  s.best_params = s.params;
  return s;
}

TrainState TrainState::from_checkpoint(const Checkpoint& ckpt) {
  TrainState s;
  s.params = ckpt.params;
  s.adam_step = ckpt.adam_step;
  s.adam_m = ckpt.adam_m.empty() ? std::vector<double>(s.params.size(), 0.0) : ckpt.adam_m;
  s.adam_v = ckpt.adam_v.empty() ? std::vector<double>(s.params.size(), 0.0) : ckpt.adam_v;
  s.epoch = ckpt.epoch;
  s.best_val_sr = ckpt.best_val_sr;
  s.best_epoch = ckpt.best_epoch;
  s.stale_epochs = ckpt.stale_epochs;
  s.best_params = ckpt.params;
  return s;
}

Checkpoint TrainState::checkpoint(std::uint64_t seed) const {
  Checkpoint c;
  c.params = params;
  c.seed = seed;
  c.epoch = epoch;
  c.adam_step = adam_step;
  c.adam_m = adam_m;
  c.adam_v = adam_v;
  c.best_val_sr = best_val_sr;
  c.best_epoch = best_epoch;
  c.stale_epochs = stale_epochs;
  return c;
}

void adam_update(TrainState& state, std::span<const double> grad, double lr,
                 const TrainConfig& cfg) {
  ++state.adam_step;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.adam_step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.adam_step));
  std::span<double> p = state.params.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    state.adam_m[i] = b1 * state.adam_m[i] + (1.0 - b1) * grad[i];
    state.adam_v[i] = b2 * state.adam_v[i] + (1.0 - b2) * grad[i] * grad[i];
    p[i] -= lr * (state.adam_m[i] / c1) / (std::sqrt(state.adam_v[i] / c2) + cfg.adam_eps);
  }
}

EpochStats train_epoch(TrainState& state, std::span<const AoiInstance* const> train,
                       const TrainConfig& cfg) {
  const int e = state.epoch;
  EpochStats stats;
  stats.epoch = e;
  stats.temperature = temperature_at(cfg, e);
  stats.lr = learning_rate_at(cfg, e);
  std::mt19937_64 rng(derive_seed(cfg.seed, 0xE90Cu, e));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::size_t rollouts = 0, solved = 0, loss_steps = 0;
  double return_sum = 0.0, entropy_sum = 0.0, loss_sum = 0.0;
  std::vector<double> grad(state.params.size());
  for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_instances, ++batch) {
    const std::size_t count = std::min<std::size_t>(cfg.batch_instances, order.size() - start);
    std::vector<Augmentation> augs(count);
    for (std::size_t i = 0; i < count; ++i) augs[i] = random_augmentation(rng, cfg.aug_prob);
    std::vector<RolloutGroup> groups(count);
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
      const AoiInstance& inst = *train[order[start + i]];
      groups[i] = collect_group(augment(inst.graph, augs[i]), state.params, stats.temperature,
                                cfg.group_size, derive_seed(cfg.seed, e, batch, i), cfg.reward,
                                cfg.adv_eps);
      groups[i].instance_id = inst.id;
    });
    std::vector<LossItem> items;
    for (const RolloutGroup& grp : groups) {
      for (std::size_t k = 0; k < grp.trajectories.size(); ++k) {
        const Trajectory& t = grp.trajectories[k];
        items.push_back({&grp.graph, &t, grp.advantages[k]});
        ++rollouts;
        solved += t.hamiltonian();
        return_sum += t.episode_return;
      }
    }
    // Log-probs in `items` stay those of the frozen pre-update policy.
    for (int k = 0; k < cfg.inner_epochs; ++k) {
      std::shuffle(items.begin(), items.end(), rng);
      for (std::size_t m = 0; m < items.size(); m += cfg.minibatch) {
        const std::size_t len = std::min<std::size_t>(cfg.minibatch, items.size() - m);
        const LossResult res = grpo_loss(state.params, std::span(items).subspan(m, len),
                                        stats.temperature, cfg, grad, cfg.jobs);
        clip_grad_norm(grad, cfg.grad_clip);
        adam_update(state, grad, stats.lr, cfg);
        ++stats.updates;
        entropy_sum += res.entropy * res.steps;
        loss_sum += res.loss * res.steps;
        loss_steps += res.steps;
      }
    }
    for (double x : state.params.values()) {
      if (!std::isfinite(x)) throw DivergenceError("non-finite parameter after update");
    }
  }
  stats.train_sr = rollouts ? static_cast<double>(solved) / rollouts : 0.0;
  stats.mean_return = rollouts ? return_sum / rollouts : 0.0;
  stats.entropy = loss_steps ? entropy_sum / loss_steps : 0.0;
  stats.loss = loss_steps ? loss_sum / loss_steps : 0.0;
  ++state.epoch;
  return stats;
}

double greedy_success_rate(const PolicyParams& params, std::span<const AoiInstance* const> set,
                           const RewardConfig& reward, int jobs) {
  if (set.empty()) return 0.0;
  std::vector<std::uint8_t> ok(set.size(), 0);
  parallel_for(set.size(), jobs, [&](std::size_t i) {
    ok[i] = rollout(params, set[i]->graph, reward, Decoding::Greedy, 1.0, nullptr).hamiltonian();
  });
  return static_cast<double>(std::count(ok.begin(), ok.end(), 1)) / set.size();
}

bool record_validation(TrainState& state, double val_sr, const TrainConfig& cfg) {
  if (val_sr > state.best_val_sr) {
    state.best_val_sr = val_sr;
    state.best_epoch = state.epoch - 1;
    state.best_params = state.params;
    state.stale_epochs = 0;
  } else {
    ++state.stale_epochs;
  }
  return state.stale_epochs >= cfg.patience;
}

TrainState train(TrainState state, std::span<const AoiInstance* const> train_set,
                 std::span<const AoiInstance* const> val_set, const TrainConfig& cfg,
                 const TrainHooks& hooks) {
  cfg.validate();
  if (train_set.empty()) throw ConfigError("training split is empty");
  // Without a validation split the training instances are monitored instead.
  const auto monitor = val_set.empty() ? train_set : val_set;
  while (state.epoch < cfg.max_epochs) {
    EpochStats stats = train_epoch(state, train_set, cfg);
    stats.val_sr = greedy_success_rate(state.params, monitor, cfg.reward, cfg.jobs);
    const bool stop = record_validation(state, stats.val_sr, cfg);
    if (hooks.on_epoch) hooks.on_epoch(stats, state);
    if (stop) break;
  }
  return state;
}

std::string epoch_log_line(const EpochStats& s) {
  nlohmann::ordered_json j;
  j["epoch"] = s.epoch;
  j["train_sr"] = s.train_sr;
  j["val_sr"] = s.val_sr;
  j["mean_return"] = s.mean_return;
  j["entropy"] = s.entropy;
  j["lr"] = s.lr;
  j["temperature"] = s.temperature;
  j["loss"] = s.loss;
  j["updates"] = s.updates;
  return j.dump();
}

}  // namespace hexcover
